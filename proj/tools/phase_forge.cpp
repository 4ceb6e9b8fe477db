// Copyright 2026 The PhaseForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// phase-forge: command-line front end for the pass-ordering experiments.
//
// Exit codes: 0 success, 1 usage error, 2 bad input, 3 backend failure.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phaseforge/agents.hpp"
#include "phaseforge/harness.hpp"
#include "phaseforge/interpreter.hpp"
#include "phaseforge/ir_text.hpp"

namespace fs = std::filesystem;
using namespace phaseforge;

namespace {

constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kBackend = 3;

// Raised for bad flag values that CLI11 itself cannot see.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::int64_t> parse_ints(const std::string& text) {
  std::vector<std::int64_t> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw UsageError("not an integer list: '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

PassSequence parse_passes(const std::string& text) {
  try {
    return parse_sequence(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

StateMode parse_mode(const std::string& text) {
  try {
    return parse_state_mode(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void write_or_fail(const fs::path& path, const std::string& text) {
  try {
    write_file(path, text);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

int cmd_features(const std::string& file) {
  const Benchmark b = load_benchmark(file);
  const Evaluation e = backend_from_environment()->evaluate(b, {});
  std::printf("[");
  for (std::size_t i = 0; i < e.features.size(); ++i) {
    std::printf("%s%lld", i ? "," : "", static_cast<long long>(e.features[i]));
  }
  std::printf("]\n");
  return 0;
}

int cmd_cycles(const std::string& file, const std::string& passes) {
  const Benchmark b = load_benchmark(file);
  const PassSequence seq = parse_passes(passes);
  std::printf("%llu\n", static_cast<unsigned long long>(
                            backend_from_environment()->evaluate(b, seq).cycles));
  return 0;
}

int cmd_interpret(const std::string& file, const std::string& args, long fuel) {
  const Benchmark b = load_benchmark(file);
  const auto values = parse_ints(args);
  if (values.size() != b.program.main().params.size()) {
    throw UsageError("@main takes " + std::to_string(b.program.main().params.size()) +
                     " arguments, got " + std::to_string(values.size()));
  }
  if (fuel < 0) throw UsageError("--fuel must be non-negative");
  const ExecResult r = interpret(b.program, values, static_cast<std::uint64_t>(fuel));
  if (r.value) {
    std::printf("%lld\n", static_cast<long long>(*r.value));
  } else {
    std::printf("trap %s\n", std::string(trap_name(*r.trap)).c_str());
  }
  std::fprintf(stderr, "steps %llu\n", static_cast<unsigned long long>(r.steps_used));
  return 0;
}

struct SearchArgs {
  std::string algo;
  int length = 3;
  std::string corpus;
  std::string seeds = "0";
  long budget = -1;
  long episodes = -1;
  std::string config;
  std::string out;
  std::string state_mode;
  bool timing = false;
};

int cmd_search(const SearchArgs& a) {
  ExperimentConfig cfg;
  cfg.algorithm = a.algo;
  cfg.length = a.length;
  cfg.seeds.clear();
  for (std::int64_t s : parse_ints(a.seeds)) {
    if (s < 0) throw UsageError("seeds must be non-negative");
    cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (cfg.seeds.empty()) throw UsageError("--seed needs at least one value");
  if (!a.config.empty()) apply_config_json(cfg, read_file(a.config));
  if (a.budget >= 0) {
    if (a.budget == 0) throw UsageError("--budget must be at least 1");
    cfg.random_budget = a.budget;
  }
  if (a.episodes >= 0) cfg.episodes = a.episodes;
  if (!a.state_mode.empty()) cfg.state_mode = parse_mode(a.state_mode);
  cfg.timing = a.timing;
  if (a.algo == "bruteforce" && cfg.length > 5) {
    throw UsageError("bruteforce supports lengths up to 5");
  }

  const std::vector<Benchmark> corpus = load_corpus(a.corpus);
  const fs::path out(a.out);
  std::vector<ResultRow> rows;
  try {
    rows = run_experiment(cfg, corpus, backend_from_environment());
  } catch (const ExperimentAborted& e) {
    write_or_fail(out.string() + ".partial", format_csv(e.rows));
    std::fprintf(stderr, "phase-forge: backend failure: %s\n", e.what());
    std::fprintf(stderr, "phase-forge: %zu finished rows kept in %s.partial\n",
                 e.rows.size(), out.string().c_str());
    return kBackend;
  }
  write_or_fail(out, format_csv(rows));
  fs::path report = out;
  report.replace_extension(".json");
  if (report == out) report += ".json";
  write_or_fail(report, experiment_report_json(cfg, rows));
  for (const ReportCell& c : summarize(rows)) {
    std::printf("%s L=%d rows=%zu geomean vs No-Opt %.4f, vs O3 %.4f, evaluations %ld\n",
                c.algorithm.c_str(), c.length, c.rows, c.geomean_vs_noopt,
                c.geomean_vs_o3, c.evaluations_used);
  }
  return 0;
}

struct TrainArgs {
  std::string algo;
  std::string corpus;
  int length = 3;
  long episodes = 2000;
  std::uint64_t seed = 0;
  std::string save;
  std::string state_mode = "both";
  std::string log;
  std::string config;
};

int cmd_train(const TrainArgs& a) {
  const Algorithm algo = parse_algorithm(a.algo);
  ExperimentConfig cfg;
  if (!a.config.empty()) apply_config_json(cfg, read_file(a.config));
  cfg.state_mode = parse_mode(a.state_mode);
  if (a.episodes < 1) throw UsageError("--episodes must be at least 1");

  EpisodeConfig ec;
  ec.length = a.length;
  ec.state_mode = cfg.state_mode;
  CorpusEnv env(load_corpus(a.corpus), backend_from_environment(), ec);
  TrainingResult tr =
      algo == Algorithm::kDqn
          ? dqn_train(env, a.episodes, cfg.dqn, a.seed, cfg.state_mode)
          : pg_train(env, a.episodes, cfg.pg, a.seed, cfg.state_mode);
  save_agent(tr.agent, a.save);
  const std::string log_path = a.log.empty() ? a.save + ".log.jsonl" : a.log;
  write_or_fail(log_path, format_training_log(tr.log));
  for (const auto& [program, best] : tr.best) {
    std::printf("%-20s best %llu cycles via %s\n", program.c_str(),
                static_cast<unsigned long long>(best.cycles),
                format_sequence(best.sequence).c_str());
  }
  return 0;
}

int cmd_evaluate(const std::string& agent_path, const std::string& corpus_dir,
                 int length, const std::string& out) {
  const Agent agent = load_agent(agent_path);
  const auto rows =
      evaluate_agent(agent, load_corpus(corpus_dir), length, backend_from_environment());
  write_or_fail(out, format_agent_csv(rows));
  for (const AgentRow& r : rows) {
    std::printf("%-20s %llu cycles via %s%s\n", r.row.benchmark.c_str(),
                static_cast<unsigned long long>(r.row.cycles_best),
                format_sequence(r.row.best_sequence).c_str(),
                r.transfer ? " (transfer)" : "");
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& csvs, const std::string& json_out) {
  std::vector<ResultRow> rows;
  for (const std::string& path : csvs) {
    auto part = parse_csv(read_file(path), path);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const CompareReport report = compare_report(rows);
  std::fputs(report.text.c_str(), stdout);
  if (!json_out.empty()) write_or_fail(json_out, report.json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search and learn compiler pass orders for the toy IR"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string file;
  std::string passes;
  auto* features = app.add_subcommand("features", "Print the 56 static features");
  features->add_option("file", file, "Program (.tir)")->required();

  auto* cycles = app.add_subcommand("cycles", "Estimate cycles after optional passes");
  cycles->add_option("file", file, "Program (.tir)")->required();
  cycles->add_option("--passes", passes, "Pass ids or names, e.g. 4,1,8");

  std::string args;
  long fuel = 1000000;
  auto* interp = app.add_subcommand("interpret", "Run a program");
  interp->add_option("file", file, "Program (.tir)")->required();
  interp->add_option("--args", args, "Comma-separated integer arguments");
  interp->add_option("--fuel", fuel, "Instruction budget");

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "Run a search algorithm over a corpus");
  search->add_option("--algo", sa.algo, "Algorithm")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kAlgorithms),
                                                     std::end(kAlgorithms))));
  search->add_option("--length", sa.length, "Sequence length")
      ->required()
      ->check(CLI::PositiveNumber);
  search->add_option("--corpus", sa.corpus, "Directory of .tir files")->required();
  search->add_option("--seed", sa.seeds, "Seed or comma-separated seeds")->required();
  search->add_option("--budget", sa.budget, "Random-search evaluations");
  search->add_option("--episodes", sa.episodes, "Training episodes for dqn/pg");
  search->add_option("--config", sa.config, "JSON hyperparameter file");
  search->add_option("--state-mode", sa.state_mode, "features|histogram|both");
  search->add_option("--out", sa.out, "Results CSV")->required();
  search->add_flag("--timing", sa.timing, "Record wall_ms (makes output run-dependent)");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a DQN or PG agent");
  train->add_option("--algo", ta.algo, "dqn|pg")
      ->required()
      ->check(CLI::IsMember({"dqn", "pg"}));
  train->add_option("--corpus", ta.corpus, "Directory of .tir files")->required();
  train->add_option("--length", ta.length, "Episode length")
      ->required()
      ->check(CLI::PositiveNumber);
  train->add_option("--episodes", ta.episodes, "Training episodes")->required();
  train->add_option("--seed", ta.seed, "Seed")->required();
  train->add_option("--save", ta.save, "Checkpoint path")->required();
  train->add_option("--state-mode", ta.state_mode, "features|histogram|both");
  train->add_option("--log", ta.log, "Training log (default <save>.log.jsonl)");
  train->add_option("--config", ta.config, "JSON hyperparameter file");

  std::string agent_path;
  std::string corpus_dir;
  int length = 3;
  std::string out;
  auto* evaluate = app.add_subcommand("evaluate", "Greedy rollouts of a trained agent");
  evaluate->add_option("--agent", agent_path, "Checkpoint")->required();
  evaluate->add_option("--corpus", corpus_dir, "Directory of .tir files")->required();
  evaluate->add_option("--length", length, "Rollout length")
      ->required()
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--out", out, "Rows CSV")->required();

  std::vector<std::string> csvs;
  std::string json_out;
  auto* compare = app.add_subcommand("compare", "Aggregate result CSVs");
  compare->add_option("csv", csvs, "Result CSVs")->required();
  compare->add_option("--json", json_out, "Also write a JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*features) return cmd_features(file);
    if (*cycles) return cmd_cycles(file, passes);
    if (*interp) return cmd_interpret(file, args, fuel);
    if (*search) return cmd_search(sa);
    if (*train) return cmd_train(ta);
    if (*evaluate) return cmd_evaluate(agent_path, corpus_dir, length, out);
    if (*compare) return cmd_compare(csvs, json_out);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "phase-forge: %s\n", e.what());
    return kUsage;
  } catch (const BackendError& e) {
    std::fprintf(stderr, "phase-forge: backend failure: %s\n", e.what());
    return kBackend;
  } catch (const InputError& e) {
    std::fprintf(stderr, "phase-forge: %s\n", e.what());
    return kInput;
  } catch (const CheckpointError& e) {
    std::fprintf(stderr, "phase-forge: %s\n", e.what());
    return kInput;
  } catch (const TrainingError& e) {
    std::fprintf(stderr, "phase-forge: training failed: %s\n", e.what());
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "phase-forge: %s\n", e.what());
    return kInput;
  }
  return kUsage;
}
