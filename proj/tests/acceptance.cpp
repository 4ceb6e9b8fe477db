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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Artifacts (result CSVs, the comparison report) go to the
// directory given as the first argument, default ./acceptance_out.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "phaseforge/agents.hpp"
#include "phaseforge/env.hpp"
#include "phaseforge/harness.hpp"
#include "phaseforge/interpreter.hpp"
#include "phaseforge/nn.hpp"
#include "phaseforge/search.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
namespace pf = phaseforge;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Shared across criteria so the expensive pieces run once.
struct Context {
  fs::path out_dir;
  std::vector<pf::Benchmark> corpus;
  std::map<std::string, pf::CycleCount> optimum_l3;
  std::optional<pf::Agent> dqn_agent;  // seed 0 from criterion 4
};

pf::CycleCount optimum(Context& ctx, const pf::Benchmark& b) {
  auto it = ctx.optimum_l3.find(b.id);
  if (it == ctx.optimum_l3.end()) {
    pf::BuiltinBackend be;
    it = ctx.optimum_l3.emplace(b.id, pf::brute_force(be, b, 3).best_cycles).first;
  }
  return it->second;
}

Outcome semantics(Context&) {
  long checks = 0, mismatches = 0;
  std::string first;
  for (const auto& bench : pf_test::all_programs()) {
    const auto inputs = pf_test::input_vectors(bench.program, 5, 2026);
    for (pf::PassId id : pf::all_passes()) {
      const auto out = pf::apply_pass(id, bench.program);
      for (const auto& args : inputs) {
        ++checks;
        if (!pf::interpret(bench.program, args, 1000000)
                 .same_outcome(pf::interpret(out, args, 1000000))) {
          if (mismatches++ == 0) first = bench.id + "/" + std::string(pf::pass_name(id));
        }
      }
    }
  }
  return {mismatches == 0 && checks == 12 * 15 * 5,
          std::to_string(checks) + " comparisons, " + std::to_string(mismatches) +
              " mismatches" + (first.empty() ? "" : " (first " + first + ")")};
}

Outcome golden(Context& ctx) {
  const auto golden_rows = pf::parse_csv(
      pf::read_file(pf_test::golden_dir() / "bruteforce_L3.csv"), "golden");
  std::map<std::string, pf::ResultRow> want;
  for (const auto& r : golden_rows) want[r.benchmark] = r;
  pf::BuiltinBackend be;
  double slowest = 0.0;
  int matched = 0;
  for (const auto& b : ctx.corpus) {
    const auto t0 = Clock::now();
    const auto r = pf::brute_force(be, b, 3);
    slowest = std::max(slowest, seconds_since(t0));
    ctx.optimum_l3[b.id] = r.best_cycles;
    auto it = want.find(b.id);
    if (it != want.end() && it->second.cycles_best == r.best_cycles &&
        it->second.best_sequence == r.best_sequence && r.evaluations_used == 1728) {
      ++matched;
    }
  }
  return {matched == 12 && want.size() == 12 && slowest < 10.0,
          std::to_string(matched) + "/12 golden optima reproduced, slowest " +
              fmt("%.3f", slowest) + " s"};
}

Outcome corpus_gap(Context& ctx) {
  std::vector<double> gaps;
  int wide = 0;
  for (const auto& b : ctx.corpus) {
    const double o3 =
        static_cast<double>(pf::estimate_cycles(pf::apply_sequence(pf::o3_sequence(3), b.program)));
    const double g = o3 / static_cast<double>(optimum(ctx, b));
    gaps.push_back(g);
    wide += g >= 1.10;
  }
  const double gm = pf::geometric_mean(gaps);
  return {gm >= 1.10 && wide >= 3,
          "geomean o3(3)/optimum " + fmt("%.4f", gm) + ", " + std::to_string(wide) +
              "/12 benchmarks >= 1.10"};
}

Outcome dqn_quality(Context& ctx) {
  int good_seeds = 0;
  double slowest = 0.0;
  std::string per_seed;
  for (std::uint64_t seed : {0, 1, 2}) {
    pf::CorpusEnv env(ctx.corpus, std::make_shared<pf::BuiltinBackend>(), {3});
    const auto t0 = Clock::now();
    auto result = pf::dqn_train(env, 2000, {}, seed, pf::StateMode::kBoth);
    slowest = std::max(slowest, seconds_since(t0));
    int close = 0;
    for (const auto& b : ctx.corpus) {
      const auto found = result.best.at(b.id).cycles;
      close += static_cast<double>(found) <= 1.02 * static_cast<double>(optimum(ctx, b));
    }
    good_seeds += close >= 10;
    per_seed += (per_seed.empty() ? "" : ",") + std::to_string(close);
    if (seed == 0) {
      result.agent.metadata().episodes = 2000;
      ctx.dqn_agent.emplace(std::move(result.agent));
    }
  }
  return {good_seeds >= 2 && slowest <= 300.0,
          "benchmarks within 2% per seed {" + per_seed + "}/12, slowest training " +
              fmt("%.1f", slowest) + " s"};
}

Outcome ga_quality(Context& ctx) {
  pf::BuiltinBackend be;
  std::string per_seed;
  bool every_seed = true;
  std::vector<double> ga12, greedy12;
  for (std::uint64_t seed : {0, 1, 2}) {
    int exact = 0;
    for (const auto& b : ctx.corpus) {
      exact += pf::genetic_search(be, b, 3, {}, seed).best_cycles == optimum(ctx, b);
      const double c0 = static_cast<double>(pf::estimate_cycles(b.program));
      ga12.push_back(c0 / static_cast<double>(pf::genetic_search(be, b, 12, {}, seed).best_cycles));
    }
    every_seed = every_seed && exact >= 10;
    per_seed += (per_seed.empty() ? "" : ",") + std::to_string(exact);
  }
  for (const auto& b : ctx.corpus) {
    const double c0 = static_cast<double>(pf::estimate_cycles(b.program));
    greedy12.push_back(c0 / static_cast<double>(pf::greedy_search(be, b, 12).best_cycles));
  }
  const double g = pf::geometric_mean(ga12);
  const double gr = pf::geometric_mean(greedy12);
  return {every_seed && g >= gr, "L=3 optimum hits per seed {" + per_seed + "}/12; L=12 geomean " +
                                     "genetic " + fmt("%.4f", g) + " vs greedy " + fmt("%.4f", gr)};
}

Outcome greedy_monotone(Context& ctx) {
  pf::BuiltinBackend be;
  int ok = 0;
  for (const auto& b : ctx.corpus) {
    const auto r = pf::greedy_search(be, b, 12);
    pf::CycleCount prev = pf::estimate_cycles(b.program);
    bool mono = r.trace.size() == 12;
    for (auto c : r.trace) {
      mono = mono && c <= prev;
      prev = c;
    }
    ok += mono;
  }
  return {ok == 12, std::to_string(ok) + "/12 programs non-increasing over 12 steps"};
}

Outcome horizon_monotone(Context& ctx) {
  pf::BuiltinBackend be;
  int ok = 0;
  for (const auto& b : ctx.corpus) {
    const auto l1 = pf::brute_force(be, b, 1).best_cycles;
    const auto l2 = pf::brute_force(be, b, 2).best_cycles;
    ok += l1 >= l2 && l2 >= optimum(ctx, b);
  }
  return {ok == 12, std::to_string(ok) + "/12 programs satisfy best(1) >= best(2) >= best(3)"};
}

Outcome gradients(Context&) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    pf::Rng rng(seed);
    const std::size_t in = 3 + rng.uniform_int(6);
    const std::size_t hidden = 4 + rng.uniform_int(12);
    const std::size_t out = 1 + rng.uniform_int(5);
    pf::DenseNet net({in, hidden, hidden, out}, rng);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      for (double& b : net.biases(l)) b = rng.uniform(-0.5, 0.5);
    }
    std::vector<double> x(in), t(out);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : t) v = rng.uniform(-1.0, 1.0);
    worst = std::max(worst, pf::grad_check(net, x, pf::squared_error(t), rng));
  }
  pf::Rng rng(4);
  pf::DenseNet net({6, 16, 16, 3}, rng);
  std::vector<double> x(6);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  pf::GradCheckOptions bad;
  bad.corrupt_backward = true;
  const double control = pf::grad_check(net, x, pf::squared_error({0.1, 0.2, 0.3}), rng, bad);
  return {worst < 1e-4 && control > 1e-2,
          "max error over 20 nets " + fmt("%.2e", worst) + ", corrupted control " +
              fmt("%.2e", control)};
}

int cli(const std::string& args) {
  return pf_test::run("'" + pf_test::cli() + "' " + args + " >/dev/null 2>&1");
}

Outcome determinism(Context& ctx) {
  const fs::path dir = ctx.out_dir / "determinism";
  fs::create_directories(dir);
  const std::string corpus = "--corpus '" + pf_test::bench_dir().string() + "'";
  bool ok = true;
  int compared = 0;
  for (const char* algo : {"random", "genetic", "greedy"}) {
    for (const char* run : {"a", "b"}) {
      ok = ok && cli(std::string("search --algo ") + algo + " --length 12 " + corpus +
                     " --seed 0,1 --out '" + (dir / (std::string(algo) + run + ".csv")).string() +
                     "'") == 0;
    }
    ok = ok && pf::read_file(dir / (std::string(algo) + "a.csv")) ==
                   pf::read_file(dir / (std::string(algo) + "b.csv"));
    ++compared;
  }
  for (const char* algo : {"dqn", "pg"}) {
    for (const char* run : {"a", "b"}) {
      ok = ok && cli(std::string("train --algo ") + algo + " --length 3 --episodes 200 --seed 7 " +
                     corpus + " --save '" + (dir / (std::string(algo) + run + ".json")).string() +
                     "'") == 0;
    }
    ok = ok && pf::read_file(dir / (std::string(algo) + "a.json.log.jsonl")) ==
                   pf::read_file(dir / (std::string(algo) + "b.json.log.jsonl"));
    ok = ok && pf::read_file(dir / (std::string(algo) + "a.json")) ==
                   pf::read_file(dir / (std::string(algo) + "b.json"));
    ++compared;
  }
  return {ok && compared == 5, "3 search CSVs and 2 training logs/checkpoints byte-identical on rerun"};
}

Outcome transfer(Context& ctx) {
  if (!ctx.dqn_agent) return {false, "no trained agent (criterion 4 did not run)"};
  const fs::path path = ctx.out_dir / "dqn_seed0.json";
  pf::save_agent(*ctx.dqn_agent, path);
  const auto loaded = pf::load_agent(path, pf::Algorithm::kDqn);
  auto backend = std::make_shared<pf::BuiltinBackend>();
  pf::CorpusEnv env(ctx.corpus, backend, {3});
  int same = 0;
  for (std::size_t t = 0; t < env.num_tasks(); ++t) {
    const auto a = pf::greedy_rollout(*ctx.dqn_agent, env, t);
    const auto b = pf::greedy_rollout(loaded, env, t);
    same += a.sequence == b.sequence && a.cycles == b.cycles;
  }
  const auto held = pf::load_corpus(pf_test::heldout_dir());
  const auto rows = pf::evaluate_agent(loaded, held, 3, backend);
  bool legal = rows.size() == 1 && rows[0].transfer && rows[0].row.best_sequence.size() == 3;
  legal = legal && rows[0].row.cycles_best ==
                       pf::estimate_cycles(pf::apply_sequence(rows[0].row.best_sequence,
                                                              held[0].program));
  return {same == 12 && legal,
          std::to_string(same) + "/12 rollouts identical after reload; held-out " +
              (rows.empty() ? std::string("?")
                            : rows[0].row.benchmark + " -> " +
                                  pf::format_sequence(rows[0].row.best_sequence) + " (" +
                                  std::to_string(rows[0].row.cycles_best) + " cycles)")};
}

Outcome external_backend(Context& ctx) {
  bool ok = true;
  std::string notes;
  ::setenv("PHASEFORGE_MOCK_CORPUS", pf_test::bench_dir().c_str(), 1);
  try {
    ::setenv("PHASEFORGE_MOCK_MODE", "echo42", 1);
    pf::ExternalBackend echo(pf_test::mock_backend(), std::chrono::milliseconds(5000));
    ok = ok && echo.evaluate(ctx.corpus[0], pf::o3_sequence(3)).cycles == 42;
    ::setenv("PHASEFORGE_MOCK_MODE", "builtin", 1);
    pf::ExternalBackend real(pf_test::mock_backend(), std::chrono::milliseconds(5000));
    pf::BuiltinBackend local;
    for (const auto& b : ctx.corpus) {
      const auto a = real.evaluate(b, pf::o3_sequence(12));
      const auto c = local.evaluate(b, pf::o3_sequence(12));
      ok = ok && a.cycles == c.cycles && a.features == c.features;
    }
    notes = "hello+eval round trips ok";
  } catch (const std::exception& e) {
    ok = false;
    notes = e.what();
  }
  const std::string search = "search --algo greedy --length 3 --corpus '" +
                             pf_test::fixtures_dir().string() + "' --seed 0 --out '" +
                             (ctx.out_dir / "external.csv").string() + "'";
  const std::string backend = "PHASEFORGE_BACKEND='cmd:" + pf_test::mock_backend() + "' ";
  const int timeout = pf_test::run(backend +
                                   "PHASEFORGE_MOCK_MODE=hang PHASEFORGE_BACKEND_TIMEOUT_MS=500 '" +
                                   pf_test::cli() + "' " + search + " >/dev/null 2>&1");
  const int malformed = pf_test::run(backend + "PHASEFORGE_MOCK_MODE=malformed '" + pf_test::cli() +
                                     "' " + search + " >/dev/null 2>&1");
  ok = ok && timeout == 3 && malformed == 3;
  return {ok, notes + "; timeout exit " + std::to_string(timeout) + ", malformed exit " +
                  std::to_string(malformed)};
}

Outcome fig1_report(Context& ctx) {
  auto backend = std::make_shared<pf::BuiltinBackend>();
  std::vector<pf::ResultRow> rows;
  for (int length : {3, 12, 24}) {
    for (std::string_view algo : pf::kAlgorithms) {
      if (algo == "bruteforce" && length > 3) continue;  // 12^12 sequences
      pf::ExperimentConfig cfg;
      cfg.algorithm = std::string(algo);
      cfg.length = length;
      cfg.seeds = {0};
      cfg.timing = true;
      cfg.episodes = length == 3 ? 2000 : 500;
      const auto part = pf::run_experiment(cfg, ctx.corpus, backend);
      pf::write_file(ctx.out_dir / (std::string(algo) + "_L" + std::to_string(length) + ".csv"),
                     pf::format_csv(part));
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  const auto report = pf::compare_report(rows);
  pf::write_file(ctx.out_dir / "compare.txt", report.text);
  pf::write_file(ctx.out_dir / "compare.json", report.json);
  const auto j = nlohmann::json::parse(report.json);
  std::size_t cells = j["table"].size(), filled = 0;
  for (const auto& c : j["table"]) {
    if (c["rows"].get<std::size_t>() > 0) {
      ++filled;
      if (!c.contains("geomean_speedup_vs_noopt") || !c.contains("geomean_speedup_vs_o3") ||
          !c.contains("evaluations_used")) {
        filled = 0;
        break;
      }
    }
  }
  const bool observed = j["observations"]["saturation_24_over_12"].size() == 6 &&
                        j["observations"]["runtime"].size() == 6;
  std::printf("%s", report.text.c_str());
  return {cells == 21 && filled == 19 && observed,
          std::to_string(cells) + " cells, " + std::to_string(filled) +
              " populated (bruteforce L=12/24 infeasible), report in " +
              (ctx.out_dir / "compare.txt").string()};
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(ctx.out_dir);
  ctx.corpus = pf::load_corpus(pf_test::bench_dir());
  ::unsetenv("PHASEFORGE_BACKEND");

  const std::vector<std::pair<const char*, std::function<Outcome(Context&)>>> criteria = {
      {"semantics preservation", semantics},
      {"brute-force golden table", golden},
      {"corpus gap vs O3 analog", corpus_gap},
      {"DQN quality", dqn_quality},
      {"GA quality", ga_quality},
      {"greedy monotonicity", greedy_monotone},
      {"horizon monotonicity", horizon_monotone},
      {"gradient correctness", gradients},
      {"determinism", determinism},
      {"checkpoint transfer", transfer},
      {"external backend conformance", external_backend},
      {"speedup report shape", fig1_report},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2zu %s: %s - %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
