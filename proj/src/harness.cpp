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

#include "phaseforge/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "phaseforge/ir_text.hpp"
#include "phaseforge/verifier.hpp"

namespace phaseforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_file(const fs::path& path, std::string_view text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Corpus

Benchmark load_benchmark(const fs::path& file) {
  const std::string text = read_file(file);
  Program p;
  try {
    p = parse_text(text);
  } catch (const ParseError& e) {
    throw InputError(file.string() + ":" + std::to_string(e.line()) + ":" +
                     std::to_string(e.column()) + ": " + e.what());
  }
  const auto problems = validate(p);
  if (!problems.empty()) {
    throw InputError(file.string() + ": invalid program: " + problems.front());
  }
  return {file.stem().string(), file, std::move(p)};
}

std::vector<Benchmark> load_corpus(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw InputError(dir.string() + ": not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tir") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw InputError(dir.string() + ": empty corpus");
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename() < b.filename();
  });
  std::vector<Benchmark> out;
  for (const fs::path& f : files) out.push_back(load_benchmark(f));
  return out;
}

// ---------------------------------------------------------------------------
// Config

void apply_config_json(ExperimentConfig& cfg, std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw InputError("config is not a JSON object");
  }
  auto section = [](const json& obj, std::string_view name, auto&& apply) {
    if (!obj.is_object()) {
      throw InputError("config section '" + std::string(name) + "' must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
      if (!apply(key, value)) {
        throw InputError("unknown config key '" + std::string(name) + "." + key + "'");
      }
    }
  };
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "episodes") {
        cfg.episodes = value.get<long>();
      } else if (key == "state_mode") {
        cfg.state_mode = parse_state_mode(value.get<std::string>());
      } else if (key == "random") {
        section(value, key, [&](const std::string& k, const json& v) {
          if (k != "budget") return false;
          cfg.random_budget = v.get<long>();
          return true;
        });
      } else if (key == "ga") {
        section(value, key, [&](const std::string& k, const json& v) {
          GaConfig& g = cfg.ga;
          if (k == "population") g.population = v.get<int>();
          else if (k == "generations") g.generations = v.get<int>();
          else if (k == "tournament") g.tournament = v.get<int>();
          else if (k == "crossover_rate") g.crossover_rate = v.get<double>();
          else if (k == "mutation_rate") g.mutation_rate = v.get<double>();
          else if (k == "elitism") g.elitism = v.get<int>();
          else return false;
          return true;
        });
      } else if (key == "dqn") {
        section(value, key, [&](const std::string& k, const json& v) {
          DqnConfig& d = cfg.dqn;
          if (k == "hidden") d.hidden = v.get<std::vector<std::size_t>>();
          else if (k == "learning_rate") d.learning_rate = v.get<double>();
          else if (k == "gamma") d.gamma = v.get<double>();
          else if (k == "replay_capacity") d.replay_capacity = v.get<std::size_t>();
          else if (k == "batch_size") d.batch_size = v.get<std::size_t>();
          else if (k == "target_sync_steps") d.target_sync_steps = v.get<long>();
          else if (k == "learning_starts") d.learning_starts = v.get<std::size_t>();
          else if (k == "updates_per_step") d.updates_per_step = v.get<int>();
          else if (k == "epsilon_start") d.epsilon_start = v.get<double>();
          else if (k == "epsilon_end") d.epsilon_end = v.get<double>();
          else if (k == "epsilon_fraction") d.epsilon_fraction = v.get<double>();
          else return false;
          return true;
        });
      } else if (key == "pg") {
        section(value, key, [&](const std::string& k, const json& v) {
          PgConfig& p = cfg.pg;
          if (k == "hidden") p.hidden = v.get<std::vector<std::size_t>>();
          else if (k == "learning_rate") p.learning_rate = v.get<double>();
          else if (k == "baseline_decay") p.baseline_decay = v.get<double>();
          else if (k == "use_baseline") p.use_baseline = v.get<bool>();
          else if (k == "entropy_coef") p.entropy_coef = v.get<double>();
          else if (k == "batch_episodes") p.batch_episodes = v.get<int>();
          else return false;
          return true;
        });
      } else {
        throw InputError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("config value has the wrong type: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_header() {
  return "benchmark,algorithm,L,seed,best_sequence,cycles_noopt,cycles_best,"
         "cycles_o3,speedup_vs_noopt,speedup_vs_o3,evaluations_used,wall_ms";
}

std::string format_csv_row(const ResultRow& r) {
  std::string s;
  s += r.benchmark + ',' + r.algorithm + ',' + std::to_string(r.length) + ',' +
       std::to_string(r.seed) + ',' + format_sequence(r.best_sequence) + ',' +
       std::to_string(r.cycles_noopt) + ',' + std::to_string(r.cycles_best) + ',' +
       std::to_string(r.cycles_o3) + ',' + fmt_real(r.speedup_vs_noopt) + ',' +
       fmt_real(r.speedup_vs_o3) + ',' + std::to_string(r.evaluations_used) + ',' +
       fmt_real(r.wall_ms);
  return s;
}

std::string format_csv(std::span<const ResultRow> rows) {
  std::string out = csv_header() + "\n";
  for (const ResultRow& r : rows) out += format_csv_row(r) + "\n";
  return out;
}

std::vector<ResultRow> parse_csv(std::string_view text, const std::string& source) {
  std::vector<std::string> lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  if (lines.empty() || lines.front() != csv_header()) {
    throw InputError(source + ": header does not match the results schema (" +
                     csv_header() + ")");
  }
  std::vector<ResultRow> rows;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto f = split(lines[n], ',');
    const std::string where = source + ":" + std::to_string(n + 1);
    if (f.size() != 12) {
      throw InputError(where + ": expected 12 fields, found " + std::to_string(f.size()));
    }
    try {
      ResultRow r;
      r.benchmark = f[0];
      r.algorithm = f[1];
      r.length = std::stoi(f[2]);
      r.seed = std::stoull(f[3]);
      r.best_sequence = parse_sequence(f[4]);
      r.cycles_noopt = std::stoull(f[5]);
      r.cycles_best = std::stoull(f[6]);
      r.cycles_o3 = std::stoull(f[7]);
      r.speedup_vs_noopt = std::stod(f[8]);
      r.speedup_vs_o3 = std::stod(f[9]);
      r.evaluations_used = std::stol(f[10]);
      r.wall_ms = std::stod(f[11]);
      rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw InputError(where + ": malformed field (" + e.what() + ")");
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct Partial {
  std::size_t bench = 0;
  std::uint64_t seed = 0;
  ResultRow row;
};

void sort_rows(std::vector<Partial>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const Partial& a, const Partial& b) {
    return std::tie(a.bench, a.seed) < std::tie(b.bench, b.seed);
  });
}

std::vector<ResultRow> strip(std::vector<Partial> rows) {
  sort_rows(rows);
  std::vector<ResultRow> out;
  for (Partial& p : rows) out.push_back(std::move(p.row));
  return out;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      std::span<const Benchmark> corpus,
                                      std::shared_ptr<Backend> backend) {
  if (std::find(std::begin(kAlgorithms), std::end(kAlgorithms), cfg.algorithm) ==
      std::end(kAlgorithms)) {
    throw std::invalid_argument("unknown algorithm '" + cfg.algorithm + "'");
  }
  if (cfg.length < 1) throw std::invalid_argument("length must be at least 1");
  if (cfg.seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (corpus.empty()) throw std::invalid_argument("empty corpus");

  std::vector<Partial> done;
  try {
    std::vector<CycleCount> noopt;
    std::vector<CycleCount> o3;
    const PassSequence o3_seq = o3_sequence(cfg.length);
    for (const Benchmark& b : corpus) {
      noopt.push_back(backend->evaluate(b, {}).cycles);
      o3.push_back(backend->evaluate(b, o3_seq).cycles);
    }

    auto emit = [&](std::size_t bi, std::uint64_t seed, const SearchResult& r,
                    double wall_ms) {
      ResultRow row;
      row.benchmark = corpus[bi].id;
      row.algorithm = cfg.algorithm;
      row.length = cfg.length;
      row.seed = seed;
      row.best_sequence = r.best_sequence;
      row.cycles_noopt = noopt[bi];
      row.cycles_best = r.best_cycles;
      row.cycles_o3 = o3[bi];
      const CycleCount check = backend->evaluate(corpus[bi], r.best_sequence).cycles;
      if (check != r.best_cycles) {
        throw std::logic_error(corpus[bi].id + ": " + cfg.algorithm +
                               " reported " + std::to_string(r.best_cycles) +
                               " cycles for " + format_sequence(r.best_sequence) +
                               " but re-evaluation gives " + std::to_string(check));
      }
      row.speedup_vs_noopt = static_cast<double>(row.cycles_noopt) /
                             static_cast<double>(row.cycles_best);
      row.speedup_vs_o3 =
          static_cast<double>(row.cycles_o3) / static_cast<double>(row.cycles_best);
      row.evaluations_used = r.evaluations_used;
      row.wall_ms = cfg.timing ? wall_ms : 0.0;
      done.push_back({bi, seed, std::move(row)});
    };

    const std::string& algo = cfg.algorithm;
    if (algo == "dqn" || algo == "pg") {
      for (std::uint64_t seed : cfg.seeds) {
        EpisodeConfig ec;
        ec.length = cfg.length;
        ec.state_mode = cfg.state_mode;
        CorpusEnv env(std::vector<Benchmark>(corpus.begin(), corpus.end()), backend, ec);
        const auto t0 = Clock::now();
        TrainingResult tr =
            algo == "dqn" ? dqn_train(env, cfg.episodes, cfg.dqn, seed, cfg.state_mode)
                          : pg_train(env, cfg.episodes, cfg.pg, seed, cfg.state_mode);
        // Training time is shared evenly across the benchmarks it covered.
        const double share = ms_since(t0) / static_cast<double>(corpus.size());
        std::map<std::string, long> steps;
        for (const EpisodeRecord& rec : tr.log) {
          steps[rec.program] += static_cast<long>(rec.sequence.size());
        }
        for (std::size_t bi = 0; bi < corpus.size(); ++bi) {
          SearchResult r;
          auto it = tr.best.find(corpus[bi].id);
          if (it == tr.best.end()) {
            // Fewer episodes than benchmarks: this one was never visited.
            r.best_sequence = {};
            r.best_cycles = noopt[bi];
          } else {
            r.best_sequence = it->second.sequence;
            r.best_cycles = it->second.cycles;
          }
          r.evaluations_used = steps[corpus[bi].id];
          emit(bi, seed, r, share);
        }
      }
    } else {
      const bool seeded = algo == "random" || algo == "genetic";
      for (std::size_t bi = 0; bi < corpus.size(); ++bi) {
        std::optional<std::pair<SearchResult, double>> fixed;
        for (std::uint64_t seed : cfg.seeds) {
          if (!seeded && fixed) {
            emit(bi, seed, fixed->first, fixed->second);
            continue;
          }
          const auto t0 = Clock::now();
          SearchResult r;
          const Benchmark& b = corpus[bi];
          if (algo == "bruteforce") {
            r = brute_force(*backend, b, cfg.length);
          } else if (algo == "random") {
            r = random_search(*backend, b, cfg.length, cfg.random_budget, seed);
          } else if (algo == "greedy") {
            r = greedy_search(*backend, b, cfg.length);
          } else if (algo == "genetic") {
            r = genetic_search(*backend, b, cfg.length, cfg.ga, seed);
          } else {
            r.best_sequence = o3_seq;
            r.best_cycles = o3[bi];
            r.evaluations_used = 1;
          }
          const double wall = ms_since(t0);
          if (!seeded) fixed.emplace(r, wall);
          emit(bi, seed, r, wall);
        }
      }
    }
  } catch (const BackendError& e) {
    throw ExperimentAborted(e.what(), strip(std::move(done)));
  }
  return strip(std::move(done));
}

// ---------------------------------------------------------------------------
// Reports

double geometric_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

std::vector<ReportCell> summarize(std::span<const ResultRow> rows) {
  std::map<std::pair<std::size_t, int>, std::vector<const ResultRow*>> groups;
  std::vector<std::string> extra;  // algorithms outside the standard seven
  auto rank = [&](const std::string& a) -> std::size_t {
    const auto* it = std::find(std::begin(kAlgorithms), std::end(kAlgorithms), a);
    if (it != std::end(kAlgorithms)) return static_cast<std::size_t>(it - std::begin(kAlgorithms));
    auto e = std::find(extra.begin(), extra.end(), a);
    if (e == extra.end()) {
      extra.push_back(a);
      e = extra.end() - 1;
    }
    return std::size(kAlgorithms) + static_cast<std::size_t>(e - extra.begin());
  };
  for (const ResultRow& r : rows) groups[{rank(r.algorithm), r.length}].push_back(&r);

  std::vector<ReportCell> cells;
  for (const auto& [key, members] : groups) {
    ReportCell c;
    c.algorithm = members.front()->algorithm;
    c.length = key.second;
    c.rows = members.size();
    std::vector<double> vs_noopt;
    std::vector<double> vs_o3;
    for (const ResultRow* r : members) {
      vs_noopt.push_back(r->speedup_vs_noopt);
      vs_o3.push_back(r->speedup_vs_o3);
      c.evaluations_used += r->evaluations_used;
      c.wall_ms += r->wall_ms;
    }
    c.geomean_vs_noopt = geometric_mean(vs_noopt);
    c.geomean_vs_o3 = geometric_mean(vs_o3);
    cells.push_back(std::move(c));
  }
  return cells;
}

namespace {

json cell_json(const ReportCell& c) {
  return {{"algorithm", c.algorithm},
          {"L", c.length},
          {"rows", c.rows},
          {"geomean_speedup_vs_noopt", c.geomean_vs_noopt},
          {"geomean_speedup_vs_o3", c.geomean_vs_o3},
          {"evaluations_used", c.evaluations_used},
          {"wall_ms", c.wall_ms}};
}

}  // namespace

std::string experiment_report_json(const ExperimentConfig& cfg,
                                   std::span<const ResultRow> rows) {
  json cells = json::array();
  for (const ReportCell& c : summarize(rows)) cells.push_back(cell_json(c));
  std::set<std::string> benchmarks;
  for (const ResultRow& r : rows) benchmarks.insert(r.benchmark);
  json doc = {{"algorithm", cfg.algorithm},
              {"L", cfg.length},
              {"seeds", cfg.seeds},
              {"benchmarks", benchmarks.size()},
              {"rows", rows.size()},
              {"summary", cells}};
  return doc.dump(2) + "\n";
}

CompareReport compare_report(std::span<const ResultRow> rows) {
  const std::vector<ReportCell> cells = summarize(rows);
  auto find = [&](std::string_view algo, int length) -> const ReportCell* {
    for (const ReportCell& c : cells) {
      if (c.algorithm == algo && c.length == length) return &c;
    }
    return nullptr;
  };

  std::vector<std::string> algos(std::begin(kAlgorithms), std::end(kAlgorithms));
  std::vector<int> lengths = {3, 12, 24};
  for (const ReportCell& c : cells) {
    if (std::find(algos.begin(), algos.end(), c.algorithm) == algos.end()) {
      algos.push_back(c.algorithm);
    }
    if (std::find(lengths.begin(), lengths.end(), c.length) == lengths.end()) {
      lengths.push_back(c.length);
    }
  }
  std::sort(lengths.begin(), lengths.end());

  std::string text;
  char line[256];
  std::snprintf(line, sizeof line, "%-11s %4s %5s %13s %10s %12s %12s\n", "algorithm",
                "L", "rows", "vs_noopt", "vs_o3", "evaluations", "wall_ms");
  text += line;
  json table = json::array();
  for (const std::string& a : algos) {
    for (int l : lengths) {
      const ReportCell* c = find(a, l);
      if (c == nullptr) {
        std::snprintf(line, sizeof line, "%-11s %4d %5s %13s %10s %12s %12s\n",
                      a.c_str(), l, "-", "-", "-", "-", "-");
        table.push_back({{"algorithm", a}, {"L", l}, {"rows", 0}});
      } else {
        std::snprintf(line, sizeof line, "%-11s %4d %5zu %13.4f %10.4f %12ld %12.1f\n",
                      a.c_str(), l, c->rows, c->geomean_vs_noopt, c->geomean_vs_o3,
                      c->evaluations_used, c->wall_ms);
        table.push_back(cell_json(*c));
      }
      text += line;
    }
  }

  // Observations, reported but never judged.
  json saturation = json::object();
  std::string obs;
  for (const std::string& a : algos) {
    const ReportCell* c12 = find(a, 12);
    const ReportCell* c24 = find(a, 24);
    if (c12 && c24) {
      const double ratio = c24->geomean_vs_noopt / c12->geomean_vs_noopt;
      saturation[a] = ratio;
      std::snprintf(line, sizeof line, "  %s: L=24 / L=12 geomean speedup = %.4f\n",
                    a.c_str(), ratio);
      obs += line;
    }
  }
  json runtime = json::object();
  for (int l : lengths) {
    const ReportCell* ga = find("genetic", l);
    for (const char* rl : {"dqn", "pg"}) {
      const ReportCell* c = find(rl, l);
      if (ga == nullptr || c == nullptr || c->evaluations_used == 0) continue;
      const double evals = static_cast<double>(ga->evaluations_used) /
                           static_cast<double>(c->evaluations_used);
      const double wall = c->wall_ms > 0.0 ? ga->wall_ms / c->wall_ms : 0.0;
      runtime[std::string(rl) + "_L" + std::to_string(l)] = {
          {"genetic_over_rl_evaluations", evals}, {"genetic_over_rl_wall", wall}};
      std::snprintf(line, sizeof line,
                    "  genetic / %s at L=%d: evaluations x%.3f, wall time x%.3f\n", rl,
                    l, evals, wall);
      obs += line;
    }
  }
  if (!obs.empty()) text += "\nobservations\n" + obs;

  json doc = {{"table", table},
              {"observations", {{"saturation_24_over_12", saturation},
                                {"runtime", runtime}}}};
  return {text, doc.dump(2) + "\n"};
}

// ---------------------------------------------------------------------------
// Agent evaluation

std::vector<AgentRow> evaluate_agent(const Agent& agent, std::span<const Benchmark> corpus,
                                     int length, std::shared_ptr<Backend> backend) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  if (length < 1) throw std::invalid_argument("length must be at least 1");
  EpisodeConfig ec;
  ec.length = length;
  ec.state_mode = agent.metadata().state_mode;
  CorpusEnv env(std::vector<Benchmark>(corpus.begin(), corpus.end()), backend, ec);
  const PassSequence o3_seq = o3_sequence(length);
  const auto& trained = agent.metadata().programs;

  std::vector<AgentRow> out;
  for (std::size_t bi = 0; bi < corpus.size(); ++bi) {
    const Rollout roll = greedy_rollout(agent, env, bi);
    AgentRow ar;
    ResultRow& r = ar.row;
    r.benchmark = corpus[bi].id;
    r.algorithm = std::string(algorithm_tag(agent.algorithm()));
    r.length = length;
    r.seed = agent.metadata().seed;
    r.best_sequence = roll.sequence;
    r.cycles_noopt = backend->evaluate(corpus[bi], {}).cycles;
    r.cycles_o3 = backend->evaluate(corpus[bi], o3_seq).cycles;
    r.cycles_best = backend->evaluate(corpus[bi], roll.sequence).cycles;
    if (r.cycles_best != roll.cycles) {
      throw std::logic_error(r.benchmark + ": rollout cycles do not re-verify");
    }
    r.speedup_vs_noopt =
        static_cast<double>(r.cycles_noopt) / static_cast<double>(r.cycles_best);
    r.speedup_vs_o3 = static_cast<double>(r.cycles_o3) / static_cast<double>(r.cycles_best);
    r.evaluations_used = static_cast<long>(roll.sequence.size());
    r.wall_ms = 0.0;
    ar.transfer = std::find(trained.begin(), trained.end(), r.benchmark) == trained.end();
    out.push_back(std::move(ar));
  }
  return out;
}

std::string format_agent_csv(std::span<const AgentRow> rows) {
  std::string out = csv_header() + ",transfer\n";
  for (const AgentRow& r : rows) {
    out += format_csv_row(r.row) + (r.transfer ? ",true\n" : ",false\n");
  }
  return out;
}

}  // namespace phaseforge
