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

// Experiment orchestration: corpus loading, per-benchmark search or
// training runs, result rows as CSV, and aggregate speedup reports.

#ifndef PHASEFORGE_HARNESS_HPP_
#define PHASEFORGE_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "phaseforge/agents.hpp"
#include "phaseforge/backend.hpp"
#include "phaseforge/search.hpp"

namespace phaseforge {

// Bad input files: unparsable or invalid programs, empty corpora, CSVs with
// the wrong columns, unusable config files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses and validates one .tir file; the id is the file stem.
Benchmark load_benchmark(const std::filesystem::path& file);
// Every *.tir file in `dir`, ordered by filename. Errors name the file.
std::vector<Benchmark> load_corpus(const std::filesystem::path& dir);

inline constexpr std::string_view kAlgorithms[] = {
    "bruteforce", "random", "greedy", "genetic", "o3", "dqn", "pg"};

struct ExperimentConfig {
  std::string algorithm;
  int length = 3;
  std::vector<std::uint64_t> seeds = {0};
  StateMode state_mode = StateMode::kBoth;
  long random_budget = 1550;  // matches the GA's nominal 50 x 31
  long episodes = 2000;       // dqn / pg
  GaConfig ga;
  DqnConfig dqn;
  PgConfig pg;
  bool timing = false;  // record wall_ms; off keeps CSVs reproducible
};

// Overlays a JSON config ({"random": {"budget": N}, "ga": {...},
// "dqn": {...}, "pg": {...}, "episodes": N, "state_mode": "..."}).
// Throws InputError on unknown keys or wrong types.
void apply_config_json(ExperimentConfig& cfg, std::string_view json_text);

struct ResultRow {
  std::string benchmark;
  std::string algorithm;
  int length = 0;
  std::uint64_t seed = 0;
  PassSequence best_sequence;
  CycleCount cycles_noopt = 0;
  CycleCount cycles_best = 0;
  CycleCount cycles_o3 = 0;
  double speedup_vs_noopt = 0.0;
  double speedup_vs_o3 = 0.0;
  long evaluations_used = 0;
  double wall_ms = 0.0;
};

std::string csv_header();
std::string format_csv_row(const ResultRow& row);
std::string format_csv(std::span<const ResultRow> rows);
// Throws InputError when the header or a field does not match the schema.
std::vector<ResultRow> parse_csv(std::string_view text, const std::string& source);

// Thrown by run_experiment when the backend fails; rows finished before the
// failure are carried along for the partial file.
class ExperimentAborted : public BackendError {
 public:
  ExperimentAborted(const std::string& what, std::vector<ResultRow> done)
      : BackendError(what), rows(std::move(done)) {}
  std::vector<ResultRow> rows;
};

// One row per (benchmark, seed), ordered by benchmark then seed. Each best
// sequence is re-evaluated before it is reported; a mismatch throws
// std::logic_error.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      std::span<const Benchmark> corpus,
                                      std::shared_ptr<Backend> backend);

double geometric_mean(std::span<const double> values);

struct ReportCell {
  std::string algorithm;
  int length = 0;
  std::size_t rows = 0;
  double geomean_vs_noopt = 0.0;
  double geomean_vs_o3 = 0.0;
  long evaluations_used = 0;
  double wall_ms = 0.0;
};

// Cells grouped by (algorithm, L), in kAlgorithms order then ascending L.
std::vector<ReportCell> summarize(std::span<const ResultRow> rows);
// JSON written next to a results CSV by the search command.
std::string experiment_report_json(const ExperimentConfig& cfg,
                                   std::span<const ResultRow> rows);

struct CompareReport {
  std::string text;
  std::string json;
};
// Always lists the 7 algorithms x {3, 12, 24}; cells without rows print "-".
CompareReport compare_report(std::span<const ResultRow> rows);

struct AgentRow {
  ResultRow row;
  bool transfer = false;  // program id absent from the training metadata
};

std::vector<AgentRow> evaluate_agent(const Agent& agent,
                                     std::span<const Benchmark> corpus, int length,
                                     std::shared_ptr<Backend> backend);
std::string format_agent_csv(std::span<const AgentRow> rows);

// Writes `text` to `path` through a sibling temporary and a rename.
void write_file(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

}  // namespace phaseforge

#endif  // PHASEFORGE_HARNESS_HPP_
