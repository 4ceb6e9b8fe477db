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

// Non-learning pass-order searches over a backend: exhaustive enumeration,
// uniform random sampling, greedy append, a genetic algorithm, and the fixed
// O3-analog pipeline. Ties always go to the lexicographically smallest
// sequence.

#ifndef PHASEFORGE_SEARCH_HPP_
#define PHASEFORGE_SEARCH_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "phaseforge/backend.hpp"
#include "phaseforge/passes.hpp"

namespace phaseforge {

struct SearchResult {
  PassSequence best_sequence;
  CycleCount best_cycles = 0;
  long evaluations_used = 0;
  std::chrono::nanoseconds wall_time{0};
  // greedy: cycles after each appended pass; genetic: best-ever cycles after
  // the initial population and after every generation. Empty otherwise.
  std::vector<CycleCount> trace;
};

// Exhaustive search; throws std::invalid_argument unless 1 <= L and
// 12^L <= 10^6.
SearchResult brute_force(Backend& backend, const Benchmark& bench, int length);

// Throws std::invalid_argument when budget < 1 or length < 1.
SearchResult random_search(Backend& backend, const Benchmark& bench, int length,
                           long budget, std::uint64_t seed);

SearchResult greedy_search(Backend& backend, const Benchmark& bench, int length);

struct GaConfig {
  int population = 50;
  int generations = 30;
  int tournament = 3;
  double crossover_rate = 0.9;
  double mutation_rate = -1.0;  // negative means 1 / L
  int elitism = 1;
  // Seeds the first generation; random individuals fill any remainder.
  std::vector<PassSequence> initial_population;
};

// Called with the generation index (0 = initial) and that generation's
// individuals.
using GaObserver = std::function<void(int, std::span<const PassSequence>)>;

// Fitness is speedup over No-Opt, i.e. lower cycles win. Evaluations are
// memoised by sequence, so evaluations_used counts distinct sequences.
// Throws std::invalid_argument on a population below 2 or rates outside [0,1].
SearchResult genetic_search(Backend& backend, const Benchmark& bench, int length,
                            const GaConfig& cfg, std::uint64_t seed,
                            const GaObserver& observer = {});

// The O3-analog pipeline: a prefix of the 12-pass order for L <= 12, the
// order repeated cyclically beyond that.
PassSequence o3_sequence(int length);

}  // namespace phaseforge

#endif  // PHASEFORGE_SEARCH_HPP_
