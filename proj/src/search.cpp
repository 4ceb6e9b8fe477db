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

#include "phaseforge/search.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "phaseforge/random.hpp"

namespace phaseforge {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<PassId, 12> kO3Order = {
    PassId::kMem2Reg,   PassId::kConstProp,   PassId::kConstFold, PassId::kInstCombine,
    PassId::kCopyProp,  PassId::kCse,         PassId::kLicm,      PassId::kUnroll2,
    PassId::kConstFold, PassId::kBranchFold,  PassId::kSimplifyCfg, PassId::kDce};

bool better(CycleCount c, const PassSequence& s, CycleCount best_c,
            const PassSequence& best_s) {
  return c < best_c || (c == best_c && s < best_s);
}

PassId random_pass(Rng& rng) {
  return *pass_from_index(static_cast<long>(rng.uniform_int(kNumPasses)));
}

PassSequence random_sequence(int length, Rng& rng) {
  PassSequence s(static_cast<std::size_t>(length));
  for (PassId& p : s) p = random_pass(rng);
  return s;
}

void require_length(int length) {
  if (length < 1) throw std::invalid_argument("sequence length must be at least 1");
}

// Depth-first enumeration that reuses the program of each shared prefix.
void enumerate(const Program& prog, int depth, PassSequence& prefix,
               SearchResult& r) {
  if (depth == 0) {
    const CycleCount c = evaluate_program(prog).cycles;
    ++r.evaluations_used;
    if (r.best_sequence.empty() || better(c, prefix, r.best_cycles, r.best_sequence)) {
      r.best_cycles = c;
      r.best_sequence = prefix;
    }
    return;
  }
  for (PassId p : all_passes()) {
    prefix.push_back(p);
    enumerate(apply_pass(p, prog), depth - 1, prefix, r);
    prefix.pop_back();
  }
}

}  // namespace

SearchResult brute_force(Backend& backend, const Benchmark& bench, int length) {
  require_length(length);
  long total = 1;
  for (int i = 0; i < length; ++i) {
    total *= static_cast<long>(kNumPasses);
    if (total > 1000000) {
      throw std::invalid_argument("brute force over 12^" + std::to_string(length) +
                                  " sequences exceeds the 10^6 limit");
    }
  }
  const auto t0 = Clock::now();
  SearchResult r;
  if (backend.in_process()) {
    PassSequence prefix;
    enumerate(bench.program, length, prefix, r);
  } else {
    // Odometer over sequences in lexicographic order.
    std::vector<std::size_t> digits(static_cast<std::size_t>(length), 0);
    PassSequence seq(digits.size());
    for (long n = 0; n < total; ++n) {
      for (std::size_t i = 0; i < digits.size(); ++i) seq[i] = all_passes()[digits[i]];
      const CycleCount c = backend.evaluate(bench, seq).cycles;
      ++r.evaluations_used;
      if (n == 0 || better(c, seq, r.best_cycles, r.best_sequence)) {
        r.best_cycles = c;
        r.best_sequence = seq;
      }
      for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < kNumPasses) break;
        digits[i] = 0;
      }
    }
  }
  r.wall_time = Clock::now() - t0;
  return r;
}

SearchResult random_search(Backend& backend, const Benchmark& bench, int length,
                           long budget, std::uint64_t seed) {
  require_length(length);
  if (budget < 1) throw std::invalid_argument("random search budget must be at least 1");
  const auto t0 = Clock::now();
  Rng rng(seed);
  SearchResult r;
  for (long n = 0; n < budget; ++n) {
    PassSequence seq = random_sequence(length, rng);
    const CycleCount c = backend.evaluate(bench, seq).cycles;
    ++r.evaluations_used;
    if (n == 0 || better(c, seq, r.best_cycles, r.best_sequence)) {
      r.best_cycles = c;
      r.best_sequence = std::move(seq);
    }
  }
  r.wall_time = Clock::now() - t0;
  return r;
}

SearchResult greedy_search(Backend& backend, const Benchmark& bench, int length) {
  require_length(length);
  const auto t0 = Clock::now();
  SearchResult r;
  Program current = bench.program;
  for (int step = 0; step < length; ++step) {
    bool first = true;
    PassId pick = PassId::kConstProp;
    CycleCount pick_cycles = 0;
    Program pick_program;
    for (PassId p : all_passes()) {
      CycleCount c;
      Program next;
      if (backend.in_process()) {
        next = apply_pass(p, current);
        c = evaluate_program(next).cycles;
      } else {
        PassSequence seq = r.best_sequence;
        seq.push_back(p);
        c = backend.evaluate(bench, seq).cycles;
      }
      ++r.evaluations_used;
      if (first || c < pick_cycles) {
        first = false;
        pick = p;
        pick_cycles = c;
        pick_program = std::move(next);
      }
    }
    r.best_sequence.push_back(pick);
    r.best_cycles = pick_cycles;
    r.trace.push_back(pick_cycles);
    if (backend.in_process()) current = std::move(pick_program);
  }
  r.wall_time = Clock::now() - t0;
  return r;
}

SearchResult genetic_search(Backend& backend, const Benchmark& bench, int length,
                            const GaConfig& cfg, std::uint64_t seed,
                            const GaObserver& observer) {
  require_length(length);
  const double mutation =
      cfg.mutation_rate < 0.0 ? 1.0 / static_cast<double>(length) : cfg.mutation_rate;
  if (cfg.population < 2) throw std::invalid_argument("GA population must be at least 2");
  if (cfg.generations < 0 || cfg.tournament < 1 || cfg.elitism < 0 ||
      cfg.elitism > cfg.population) {
    throw std::invalid_argument("invalid GA generation, tournament or elitism setting");
  }
  if (cfg.crossover_rate < 0.0 || cfg.crossover_rate > 1.0 || mutation > 1.0) {
    throw std::invalid_argument("GA rates must lie in [0, 1]");
  }
  for (const PassSequence& s : cfg.initial_population) {
    if (s.size() != static_cast<std::size_t>(length)) {
      throw std::invalid_argument("GA seed individual has the wrong length");
    }
  }

  const auto t0 = Clock::now();
  Rng rng(seed);
  std::map<PassSequence, CycleCount> memo;
  SearchResult r;
  auto cost = [&](const PassSequence& s) {
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    const CycleCount c = backend.evaluate(bench, s).cycles;
    memo.emplace(s, c);
    return c;
  };

  const std::size_t n = static_cast<std::size_t>(cfg.population);
  std::vector<PassSequence> pop;
  for (std::size_t i = 0; i < n; ++i) {
    pop.push_back(i < cfg.initial_population.size() ? cfg.initial_population[i]
                                                    : random_sequence(length, rng));
  }

  std::vector<CycleCount> fit(n);
  auto score = [&](int gen) {
    for (std::size_t i = 0; i < n; ++i) {
      fit[i] = cost(pop[i]);
      if (r.best_sequence.empty() ||
          better(fit[i], pop[i], r.best_cycles, r.best_sequence)) {
        r.best_cycles = fit[i];
        r.best_sequence = pop[i];
      }
    }
    r.trace.push_back(r.best_cycles);
    if (observer) observer(gen, pop);
  };
  auto wins = [&](std::size_t a, std::size_t b) {
    return better(fit[a], pop[a], fit[b], pop[b]);
  };
  auto tournament = [&] {
    std::size_t best = rng.uniform_int(n);
    for (int k = 1; k < cfg.tournament; ++k) {
      const std::size_t c = rng.uniform_int(n);
      if (wins(c, best)) best = c;
    }
    return best;
  };

  score(0);
  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), wins);

    std::vector<PassSequence> next;
    for (int e = 0; e < cfg.elitism; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);
    while (next.size() < n) {
      PassSequence a = pop[tournament()];
      PassSequence b = pop[tournament()];
      if (length > 1 && rng.uniform01() < cfg.crossover_rate) {
        const std::size_t cut = 1 + rng.uniform_int(static_cast<std::uint64_t>(length - 1));
        std::swap_ranges(a.begin() + static_cast<long>(cut), a.end(),
                         b.begin() + static_cast<long>(cut));
      }
      for (PassSequence* child : {&a, &b}) {
        for (PassId& g : *child) {
          if (mutation > 0.0 && rng.uniform01() < mutation) g = random_pass(rng);
        }
      }
      next.push_back(std::move(a));
      if (next.size() < n) next.push_back(std::move(b));
    }
    pop = std::move(next);
    score(gen);
  }
  r.evaluations_used = static_cast<long>(memo.size());
  r.wall_time = Clock::now() - t0;
  return r;
}

PassSequence o3_sequence(int length) {
  require_length(length);
  PassSequence s;
  for (int i = 0; i < length; ++i) s.push_back(kO3Order[static_cast<std::size_t>(i) % 12]);
  return s;
}

}  // namespace phaseforge
