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

#include <gtest/gtest.h>

#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "phaseforge/backend.hpp"
#include "phaseforge/search.hpp"
#include "support.hpp"

namespace pf = phaseforge;
using pf::PassId;

namespace {

pf::CycleCount cost_of(const pf::Benchmark& b, const pf::PassSequence& seq) {
  return pf::estimate_cycles(pf::apply_sequence(seq, b.program));
}

void expect_consistent(const pf::SearchResult& r, const pf::Benchmark& b, int length) {
  EXPECT_EQ(r.best_sequence.size(), static_cast<std::size_t>(length));
  EXPECT_EQ(r.best_cycles, cost_of(b, r.best_sequence)) << b.id;
  EXPECT_GE(r.evaluations_used, 1);
}

// Counts evaluations and forwards to the builtin backend.
class CountingBackend : public pf::Backend {
 public:
  pf::Evaluation evaluate(const pf::Benchmark& bench, std::span<const PassId> seq) override {
    ++calls;
    seen.insert(pf::format_sequence(seq));
    return inner.evaluate(bench, seq);
  }
  long calls = 0;
  std::set<std::string> seen;
  pf::BuiltinBackend inner;
};

}  // namespace

TEST(BruteForce, Fixtures) {
  pf::BuiltinBackend be;
  const auto ret5 = pf::brute_force(be, pf_test::fixture("ret5"), 1);
  EXPECT_EQ(ret5.best_cycles, 1u);
  EXPECT_EQ(ret5.best_sequence, (pf::PassSequence{PassId::kConstProp}));
  EXPECT_EQ(ret5.evaluations_used, 12);

  const auto fold = pf::brute_force(be, pf_test::fixture("fold"), 1);
  EXPECT_EQ(fold.best_cycles, 1u);
  EXPECT_EQ(fold.best_sequence, (pf::PassSequence{PassId::kConstFold}));

  const auto loop = pf_test::fixture("loop");
  const auto oracle = pf_test::exhaustive_oracle(loop.program, 3);
  const auto r = pf::brute_force(be, loop, 3);
  EXPECT_EQ(r.best_cycles, oracle.cycles);
  EXPECT_EQ(r.best_sequence, oracle.sequence);
  EXPECT_EQ(r.best_cycles, 32u);
  EXPECT_EQ(r.evaluations_used, 1728);
}

TEST(BruteForce, MatchesIndependentEnumeration) {
  pf::BuiltinBackend be;
  for (const auto& bench : pf_test::all_programs()) {
    const auto oracle = pf_test::exhaustive_oracle(bench.program, 2);
    const auto r = pf::brute_force(be, bench, 2);
    EXPECT_EQ(r.best_cycles, oracle.cycles) << bench.id;
    EXPECT_EQ(r.best_sequence, oracle.sequence) << bench.id;
    expect_consistent(r, bench, 2);
  }
}

TEST(BruteForce, LengthLimits) {
  pf::BuiltinBackend be;
  const auto b = pf_test::fixture("ret5");
  EXPECT_THROW(pf::brute_force(be, b, 0), std::invalid_argument);
  EXPECT_THROW(pf::brute_force(be, b, 6), std::invalid_argument);
}

TEST(BruteForce, HorizonMonotone) {
  pf::BuiltinBackend be;
  for (const auto& bench : pf::load_corpus(pf_test::bench_dir())) {
    const auto l1 = pf::brute_force(be, bench, 1).best_cycles;
    const auto l2 = pf::brute_force(be, bench, 2).best_cycles;
    const auto l3 = pf::brute_force(be, bench, 3).best_cycles;
    EXPECT_GE(l1, l2) << bench.id;
    EXPECT_GE(l2, l3) << bench.id;
  }
}

TEST(BruteForce, ExternalBackendAgrees) {
  ::setenv("PHASEFORGE_MOCK_MODE", "builtin", 1);
  ::setenv("PHASEFORGE_MOCK_CORPUS", pf_test::bench_dir().c_str(), 1);
  pf::ExternalBackend ext(pf_test::mock_backend(), std::chrono::milliseconds(10000));
  pf::BuiltinBackend builtin;
  for (const char* name : {"order3", "stack_vars", "scaled_sum"}) {
    const auto bench = pf::load_benchmark(pf_test::bench_dir() / (std::string(name) + ".tir"));
    const auto a = pf::brute_force(ext, bench, 2);
    const auto b = pf::brute_force(builtin, bench, 2);
    EXPECT_EQ(a.best_cycles, b.best_cycles) << name;
    EXPECT_EQ(a.best_sequence, b.best_sequence) << name;
    EXPECT_EQ(a.evaluations_used, 144);
  }
}

TEST(RandomSearch, SingleSample) {
  pf::BuiltinBackend be;
  const auto bench = pf_test::fixture("loop");
  const auto r = pf::random_search(be, bench, 5, 1, 3);
  EXPECT_EQ(r.evaluations_used, 1);
  expect_consistent(r, bench, 5);
  // The sample is the first five draws of the seeded generator.
  pf::Rng rng(3);
  pf::PassSequence want;
  for (int k = 0; k < 5; ++k) want.push_back(*pf::pass_from_index(rng.uniform_int(12)));
  EXPECT_EQ(r.best_sequence, want);
}

TEST(RandomSearch, Deterministic) {
  pf::BuiltinBackend be;
  const auto bench = pf::load_benchmark(pf_test::bench_dir() / "horner.tir");
  const auto a = pf::random_search(be, bench, 12, 200, 9);
  const auto b = pf::random_search(be, bench, 12, 200, 9);
  EXPECT_EQ(a.best_sequence, b.best_sequence);
  EXPECT_EQ(a.best_cycles, b.best_cycles);
  EXPECT_EQ(a.evaluations_used, 200);
  EXPECT_THROW(pf::random_search(be, bench, 3, 0, 1), std::invalid_argument);
}

TEST(RandomSearch, FindsLoopOptimumMostSeeds) {
  pf::BuiltinBackend be;
  const auto bench = pf_test::fixture("loop");
  const auto optimum = pf_test::exhaustive_oracle(bench.program, 3).cycles;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = pf::random_search(be, bench, 3, 5000, seed);
    EXPECT_GE(r.best_cycles, optimum);
    hits += r.best_cycles == optimum;
  }
  EXPECT_GE(hits, 8);
}

TEST(Greedy, Fixtures) {
  pf::BuiltinBackend be;
  const auto fold = pf::greedy_search(be, pf_test::fixture("fold"), 1);
  EXPECT_EQ(fold.best_sequence, (pf::PassSequence{PassId::kConstFold}));
  EXPECT_EQ(fold.best_cycles, 1u);
  EXPECT_EQ(fold.evaluations_used, 12);

  const auto ret5 = pf::greedy_search(be, pf_test::fixture("ret5"), 3);
  EXPECT_EQ(ret5.best_sequence, pf::PassSequence(3, PassId::kConstProp));
  EXPECT_EQ(ret5.best_cycles, 1u);
  EXPECT_EQ(ret5.evaluations_used, 36);
}

TEST(Greedy, MatchesOneStepSweepOracle) {
  pf::BuiltinBackend be;
  for (const auto& bench : pf_test::all_programs()) {
    pf::PassSequence seq;
    auto p = bench.program;
    for (int step = 0; step < 4; ++step) {
      PassId best = PassId::kConstProp;
      pf::CycleCount best_c = 0;
      for (PassId id : pf::all_passes()) {
        const auto c = pf::estimate_cycles(pf::apply_pass(id, p));
        if (id == PassId::kConstProp || c < best_c) {
          best = id;
          best_c = c;
        }
      }
      seq.push_back(best);
      p = pf::apply_pass(best, p);
    }
    const auto r = pf::greedy_search(be, bench, 4);
    EXPECT_EQ(r.best_sequence, seq) << bench.id;
  }
}

TEST(Greedy, NonIncreasingTrace) {
  pf::BuiltinBackend be;
  for (const auto& bench : pf::load_corpus(pf_test::bench_dir())) {
    const auto r = pf::greedy_search(be, bench, 12);
    ASSERT_EQ(r.trace.size(), 12u);
    pf::CycleCount prev = pf::estimate_cycles(bench.program);
    for (auto c : r.trace) {
      EXPECT_LE(c, prev) << bench.id;
      prev = c;
    }
    EXPECT_EQ(r.best_cycles, r.trace.back());
    expect_consistent(r, bench, 12);
    EXPECT_EQ(r.evaluations_used, 144);
  }
}

TEST(Genetic, BestEverNonDecreasingFitness) {
  pf::BuiltinBackend be;
  const auto bench = pf::load_benchmark(pf_test::bench_dir() / "nested_loops.tir");
  const auto r = pf::genetic_search(be, bench, 12, {}, 4);
  ASSERT_EQ(r.trace.size(), 31u);
  for (std::size_t g = 1; g < r.trace.size(); ++g) EXPECT_LE(r.trace[g], r.trace[g - 1]);
  EXPECT_EQ(r.best_cycles, r.trace.back());
  expect_consistent(r, bench, 12);
}

TEST(Genetic, ClosedPopulation) {
  pf::BuiltinBackend be;
  const auto bench = pf_test::fixture("loop");
  pf::GaConfig cfg;
  cfg.population = 6;
  cfg.generations = 5;
  cfg.crossover_rate = 0.0;
  cfg.mutation_rate = 0.0;
  const pf::PassSequence ind = {PassId::kLicm, PassId::kDce, PassId::kCse};
  cfg.initial_population.assign(6, ind);
  int generations_seen = 0;
  const auto r = pf::genetic_search(be, bench, 3, cfg, 0,
                                    [&](int, std::span<const pf::PassSequence> pop) {
                                      ++generations_seen;
                                      ASSERT_EQ(pop.size(), 6u);
                                      for (const auto& s : pop) EXPECT_EQ(s, ind);
                                    });
  EXPECT_EQ(generations_seen, 6);
  EXPECT_EQ(r.best_sequence, ind);
  EXPECT_EQ(r.evaluations_used, 1);
}

TEST(Genetic, MemoisesEvaluations) {
  CountingBackend be;
  const auto bench = pf::load_benchmark(pf_test::bench_dir() / "order3.tir");
  const auto r = pf::genetic_search(be, bench, 3, {}, 2);
  EXPECT_LE(r.evaluations_used, 50 * 31);
  EXPECT_EQ(static_cast<std::size_t>(r.evaluations_used), be.seen.size());
  EXPECT_EQ(be.calls, static_cast<long>(be.seen.size()));
}

TEST(Genetic, FindsLoopOptimum) {
  pf::BuiltinBackend be;
  const auto bench = pf_test::fixture("loop");
  const auto r = pf::genetic_search(be, bench, 3, {}, 0);
  EXPECT_EQ(r.best_cycles, pf_test::exhaustive_oracle(bench.program, 3).cycles);
}

TEST(Genetic, DeterministicAndValidated) {
  pf::BuiltinBackend be;
  const auto bench = pf::load_benchmark(pf_test::bench_dir() / "horner.tir");
  const auto a = pf::genetic_search(be, bench, 12, {}, 7);
  const auto b = pf::genetic_search(be, bench, 12, {}, 7);
  EXPECT_EQ(a.best_sequence, b.best_sequence);
  EXPECT_EQ(a.evaluations_used, b.evaluations_used);
  EXPECT_EQ(a.trace, b.trace);

  pf::GaConfig bad;
  bad.population = 1;
  EXPECT_THROW(pf::genetic_search(be, bench, 3, bad, 0), std::invalid_argument);
  bad = {};
  bad.crossover_rate = 1.5;
  EXPECT_THROW(pf::genetic_search(be, bench, 3, bad, 0), std::invalid_argument);
}

TEST(O3Sequence, Shape) {
  const std::vector<long> canon = {4, 0, 1, 7, 10, 3, 5, 6, 1, 8, 9, 2};
  const auto twelve = pf::o3_sequence(12);
  ASSERT_EQ(twelve.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(pf::index_of(twelve[i]), canon[i]);
  EXPECT_EQ(pf::o3_sequence(3),
            (pf::PassSequence{PassId::kMem2Reg, PassId::kConstProp, PassId::kConstFold}));
  const auto l24 = pf::o3_sequence(24);
  ASSERT_EQ(l24.size(), 24u);
  EXPECT_TRUE(std::equal(l24.begin(), l24.begin() + 12, l24.begin() + 12));
}

TEST(O3Sequence, NeverWorseThanNoOpt) {
  for (const auto& bench : pf::load_corpus(pf_test::bench_dir())) {
    EXPECT_LE(cost_of(bench, pf::o3_sequence(12)), pf::estimate_cycles(bench.program)) << bench.id;
  }
}

TEST(Search, NothingBeatsTheOracle) {
  pf::BuiltinBackend be;
  for (const auto& bench : pf::load_corpus(pf_test::bench_dir())) {
    for (int length : {1, 2}) {
      const auto opt = pf::brute_force(be, bench, length).best_cycles;
      EXPECT_GE(pf::random_search(be, bench, length, 30, 1).best_cycles, opt) << bench.id;
      EXPECT_GE(pf::greedy_search(be, bench, length).best_cycles, opt) << bench.id;
      pf::GaConfig small;
      small.population = 10;
      small.generations = 3;
      EXPECT_GE(pf::genetic_search(be, bench, length, small, 1).best_cycles, opt) << bench.id;
      EXPECT_GE(cost_of(bench, pf::o3_sequence(length)), opt) << bench.id;
    }
  }
}
