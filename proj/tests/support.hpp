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

// Shared helpers for the test binaries.

#ifndef PHASEFORGE_TESTS_SUPPORT_HPP_
#define PHASEFORGE_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "phaseforge/backend.hpp"
#include "phaseforge/cost_model.hpp"
#include "phaseforge/harness.hpp"
#include "phaseforge/ir_text.hpp"
#include "phaseforge/passes.hpp"
#include "phaseforge/random.hpp"

namespace pf_test {

inline std::filesystem::path corpus_dir() { return PHASEFORGE_CORPUS_DIR; }
inline std::filesystem::path bench_dir() { return corpus_dir() / "bench"; }
inline std::filesystem::path fixtures_dir() { return corpus_dir() / "fixtures"; }
inline std::filesystem::path heldout_dir() { return corpus_dir() / "heldout"; }
inline std::filesystem::path golden_dir() { return PHASEFORGE_GOLDEN_DIR; }
inline std::string mock_backend() { return PHASEFORGE_MOCK_BACKEND; }
inline std::string cli() { return PHASEFORGE_CLI; }

inline phaseforge::Benchmark fixture(const std::string& name) {
  return phaseforge::load_benchmark(fixtures_dir() / (name + ".tir"));
}

inline phaseforge::Benchmark from_text(const std::string& id, const std::string& text) {
  return {id, {}, phaseforge::parse_text(text)};
}

// Canonical corpus followed by the three fixtures.
inline std::vector<phaseforge::Benchmark> all_programs() {
  auto out = phaseforge::load_corpus(bench_dir());
  for (auto& b : phaseforge::load_corpus(fixtures_dir())) out.push_back(std::move(b));
  return out;
}

// Seeded argument vectors in [-4, 12]: small enough that every corpus loop
// terminates quickly, wide enough to cover zero and negative trip counts.
inline std::vector<std::vector<std::int64_t>> input_vectors(const phaseforge::Program& p,
                                                            int count, std::uint64_t seed) {
  phaseforge::Rng rng(seed);
  std::vector<std::vector<std::int64_t>> out;
  for (int k = 0; k < count; ++k) {
    std::vector<std::int64_t> v;
    for (std::size_t i = 0; i < p.main().params.size(); ++i) {
      v.push_back(static_cast<std::int64_t>(rng.uniform_int(17)) - 4);
    }
    out.push_back(std::move(v));
  }
  return out;
}

// Exhaustive oracle written independently of the search module: replays
// every sequence from scratch and keeps the first strict improvement, which
// in lexicographic enumeration order is the lexicographic tie-break.
struct OracleBest {
  phaseforge::PassSequence sequence;
  phaseforge::CycleCount cycles = 0;
};
inline OracleBest exhaustive_oracle(const phaseforge::Program& p, int length) {
  long total = 1;
  for (int i = 0; i < length; ++i) total *= 12;
  OracleBest best;
  for (long n = 0; n < total; ++n) {
    phaseforge::PassSequence seq(static_cast<std::size_t>(length));
    long rest = n;
    for (int i = length - 1; i >= 0; --i) {
      seq[static_cast<std::size_t>(i)] = *phaseforge::pass_from_index(rest % 12);
      rest /= 12;
    }
    const auto c = phaseforge::estimate_cycles(phaseforge::apply_sequence(seq, p));
    if (n == 0 || c < best.cycles) best = {seq, c};
  }
  return best;
}

// Runs a shell command line, returning the exit status.
inline int run(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}

}  // namespace pf_test

#endif  // PHASEFORGE_TESTS_SUPPORT_HPP_
