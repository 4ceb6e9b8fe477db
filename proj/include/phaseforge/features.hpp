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

// RL state construction: static program features, the histogram of applied
// passes, and the normalised network input.

#ifndef PHASEFORGE_FEATURES_HPP_
#define PHASEFORGE_FEATURES_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "phaseforge/ir.hpp"
#include "phaseforge/passes.hpp"

namespace phaseforge {

inline constexpr std::size_t kNumFeatures = 56;
inline constexpr std::size_t kStateSize = kNumFeatures + kNumPasses + 1;

// Index map:
//    0-19  opcode counts in opcode table order
//   20     instructions (terminators included)   21  blocks
//   22     CFG edges
//   23-26  blocks with 0 / 1 / 2 / >2 predecessors
//   27-29  blocks with 0 / 1 / 2 successors
//   30     critical edges                         31  largest block
//   32     floor(mean block size)                 33  blocks with <= 5 insts
//   34     blocks with >= 15 insts                35  registers defined
//   36     constant operands                      37  register operands
//   38     load + store + alloca + gep            39  arithmetic (0-9)
//   40     binary ops with a constant operand     41  ... all-constant
//   42     back edges                             43  max loop depth
//   44     insts in blocks of loop depth >= 1     45  phi incoming pairs
//   46     blocks with phis                       47  dead instructions
//   48     br on a constant                       49  in-block duplicate exprs
//   50     loads from non-escaping allocas        51  stores to them
//   52     non-escaping allocas                   53  sum of block critpaths
//   54     blocks ending in ret                   55  self-loop blocks
using FeatureVector = std::array<std::int64_t, kNumFeatures>;
using ActionHistogram = std::array<std::int64_t, kNumPasses>;
using StateVector = std::vector<double>;

enum class StateMode : std::uint8_t { kFeatures, kHistogram, kBoth };

std::string_view state_mode_name(StateMode m);
// Throws std::invalid_argument for anything but features|histogram|both.
StateMode parse_state_mode(std::string_view name);

FeatureVector extract_features(const Program& p);

ActionHistogram histogram_state(std::span<const PassId> actions);

// Features map through log2(1 + x), histogram counts through x / horizon;
// the last entry is steps_left / horizon. Slots of the unused representation
// are zero. Always kStateSize long.
StateVector normalize_state(const FeatureVector& f, const ActionHistogram& h,
                            int steps_left, int horizon, StateMode mode);

}  // namespace phaseforge

#endif  // PHASEFORGE_FEATURES_HPP_
