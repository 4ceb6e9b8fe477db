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

// The action space: twelve transformations over the toy IR.

#ifndef PHASEFORGE_PASSES_HPP_
#define PHASEFORGE_PASSES_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phaseforge/ir.hpp"

namespace phaseforge {

// Stable numbering; this order indexes actions, histograms and CSV output.
enum class PassId : std::uint8_t {
  kConstProp = 0,
  kConstFold = 1,
  kDce = 2,
  kCse = 3,
  kMem2Reg = 4,
  kLicm = 5,
  kUnroll2 = 6,
  kInstCombine = 7,
  kBranchFold = 8,
  kSimplifyCfg = 9,
  kCopyProp = 10,
  kReassoc = 11,
};

inline constexpr std::size_t kNumPasses = 12;

using PassSequence = std::vector<PassId>;

constexpr std::size_t index_of(PassId id) { return static_cast<std::size_t>(id); }
std::optional<PassId> pass_from_index(long index);
std::string_view pass_name(PassId id);
std::optional<PassId> pass_from_name(std::string_view name);
const std::array<PassId, kNumPasses>& all_passes();

// Accepts ids or names separated by commas or dashes: "4,0,1", "mem2reg-dce".
// Throws std::invalid_argument on an unknown element.
PassSequence parse_sequence(std::string_view text);
// Dash-separated ids, e.g. "4-0-1"; empty sequences format as "".
std::string format_sequence(std::span<const PassId> seq);

// Every pass returns a structurally identical program when it finds nothing
// to do. Input must be valid.
Program apply_pass(PassId id, const Program& p);
Program apply_sequence(std::span<const PassId> seq, const Program& p);

// Individual passes, in place. Each returns whether anything changed.
namespace passes {
bool constprop(Function& fn);
bool constfold(Function& fn);
bool dce(Function& fn);
bool cse(Function& fn);
bool mem2reg(Function& fn);
bool licm(Function& fn);
bool unroll2(Function& fn);
bool instcombine(Function& fn);
bool branchfold(Function& fn);
bool simplifycfg(Function& fn);
bool copyprop(Function& fn);
bool reassoc(Function& fn);
}  // namespace passes

}  // namespace phaseforge

#endif  // PHASEFORGE_PASSES_HPP_
