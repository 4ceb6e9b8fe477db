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

// Static cycle estimate standing in for an HLS schedule profile.
//
//   cycles = sum over blocks b of 10^min(depth(b), 3) * (critpath(b) + 1)
//
// critpath(b) is the longest latency chain through the block's non-terminator
// instructions; values defined outside the block or by phis are ready at
// time zero. The +1 is the terminator.

#ifndef PHASEFORGE_COST_MODEL_HPP_
#define PHASEFORGE_COST_MODEL_HPP_

#include <cstdint>

#include "phaseforge/cfg.hpp"
#include "phaseforge/ir.hpp"

namespace phaseforge {

using CycleCount = std::uint64_t;

std::uint64_t latency(Opcode op);
std::uint64_t critical_path(const BasicBlock& block);
std::uint64_t block_frequency(std::size_t loop_depth);

CycleCount estimate_cycles(const Program& p);
CycleCount estimate_cycles(const Function& fn, const CfgInfo& cfg);

}  // namespace phaseforge

#endif  // PHASEFORGE_COST_MODEL_HPP_
