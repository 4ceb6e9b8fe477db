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

#include "phaseforge/cost_model.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace phaseforge {

std::uint64_t latency(Opcode op) {
  switch (op) {
    case Opcode::kMul:
      return 3;
    case Opcode::kDiv:
    case Opcode::kRem:
      return 8;
    case Opcode::kLoad:
      return 2;
    case Opcode::kPhi:
      return 0;
    default:
      return 1;
  }
}

std::uint64_t critical_path(const BasicBlock& block) {
  std::unordered_map<std::string, std::uint64_t> finish;
  std::uint64_t longest = 0;
  for (const Instruction& inst : block.body) {
    std::uint64_t ready = 0;
    inst.for_each_value_operand([&](const Value& v) {
      if (!v.is_reg()) return;
      auto it = finish.find(v.name);
      if (it != finish.end()) ready = std::max(ready, it->second);
    });
    const std::uint64_t done = ready + latency(inst.op);
    if (inst.result) finish[*inst.result] = done;
    longest = std::max(longest, done);
  }
  return longest;
}

std::uint64_t block_frequency(std::size_t loop_depth) {
  std::uint64_t f = 1;
  for (std::size_t d = 0; d < std::min<std::size_t>(loop_depth, 3); ++d) f *= 10;
  return f;
}

CycleCount estimate_cycles(const Function& fn, const CfgInfo& cfg) {
  CycleCount total = 0;
  for (std::size_t b = 0; b < fn.blocks.size(); ++b) {
    total += block_frequency(cfg.loop_depth(b)) *
             (critical_path(fn.blocks[b]) + 1);
  }
  return total;
}

CycleCount estimate_cycles(const Program& p) {
  return estimate_cycles(p.main(), CfgInfo(p.main()));
}

}  // namespace phaseforge
