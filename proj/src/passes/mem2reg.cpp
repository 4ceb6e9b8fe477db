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

// Block-local promotion of non-escaping alloca slots: store-to-load
// forwarding plus removal of stores nobody can observe. No phi insertion.

#include <map>
#include <set>

#include "passes/pass_util.hpp"
#include "phaseforge/passes.hpp"

namespace phaseforge::passes {

using detail::replace_all_uses;

bool mem2reg(Function& fn) {
  const std::set<std::string> slots = detail::non_escaping_allocas(fn);
  if (slots.empty()) return false;
  bool changed = false;

  // Forward known slot contents to loads within each block. A slot is known
  // after a store, or right after its alloca (fresh memory reads as zero).
  for (BasicBlock& b : fn.blocks) {
    std::map<std::string, Value> known;
    std::vector<std::pair<std::string, Value>> forwarded;
    std::vector<Instruction> kept;
    kept.reserve(b.body.size());
    for (Instruction& i : b.body) {
      if (i.op == Opcode::kAlloca && slots.count(*i.result)) {
        known[*i.result] = Value::constant(0);
      } else if (i.op == Opcode::kStore && i.operands[1].is_reg() &&
                 slots.count(i.operands[1].name)) {
        known[i.operands[1].name] = i.operands[0];
      } else if (i.op == Opcode::kLoad && i.operands[0].is_reg()) {
        auto it = known.find(i.operands[0].name);
        if (it != known.end()) {
          forwarded.emplace_back(*i.result, it->second);
          continue;
        }
      }
      kept.push_back(std::move(i));
    }
    b.body = std::move(kept);
    if (forwarded.empty()) continue;
    // A forwarded value may itself be a forwarded load; resolve in order.
    for (auto& [reg, value] : forwarded) {
      replace_all_uses(fn, reg, value);
      for (auto& [other, v] : forwarded) {
        if (v.is_reg(reg)) v = value;
      }
    }
    changed = true;
  }

  // Loads that remain, per slot.
  std::set<std::string> read;
  for_each_instruction(fn, [&](const Instruction& i) {
    if (i.op == Opcode::kLoad && i.operands[0].is_reg()) {
      read.insert(i.operands[0].name);
    }
  });

  for (BasicBlock& b : fn.blocks) {
    std::vector<bool> drop(b.body.size(), false);
    // Stores to slots that are never read again anywhere.
    for (std::size_t k = 0; k < b.body.size(); ++k) {
      const Instruction& i = b.body[k];
      if (i.op == Opcode::kStore && i.operands[1].is_reg() &&
          slots.count(i.operands[1].name) && !read.count(i.operands[1].name)) {
        drop[k] = true;
      }
    }
    // Stores overwritten later in the block with no load in between.
    std::map<std::string, std::size_t> pending;
    for (std::size_t k = 0; k < b.body.size(); ++k) {
      const Instruction& i = b.body[k];
      if (i.op == Opcode::kLoad && i.operands[0].is_reg()) {
        pending.erase(i.operands[0].name);
      } else if (i.op == Opcode::kStore && i.operands[1].is_reg() &&
                 slots.count(i.operands[1].name)) {
        auto it = pending.find(i.operands[1].name);
        if (it != pending.end()) drop[it->second] = true;
        pending[i.operands[1].name] = k;
      }
    }
    std::size_t k = 0;
    const std::size_t before = b.body.size();
    std::erase_if(b.body, [&](const Instruction&) { return drop[k++]; });
    changed = changed || b.body.size() != before;
  }
  return changed;
}

}  // namespace phaseforge::passes
