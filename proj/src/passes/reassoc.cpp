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

// Reassociation of same-opcode expression trees so that constant leaves end
// up in one subtree that constant folding can collapse.
//
//   %a = add %x, 3          %a = add %x, %y
//   %b = add %a, %y   ==>   %b = add 3, 5
//   %c = add %b, 5          %c = add %a, %b

#include <algorithm>
#include <set>

#include "passes/pass_util.hpp"
#include "phaseforge/passes.hpp"

namespace phaseforge::passes {
namespace {

bool reassociable(Opcode op) {
  return op == Opcode::kAdd || op == Opcode::kMul || op == Opcode::kAnd ||
         op == Opcode::kOr || op == Opcode::kXor;
}

struct Tree {
  std::vector<Value> leaves;           // left-to-right
  std::vector<std::string> interior;   // interior results, body order
};

// Rebuilds one block; returns true if its body changed.
bool reassociate_block(BasicBlock& block,
                       const std::unordered_map<std::string, std::size_t>& uses) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t k = 0; k < block.body.size(); ++k) {
    if (block.body[k].result) pos[*block.body[k].result] = k;
  }
  // An instruction is interior when its single use is a same-opcode
  // instruction later in this block.
  std::unordered_map<std::string, std::string> user_of;
  for (const Instruction& i : block.body) {
    if (!reassociable(i.op)) continue;
    for (const Value& v : i.operands) {
      if (!v.is_reg()) continue;
      auto it = pos.find(v.name);
      if (it == pos.end()) continue;
      const Instruction& def = block.body[it->second];
      auto u = uses.find(v.name);
      if (def.op == i.op && u != uses.end() && u->second == 1) {
        user_of[v.name] = *i.result;
      }
    }
  }

  for (std::size_t r = 0; r < block.body.size(); ++r) {
    const Instruction& root = block.body[r];
    if (!reassociable(root.op) || user_of.count(*root.result)) continue;

    Tree tree;
    std::set<std::string> interior;
    auto collect = [&](auto&& self, const Value& v) -> void {
      if (v.is_reg() && user_of.count(v.name)) {
        interior.insert(v.name);
        const Instruction& d = block.body[pos.at(v.name)];
        self(self, d.operands[0]);
        self(self, d.operands[1]);
      } else {
        tree.leaves.push_back(v);
      }
    };
    collect(collect, root.operands[0]);
    collect(collect, root.operands[1]);
    if (interior.empty()) continue;
    for (const Instruction& i : block.body) {
      if (i.result && interior.count(*i.result)) tree.interior.push_back(*i.result);
    }

    std::vector<Value> vars;
    std::vector<Value> consts;
    for (const Value& v : tree.leaves) (v.is_const() ? consts : vars).push_back(v);

    std::vector<Instruction> rebuilt;
    std::size_t next_name = 0;
    auto emit = [&](const Value& a, const Value& b, bool is_root) {
      std::string name = is_root ? *root.result : tree.interior[next_name++];
      rebuilt.push_back(make_binary(name, root.op, a, b));
      return Value::reg(name);
    };
    auto chain = [&](const std::vector<Value>& items, bool ends_at_root) {
      Value acc = items.front();
      for (std::size_t k = 1; k < items.size(); ++k) {
        acc = emit(acc, items[k], ends_at_root && k + 1 == items.size());
      }
      return acc;
    };
    if (vars.empty() || consts.empty()) {
      chain(tree.leaves, true);
    } else {
      Value lhs = chain(vars, false);
      Value rhs = chain(consts, false);
      emit(lhs, rhs, true);
    }

    std::vector<Instruction> old;
    for (const Instruction& i : block.body) {
      if (i.result && (interior.count(*i.result) || *i.result == *root.result)) {
        old.push_back(i);
      }
    }
    if (old == rebuilt) continue;

    std::vector<Instruction> body;
    body.reserve(block.body.size());
    for (std::size_t k = 0; k < block.body.size(); ++k) {
      const Instruction& i = block.body[k];
      if (i.result && interior.count(*i.result)) continue;
      if (k == r) {
        body.insert(body.end(), rebuilt.begin(), rebuilt.end());
      } else {
        body.push_back(i);
      }
    }
    block.body = std::move(body);
    return true;
  }
  return false;
}

}  // namespace

bool reassoc(Function& fn) {
  bool changed = false;
  for (int guard = 0; guard < 256; ++guard) {
    auto uses = detail::use_counts(fn);
    bool round = false;
    for (BasicBlock& b : fn.blocks) {
      if (reassociate_block(b, uses)) {
        round = true;
        break;
      }
    }
    if (!round) break;
    changed = true;
  }
  return changed;
}

}  // namespace phaseforge::passes
