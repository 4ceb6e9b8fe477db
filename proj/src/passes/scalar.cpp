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

// Value-level cleanups: constant propagation and folding, dead code
// elimination, local CSE, copy propagation and peephole combining.

#include <map>
#include <set>

#include "passes/pass_util.hpp"
#include "phaseforge/interpreter.hpp"
#include "phaseforge/passes.hpp"

namespace phaseforge::passes {

using detail::replace_all_uses;
namespace {

// Runs `step` until it reports no change.
template <typename Step>
bool to_fixpoint(Step&& step) {
  bool any = false;
  while (step()) any = true;
  return any;
}

// Replaces every use of `reg` with `with` and deletes its definition from
// wherever it lives.
void forward_and_erase(Function& fn, std::string reg, Value with) {
  replace_all_uses(fn, reg, with);
  for (BasicBlock& b : fn.blocks) {
    std::erase_if(b.phis, [&](const Instruction& i) { return i.result == reg; });
    std::erase_if(b.body, [&](const Instruction& i) { return i.result == reg; });
  }
}

// The single value a phi merges, ignoring self references, if there is one.
std::optional<Value> unique_incoming(const Instruction& phi) {
  std::optional<Value> only;
  for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
    const Value& v = phi.incoming_value(k);
    if (v.is_reg(*phi.result)) continue;
    if (only && *only != v) return std::nullopt;
    only = v;
  }
  return only;
}

}  // namespace

bool constprop(Function& fn) {
  return to_fixpoint([&] {
    for (BasicBlock& b : fn.blocks) {
      for (const Instruction& phi : b.phis) {
        auto v = unique_incoming(phi);
        if (v && v->is_const()) {
          forward_and_erase(fn, *phi.result, *v);
          return true;
        }
      }
      for (const Instruction& i : b.body) {
        if (i.op == Opcode::kSelect && i.operands[0].is_const()) {
          Value chosen = i.operands[0].imm != 0 ? i.operands[1] : i.operands[2];
          forward_and_erase(fn, *i.result, chosen);
          return true;
        }
      }
    }
    return false;
  });
}

bool constfold(Function& fn) {
  return to_fixpoint([&] {
    for (BasicBlock& b : fn.blocks) {
      for (const Instruction& i : b.body) {
        bool all_const = true;
        i.for_each_value_operand([&](const Value& v) {
          all_const = all_const && v.is_const();
        });
        if (!all_const) continue;
        std::optional<std::int64_t> folded;
        if (is_binary(i.op)) {
          folded = eval_binary(i.op, i.pred, i.operands[0].imm,
                               i.operands[1].imm);
        } else if (i.op == Opcode::kSelect) {
          folded = i.operands[0].imm != 0 ? i.operands[1].imm
                                          : i.operands[2].imm;
        }
        if (folded) {
          forward_and_erase(fn, *i.result, Value::constant(*folded));
          return true;
        }
      }
    }
    return false;
  });
}

bool dce(Function& fn) {
  return to_fixpoint([&] {
    auto defs = detail::def_map(fn);
    auto uses = detail::use_counts(fn);
    std::set<std::string> dead;
    for_each_instruction(fn, [&](const Instruction& i) {
      if (i.result && uses[*i.result] == 0 &&
          detail::removable_if_unused(i, defs)) {
        dead.insert(*i.result);
      }
    });
    if (dead.empty()) return false;
    for (BasicBlock& b : fn.blocks) {
      std::erase_if(b.phis,
                    [&](const Instruction& i) { return dead.count(*i.result); });
    }
    detail::erase_defs(fn, dead);
    return true;
  });
}

bool cse(Function& fn) {
  return to_fixpoint([&] {
    for (BasicBlock& b : fn.blocks) {
      std::map<detail::ExprKey, std::string> available;
      for (const Instruction& i : b.body) {
        if (!detail::is_cse_candidate(i)) continue;
        auto [it, inserted] = available.emplace(detail::expr_key(i), *i.result);
        if (!inserted) {
          forward_and_erase(fn, *i.result, Value::reg(it->second));
          return true;
        }
      }
    }
    return false;
  });
}

bool copyprop(Function& fn) {
  return to_fixpoint([&] {
    for (BasicBlock& b : fn.blocks) {
      for (const Instruction& phi : b.phis) {
        if (phi.num_incoming() == 1 &&
            !phi.incoming_value(0).is_reg(*phi.result)) {
          forward_and_erase(fn, *phi.result, phi.incoming_value(0));
          return true;
        }
      }
      for (const Instruction& i : b.body) {
        if (i.op == Opcode::kSelect && i.operands[1] == i.operands[2]) {
          forward_and_erase(fn, *i.result, i.operands[1]);
          return true;
        }
      }
    }
    return false;
  });
}

bool instcombine(Function& fn) {
  auto is_zero = [](const Value& v) { return v.is_const() && v.imm == 0; };
  auto is_one = [](const Value& v) { return v.is_const() && v.imm == 1; };
  return to_fixpoint([&] {
    for (BasicBlock& b : fn.blocks) {
      for (Instruction& i : b.body) {
        const std::string reg = i.result.value_or("");
        if (!is_binary(i.op)) continue;
        const Value lhs = i.operands[0];
        const Value rhs = i.operands[1];
        std::optional<Value> replacement;
        switch (i.op) {
          case Opcode::kAdd:
            if (is_zero(rhs)) replacement = lhs;
            else if (is_zero(lhs)) replacement = rhs;
            break;
          case Opcode::kSub:
            if (is_zero(rhs)) replacement = lhs;
            else if (lhs.is_reg() && lhs == rhs) replacement = Value::constant(0);
            break;
          case Opcode::kXor:
            if (lhs.is_reg() && lhs == rhs) replacement = Value::constant(0);
            break;
          case Opcode::kMul: {
            if (is_one(rhs)) replacement = lhs;
            else if (is_one(lhs)) replacement = rhs;
            else if (is_zero(rhs) || is_zero(lhs)) replacement = Value::constant(0);
            if (replacement) break;
            // x * 2^k -> x << k, for register x only; constants are folded.
            int k = 0;
            if (lhs.is_reg() && rhs.is_const() &&
                detail::is_power_of_two(rhs.imm, &k)) {
              i.op = Opcode::kShl;
              i.operands[1] = Value::constant(k);
              return true;
            }
            if (rhs.is_reg() && lhs.is_const() &&
                detail::is_power_of_two(lhs.imm, &k)) {
              i.op = Opcode::kShl;
              i.operands = {rhs, Value::constant(k)};
              return true;
            }
            break;
          }
          case Opcode::kICmp:
            if (lhs.is_reg() && lhs == rhs) {
              const bool reflexive = i.pred == Predicate::kEq ||
                                     i.pred == Predicate::kSle ||
                                     i.pred == Predicate::kSge;
              replacement = Value::constant(reflexive ? 1 : 0);
            }
            break;
          default:
            break;
        }
        if (replacement) {
          forward_and_erase(fn, reg, *replacement);
          return true;
        }
      }
    }
    return false;
  });
}

}  // namespace phaseforge::passes
