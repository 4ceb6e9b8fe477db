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

#include "passes/pass_util.hpp"

#include <algorithm>
#include <iterator>
#include <map>

namespace phaseforge::detail {

std::unordered_map<std::string, const Instruction*> def_map(const Function& fn) {
  std::unordered_map<std::string, const Instruction*> defs;
  for_each_instruction(fn, [&](const Instruction& i) {
    if (i.result) defs[*i.result] = &i;
  });
  return defs;
}

std::unordered_map<std::string, std::size_t> use_counts(const Function& fn) {
  std::unordered_map<std::string, std::size_t> uses;
  for_each_instruction(fn, [&](const Instruction& i) {
    i.for_each_value_operand([&](const Value& v) {
      if (v.is_reg() && !(i.result && *i.result == v.name)) ++uses[v.name];
    });
  });
  return uses;
}

void replace_all_uses(Function& fn, const std::string& reg, const Value& with) {
  for_each_instruction(fn, [&](Instruction& i) {
    i.for_each_value_operand([&](Value& v) {
      if (v.is_reg(reg)) v = with;
    });
  });
}

bool removable_if_unused(
    const Instruction& inst,
    const std::unordered_map<std::string, const Instruction*>& defs) {
  switch (inst.op) {
    case Opcode::kStore:
    case Opcode::kBr:
    case Opcode::kJmp:
    case Opcode::kRet:
      return false;
    case Opcode::kDiv:
    case Opcode::kRem:
      return inst.operands[1].is_const() && inst.operands[1].imm != 0;
    case Opcode::kLoad: {
      const Value& addr = inst.operands[0];
      if (!addr.is_reg()) return false;
      auto it = defs.find(addr.name);
      if (it == defs.end()) return false;
      const Instruction* d = it->second;
      if (d->op == Opcode::kAlloca) return true;
      if (d->op != Opcode::kGep || !d->operands[0].is_reg() ||
          !d->operands[1].is_const()) {
        return false;
      }
      auto base = defs.find(d->operands[0].name);
      return base != defs.end() && base->second->op == Opcode::kAlloca &&
             d->operands[1].imm >= 0 &&
             d->operands[1].imm < base->second->alloca_size;
    }
    default:
      return true;
  }
}

bool is_speculatable(const Instruction& inst) {
  switch (inst.op) {
    case Opcode::kDiv:
    case Opcode::kRem:
      return false;
    case Opcode::kSelect:
      return true;
    default:
      return is_binary(inst.op);
  }
}

bool is_cse_candidate(const Instruction& inst) {
  return is_binary(inst.op) || inst.op == Opcode::kSelect ||
         inst.op == Opcode::kGep;
}

ExprKey expr_key(const Instruction& inst) {
  return {inst.op, inst.op == Opcode::kICmp ? inst.pred : Predicate::kEq,
          inst.operands};
}

std::set<std::string> non_escaping_allocas(const Function& fn) {
  std::set<std::string> candidates;
  for_each_instruction(fn, [&](const Instruction& i) {
    if (i.op == Opcode::kAlloca) candidates.insert(*i.result);
  });
  std::set<std::string> escaped;
  for_each_instruction(fn, [&](const Instruction& i) {
    for (std::size_t k = 0; k < i.operands.size(); ++k) {
      const Value& v = i.operands[k];
      if (!v.is_reg() || !candidates.count(v.name)) continue;
      const bool address_use = (i.op == Opcode::kLoad && k == 0) ||
                               (i.op == Opcode::kStore && k == 1);
      if (!address_use) escaped.insert(v.name);
    }
  });
  std::set<std::string> out;
  std::set_difference(candidates.begin(), candidates.end(), escaped.begin(),
                      escaped.end(), std::inserter(out, out.end()));
  return out;
}

std::size_t count_dead(const Function& fn) {
  auto defs = def_map(fn);
  auto uses = use_counts(fn);
  std::size_t n = 0;
  for_each_instruction(fn, [&](const Instruction& i) {
    if (i.result && uses[*i.result] == 0 && removable_if_unused(i, defs)) ++n;
  });
  return n;
}

std::size_t count_cse_candidates(const Function& fn) {
  std::size_t n = 0;
  for (const BasicBlock& b : fn.blocks) {
    std::set<ExprKey> seen;
    for (const Instruction& i : b.body) {
      if (is_cse_candidate(i) && !seen.insert(expr_key(i)).second) ++n;
    }
  }
  return n;
}

NameFactory::NameFactory(const Function& fn) {
  regs_.insert(fn.params.begin(), fn.params.end());
  for (const BasicBlock& b : fn.blocks) {
    labels_.insert(b.label);
    for_each_instruction(b, [&](const Instruction& i) {
      if (i.result) regs_.insert(*i.result);
    });
  }
}

std::string NameFactory::fresh(std::set<std::string>& used,
                               const std::string& base) {
  if (used.insert(base).second) return base;
  for (int k = 1;; ++k) {
    std::string candidate = base + "." + std::to_string(k);
    if (used.insert(candidate).second) return candidate;
  }
}

std::string NameFactory::fresh_reg(const std::string& base) {
  return fresh(regs_, base);
}

std::string NameFactory::fresh_label(const std::string& base) {
  return fresh(labels_, base);
}

void erase_defs(Function& fn, const std::set<std::string>& names) {
  if (names.empty()) return;
  for (BasicBlock& b : fn.blocks) {
    std::erase_if(b.body, [&](const Instruction& i) {
      return i.result && names.count(*i.result);
    });
  }
}

bool is_power_of_two(std::int64_t v, int* log2) {
  if (v <= 0 || (v & (v - 1)) != 0) return false;
  int k = 0;
  while ((std::int64_t{1} << k) != v) ++k;
  *log2 = k;
  return true;
}

}  // namespace phaseforge::detail
