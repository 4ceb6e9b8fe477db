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

#include "phaseforge/verifier.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "phaseforge/cfg.hpp"
#include "phaseforge/ir_text.hpp"

namespace phaseforge {
namespace {

// Definition site: block index and position (-1 for params, phis use 0..,
// body continues after phis).
struct DefSite {
  std::size_t block = 0;
  long position = -1;
  bool is_param = false;
};

void check_shape(const Instruction& inst, const std::string& where,
                 std::vector<std::string>& out) {
  const std::string name(opcode_name(inst.op));
  if (has_result(inst.op) != inst.result.has_value()) {
    out.push_back(where + ": " + name +
                  (inst.result ? " must not define a result"
                               : " must define a result"));
  }
  if (inst.op == Opcode::kPhi) {
    if (inst.operands.empty() || inst.operands.size() % 2 != 0) {
      out.push_back(where + ": malformed phi operand list");
      return;
    }
    for (std::size_t i = 0; i < inst.num_incoming(); ++i) {
      if (!inst.operands[2 * i].is_label() ||
          inst.incoming_value(i).is_label()) {
        out.push_back(where + ": phi incoming must be [label: value]");
      }
    }
    return;
  }
  auto arity = operand_arity(inst.op);
  if (inst.operands.size() != *arity) {
    out.push_back(where + ": " + name + " expects " + std::to_string(*arity) +
                  " operands, got " + std::to_string(inst.operands.size()));
    return;
  }
  for (std::size_t k = 0; k < inst.operands.size(); ++k) {
    bool want_label = (inst.op == Opcode::kBr && k > 0) || inst.op == Opcode::kJmp;
    if (inst.operands[k].is_label() != want_label) {
      out.push_back(where + ": operand " + std::to_string(k) + " of " + name +
                    (want_label ? " must be a label" : " must not be a label"));
    }
  }
  if (inst.op == Opcode::kAlloca && inst.alloca_size <= 0) {
    out.push_back(where + ": alloca size must be positive");
  }
}

}  // namespace

std::vector<std::string> validate(const Program& p) {
  std::vector<std::string> out;
  if (p.functions.size() != 1) {
    out.push_back("program must contain exactly one function");
    if (p.functions.empty()) return out;
  }
  const Function& fn = p.main();
  if (fn.name != "main") out.push_back("function must be named @main");
  if (fn.blocks.empty()) {
    out.push_back("function has no blocks");
    return out;
  }

  std::set<std::string> labels;
  for (const BasicBlock& b : fn.blocks) {
    if (!labels.insert(b.label).second) {
      out.push_back("duplicate block label " + b.label);
    }
  }

  // Per-instruction shape, placement and branch targets.
  for (const BasicBlock& b : fn.blocks) {
    for (const Instruction& i : b.phis) {
      if (i.op != Opcode::kPhi) {
        out.push_back("block " + b.label + ": non-phi in phi section");
      }
      check_shape(i, "block " + b.label, out);
    }
    for (const Instruction& i : b.body) {
      if (i.op == Opcode::kPhi) {
        out.push_back("block " + b.label + ": phi not at block head");
      } else if (is_terminator(i.op)) {
        out.push_back("block " + b.label + ": terminator before end of block");
      }
      check_shape(i, "block " + b.label, out);
    }
    if (!is_terminator(b.terminator.op)) {
      out.push_back("block " + b.label + ": missing terminator");
    }
    check_shape(b.terminator, "block " + b.label, out);
    for (const Value& v : b.terminator.operands) {
      if (v.is_label() && !labels.count(v.name)) {
        out.push_back("block " + b.label + ": branch to unknown block " +
                      v.name);
      }
    }
  }
  if (!out.empty()) return out;  // later checks assume well-shaped blocks

  // Single assignment.
  std::map<std::string, DefSite> defs;
  for (const std::string& param : fn.params) {
    if (!defs.emplace(param, DefSite{0, -1, true}).second) {
      out.push_back("duplicate definition %" + param);
    }
  }
  for (std::size_t bi = 0; bi < fn.blocks.size(); ++bi) {
    long pos = 0;
    for_each_instruction(fn.blocks[bi], [&](const Instruction& i) {
      if (i.result && !defs.emplace(*i.result, DefSite{bi, pos, false}).second) {
        out.push_back("duplicate definition %" + *i.result);
      }
      ++pos;
    });
  }

  CfgInfo cfg(fn);

  // Phi incoming sets must match the predecessor set exactly.
  for (std::size_t bi = 0; bi < fn.blocks.size(); ++bi) {
    const BasicBlock& b = fn.blocks[bi];
    std::set<std::string> pred_labels;
    for (std::size_t pi : cfg.preds(bi)) pred_labels.insert(fn.blocks[pi].label);
    for (const Instruction& phi : b.phis) {
      std::set<std::string> seen;
      for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
        const std::string& l = phi.incoming_label(k);
        if (!seen.insert(l).second) {
          out.push_back("phi %" + phi.result.value_or("?") +
                        " has duplicate incoming for " + l);
        } else if (!pred_labels.count(l)) {
          out.push_back("phi %" + phi.result.value_or("?") +
                        " has incoming from non-predecessor " + l);
        }
      }
      for (const std::string& l : pred_labels) {
        if (!seen.count(l)) {
          out.push_back("phi %" + phi.result.value_or("?") +
                        " missing incoming for predecessor " + l);
        }
      }
    }
  }

  // Every use names a definition that dominates it.
  auto check_use = [&](const Value& v, std::size_t use_block, long use_pos,
                       const std::string& user) {
    if (!v.is_reg()) return;
    auto it = defs.find(v.name);
    if (it == defs.end()) {
      out.push_back(user + " uses undefined register %" + v.name);
      return;
    }
    if (!cfg.reachable(use_block)) return;
    const DefSite& d = it->second;
    if (d.is_param) return;
    bool ok = d.block == use_block ? d.position < use_pos
                                   : cfg.dominates(d.block, use_block);
    if (!ok) {
      out.push_back("definition of %" + v.name + " does not dominate its use in " +
                    user);
    }
  };
  for (std::size_t bi = 0; bi < fn.blocks.size(); ++bi) {
    const BasicBlock& b = fn.blocks[bi];
    long pos = 0;
    for (const Instruction& phi : b.phis) {
      for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
        auto pred = fn.block_index(phi.incoming_label(k));
        if (!pred) continue;
        // The value flows along the edge, so it must be available at the end
        // of the predecessor.
        check_use(phi.incoming_value(k), *pred,
                  static_cast<long>(fn.blocks[*pred].size()),
                  "phi %" + phi.result.value_or("?"));
      }
      ++pos;
    }
    for (const Instruction& i : b.body) {
      i.for_each_value_operand([&](const Value& v) {
        check_use(v, bi, pos, "'" + format_instruction(i) + "'");
      });
      ++pos;
    }
    b.terminator.for_each_value_operand([&](const Value& v) {
      check_use(v, bi, pos, "'" + format_instruction(b.terminator) + "'");
    });
  }
  return out;
}

}  // namespace phaseforge
