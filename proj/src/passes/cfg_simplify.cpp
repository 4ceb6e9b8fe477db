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

// Control-flow cleanups: folding constant branches and simplifying the CFG.

#include <algorithm>
#include <set>

#include "passes/pass_util.hpp"
#include "phaseforge/cfg.hpp"
#include "phaseforge/passes.hpp"

namespace phaseforge::passes {

using detail::replace_all_uses;
namespace {

void drop_incoming(BasicBlock& b, const std::string& pred) {
  for (Instruction& phi : b.phis) {
    for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
      if (phi.incoming_label(k) == pred) {
        phi.operands.erase(phi.operands.begin() + static_cast<long>(2 * k),
                           phi.operands.begin() + static_cast<long>(2 * k + 2));
        break;
      }
    }
  }
}

bool remove_unreachable(Function& fn) {
  CfgInfo cfg(fn);
  std::set<std::string> dead;
  for (std::size_t b = 0; b < fn.blocks.size(); ++b) {
    if (!cfg.reachable(b)) dead.insert(fn.blocks[b].label);
  }
  if (dead.empty()) return false;
  for (BasicBlock& b : fn.blocks) {
    if (dead.count(b.label)) continue;
    for (const std::string& d : dead) drop_incoming(b, d);
  }
  std::erase_if(fn.blocks,
                [&](const BasicBlock& b) { return dead.count(b.label) > 0; });
  return true;
}

// Folds B into P when P ends in `jmp B` and B has no other predecessor.
bool merge_into_predecessor(Function& fn) {
  CfgInfo cfg(fn);
  for (std::size_t b = 1; b < fn.blocks.size(); ++b) {
    if (cfg.preds(b).size() != 1) continue;
    const std::size_t p = cfg.preds(b).front();
    if (p == b || fn.blocks[p].terminator.op != Opcode::kJmp) continue;

    BasicBlock merged = fn.blocks[b];
    const std::string old_label = merged.label;
    const std::string new_label = fn.blocks[p].label;
    for (const Instruction& phi : merged.phis) {
      replace_all_uses(fn, *phi.result, phi.incoming_value(0));
    }
    // Re-read the block since uses inside it may have been rewritten.
    merged = fn.blocks[b];
    BasicBlock& pred = fn.blocks[p];
    pred.body.insert(pred.body.end(), merged.body.begin(), merged.body.end());
    pred.terminator = merged.terminator;
    for (const std::string& s : merged.successors()) {
      if (BasicBlock* succ = fn.find_block(s)) {
        for (Instruction& phi : succ->phis) {
          for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
            if (phi.incoming_label(k) == old_label) {
              phi.operands[2 * k].name = new_label;
            }
          }
        }
      }
    }
    fn.blocks.erase(fn.blocks.begin() + static_cast<long>(b));
    return true;
  }
  return false;
}

// Bypasses a block that is nothing but `jmp T`.
bool remove_forwarding_block(Function& fn) {
  CfgInfo cfg(fn);
  for (std::size_t f = 1; f < fn.blocks.size(); ++f) {
    const BasicBlock& fwd = fn.blocks[f];
    if (!fwd.phis.empty() || !fwd.body.empty() ||
        fwd.terminator.op != Opcode::kJmp || cfg.preds(f).empty()) {
      continue;
    }
    const std::string target = fwd.terminator.operands[0].name;
    auto t = fn.block_index(target);
    if (!t || *t == f) continue;
    const BasicBlock& tgt = fn.blocks[*t];
    bool conflict = false;
    if (!tgt.phis.empty()) {
      for (std::size_t p : cfg.preds(f)) {
        const auto& tp = cfg.preds(*t);
        if (std::find(tp.begin(), tp.end(), p) != tp.end()) conflict = true;
      }
    }
    if (conflict) continue;

    const std::string fwd_label = fwd.label;
    std::vector<std::string> preds;
    for (std::size_t p : cfg.preds(f)) preds.push_back(fn.blocks[p].label);
    BasicBlock& tb = fn.blocks[*t];
    for (Instruction& phi : tb.phis) {
      std::vector<Value> ops;
      for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
        if (phi.incoming_label(k) == fwd_label) {
          for (const std::string& pl : preds) {
            ops.push_back(Value::label(pl));
            ops.push_back(phi.incoming_value(k));
          }
        } else {
          ops.push_back(phi.operands[2 * k]);
          ops.push_back(phi.incoming_value(k));
        }
      }
      phi.operands = std::move(ops);
    }
    for (const std::string& pl : preds) {
      for (Value& v : fn.find_block(pl)->terminator.operands) {
        if (v.is_label() && v.name == fwd_label) v.name = target;
      }
    }
    fn.blocks.erase(fn.blocks.begin() + static_cast<long>(f));
    return true;
  }
  return false;
}

}  // namespace

bool branchfold(Function& fn) {
  bool changed = false;
  for (BasicBlock& b : fn.blocks) {
    Instruction& term = b.terminator;
    if (term.op != Opcode::kBr || !term.operands[0].is_const()) continue;
    const bool taken_then = term.operands[0].imm != 0;
    const std::string taken = term.operands[taken_then ? 1 : 2].name;
    const std::string dropped = term.operands[taken_then ? 2 : 1].name;
    term = make_jmp(taken);
    if (dropped != taken) {
      if (BasicBlock* d = fn.find_block(dropped)) drop_incoming(*d, b.label);
    }
    changed = true;
  }
  return changed;
}

bool simplifycfg(Function& fn) {
  bool changed = false;
  while (remove_unreachable(fn) || merge_into_predecessor(fn) ||
         remove_forwarding_block(fn)) {
    changed = true;
  }
  return changed;
}

}  // namespace phaseforge::passes
