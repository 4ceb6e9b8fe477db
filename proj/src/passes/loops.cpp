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

// Loop transformations: invariant hoisting and 2x unrolling of self-loops.

#include <algorithm>
#include <map>
#include <set>

#include "passes/pass_util.hpp"
#include "phaseforge/cfg.hpp"
#include "phaseforge/passes.hpp"

namespace phaseforge::passes {

using detail::replace_all_uses;
namespace {

void retarget(Instruction& term, const std::string& from, const std::string& to) {
  for (Value& v : term.operands) {
    if (v.is_label() && v.name == from) v.name = to;
  }
}

void relabel_incoming(BasicBlock& b, const std::string& from,
                      const std::string& to) {
  for (Instruction& phi : b.phis) {
    for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
      if (phi.operands[2 * k].name == from) phi.operands[2 * k].name = to;
    }
  }
}

// Returns the index of a block that can receive hoisted code for `loop`,
// creating one between the single outside predecessor and the header when
// needed. nullopt when the loop has no unique outside entry.
std::optional<std::size_t> get_or_make_preheader(Function& fn,
                                                 const CfgInfo& cfg,
                                                 const NaturalLoop& loop) {
  std::vector<std::size_t> outside;
  for (std::size_t p : cfg.preds(loop.header)) {
    if (!loop.contains(p)) outside.push_back(p);
  }
  if (outside.size() != 1 || loop.header == 0) return std::nullopt;
  const std::size_t pred = outside.front();
  if (cfg.succs(pred).size() == 1) return pred;

  const std::string header = fn.blocks[loop.header].label;
  const std::string pred_label = fn.blocks[pred].label;
  BasicBlock ph;
  ph.label = detail::NameFactory(fn).fresh_label(header + ".ph");
  ph.terminator = make_jmp(header);
  retarget(fn.blocks[pred].terminator, header, ph.label);
  relabel_incoming(fn.blocks[loop.header], pred_label, ph.label);
  fn.blocks.insert(fn.blocks.begin() + static_cast<long>(loop.header),
                   std::move(ph));
  return loop.header;
}

bool hoist_from(Function& fn, const CfgInfo& cfg, const NaturalLoop& loop) {
  std::map<std::string, std::size_t> def_block;
  for (std::size_t b = 0; b < fn.blocks.size(); ++b) {
    for_each_instruction(fn.blocks[b], [&](const Instruction& i) {
      if (i.result) def_block[*i.result] = b;
    });
  }
  std::set<std::string> hoisted;
  auto invariant = [&](const Value& v) {
    if (!v.is_reg()) return true;
    if (hoisted.count(v.name)) return true;
    auto it = def_block.find(v.name);
    return it == def_block.end() || !loop.contains(it->second);  // params
  };

  // Collect in dominance-compatible order: loop blocks in RPO, then body
  // order, so operands hoisted earlier precede their users.
  std::vector<Instruction> moved;
  for (std::size_t b : cfg.rpo()) {
    if (!loop.contains(b)) continue;
    for (const Instruction& i : fn.blocks[b].body) {
      if (!detail::is_speculatable(i)) continue;
      bool ok = true;
      i.for_each_value_operand([&](const Value& v) { ok = ok && invariant(v); });
      if (ok) {
        hoisted.insert(*i.result);
        moved.push_back(i);
      }
    }
  }
  if (moved.empty()) return false;

  auto ph = get_or_make_preheader(fn, cfg, loop);
  if (!ph) return false;
  for (BasicBlock& b : fn.blocks) {
    if (b.label == fn.blocks[*ph].label) continue;
    std::erase_if(b.body, [&](const Instruction& i) {
      return i.result && hoisted.count(*i.result);
    });
  }
  auto& body = fn.blocks[*ph].body;
  body.insert(body.end(), moved.begin(), moved.end());
  return true;
}

}  // namespace

bool licm(Function& fn) {
  bool changed = false;
  // Inner loops first; re-analyse after every change since a new preheader
  // shifts block indices.
  for (int guard = 0; guard < 64; ++guard) {
    CfgInfo cfg(fn);
    std::vector<NaturalLoop> loops = cfg.loops();
    std::stable_sort(loops.begin(), loops.end(), [](const auto& a, const auto& b) {
      return a.blocks.size() < b.blocks.size();
    });
    bool round = false;
    for (const NaturalLoop& loop : loops) {
      if (!cfg.reachable(loop.header)) continue;
      if (hoist_from(fn, cfg, loop)) {
        round = true;
        break;
      }
    }
    if (!round) break;
    changed = true;
  }
  return changed;
}

bool unroll2(Function& fn) {
  constexpr std::size_t kMaxBody = 20;
  CfgInfo cfg(fn);
  for (std::size_t li = 1; li < fn.blocks.size(); ++li) {
    const BasicBlock& loop = fn.blocks[li];
    const Instruction& term = loop.terminator;
    if (term.op != Opcode::kBr || !cfg.reachable(li)) continue;
    const bool stay_then = term.operands[1].name == loop.label;
    const bool stay_else = term.operands[2].name == loop.label;
    if (stay_then == stay_else) continue;  // not a self-loop, or br c, L, L
    const std::string exit = term.operands[stay_then ? 2 : 1].name;
    auto exit_idx = fn.block_index(exit);
    if (!exit_idx || cfg.preds(*exit_idx).size() != 1) continue;
    if (loop.body.size() > kMaxBody) continue;

    detail::NameFactory names(fn);
    const std::string label = loop.label;
    const std::string copy_label = names.fresh_label(label + ".u");

    // Value of each loop-defined register at the end of the second copy.
    std::map<std::string, Value> in_copy;
    std::map<std::string, Value> latch_value;
    for (const Instruction& phi : loop.phis) {
      for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
        if (phi.incoming_label(k) == label) {
          latch_value[*phi.result] = phi.incoming_value(k);
        }
      }
    }
    // In the copy, a phi reads what the first copy fed back along the latch.
    for (const auto& [reg, v] : latch_value) in_copy[reg] = v;
    auto map_value = [&](const Value& v) {
      if (!v.is_reg()) return v;
      auto it = in_copy.find(v.name);
      return it == in_copy.end() ? v : it->second;
    };

    BasicBlock copy;
    copy.label = copy_label;
    for (const Instruction& i : loop.body) {
      Instruction c = i;
      c.for_each_value_operand([&](Value& v) { v = map_value(v); });
      if (c.result) {
        std::string fresh = names.fresh_reg(*i.result);
        in_copy[*i.result] = Value::reg(fresh);
        c.result = fresh;
      }
      copy.body.push_back(std::move(c));
    }
    copy.terminator = term;
    copy.terminator.operands[0] = map_value(term.operands[0]);

    // Registers the loop defines, with their values at the exit of each copy.
    std::vector<std::string> loop_defs;
    for_each_instruction(loop, [&](const Instruction& i) {
      if (i.result) loop_defs.push_back(*i.result);
    });
    auto end_of_copy = [&](const Value& v) {
      if (!v.is_reg()) return v;
      // Phis of the loop never appear at the end of the copy; what the copy
      // holds for them is the first copy's latch value.
      auto it = in_copy.find(v.name);
      return it == in_copy.end() ? v : it->second;
    };

    BasicBlock first = loop;
    retarget(first.terminator, label, copy_label);
    for (Instruction& phi : first.phis) {
      for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
        if (phi.incoming_label(k) == label) {
          phi.operands[2 * k].name = copy_label;
          phi.incoming_value(k) = end_of_copy(phi.incoming_value(k));
        }
      }
    }

    Function out = fn;
    out.blocks[li] = std::move(first);
    BasicBlock& exit_block = out.blocks[*exit_idx];
    for (Instruction& phi : exit_block.phis) {
      const Value v = phi.incoming_value(0);
      phi.operands.push_back(Value::label(copy_label));
      phi.operands.push_back(end_of_copy(v));
    }

    // Uses outside the loop now need a merge of both copies at the exit.
    std::vector<Instruction> merges;
    std::map<std::string, std::string> renamed;
    for (const std::string& reg : loop_defs) {
      bool used_outside = false;
      for (std::size_t b = 0; b < out.blocks.size(); ++b) {
        if (b == li) continue;
        const BasicBlock& blk = out.blocks[b];
        auto check = [&](const Instruction& i) {
          i.for_each_value_operand([&](const Value& v) {
            if (v.is_reg(reg)) used_outside = true;
          });
        };
        for (const Instruction& p : blk.phis) {
          if (b == *exit_idx) continue;  // already carries both incomings
          check(p);
        }
        for (const Instruction& i : blk.body) check(i);
        check(blk.terminator);
      }
      if (!used_outside) continue;
      std::string merged = names.fresh_reg(reg + ".x");
      Instruction phi;
      phi.result = merged;
      phi.op = Opcode::kPhi;
      phi.operands = {Value::label(label), Value::reg(reg),
                      Value::label(copy_label), end_of_copy(Value::reg(reg))};
      merges.push_back(std::move(phi));
      renamed[reg] = merged;
    }
    for (std::size_t b = 0; b < out.blocks.size(); ++b) {
      if (b == li) continue;
      BasicBlock& blk = out.blocks[b];
      auto rewrite = [&](Instruction& i) {
        i.for_each_value_operand([&](Value& v) {
          if (v.is_reg()) {
            auto it = renamed.find(v.name);
            if (it != renamed.end()) v = Value::reg(it->second);
          }
        });
      };
      for (Instruction& p : blk.phis) {
        if (b != *exit_idx) rewrite(p);
      }
      for (Instruction& i : blk.body) rewrite(i);
      rewrite(blk.terminator);
    }
    exit_block.phis.insert(exit_block.phis.end(), merges.begin(), merges.end());
    out.blocks.insert(out.blocks.begin() + static_cast<long>(li) + 1,
                      std::move(copy));
    fn = std::move(out);
    return true;
  }
  return false;
}

}  // namespace phaseforge::passes
