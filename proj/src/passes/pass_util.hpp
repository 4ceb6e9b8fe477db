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

// Helpers shared by the pass implementations and feature extraction.

#ifndef PHASEFORGE_SRC_PASSES_PASS_UTIL_HPP_
#define PHASEFORGE_SRC_PASSES_PASS_UTIL_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "phaseforge/ir.hpp"

namespace phaseforge::detail {

// Register name -> defining instruction. Pointers are invalidated by any
// structural edit of the function.
std::unordered_map<std::string, const Instruction*> def_map(const Function& fn);

// Uses per register; a phi naming its own result is not counted.
std::unordered_map<std::string, std::size_t> use_counts(const Function& fn);

void replace_all_uses(Function& fn, const std::string& reg, const Value& with);

// True when removing the instruction cannot change observable behaviour
// provided its result is unused: no store or terminator, no division that may
// trap and no load that may be out of bounds.
bool removable_if_unused(
    const Instruction& inst,
    const std::unordered_map<std::string, const Instruction*>& defs);

// Pure, memory-free, non-trapping value computation.
bool is_speculatable(const Instruction& inst);

// Candidate for within-block value numbering: binary ops, select and gep.
bool is_cse_candidate(const Instruction& inst);
using ExprKey = std::tuple<Opcode, Predicate, std::vector<Value>>;
ExprKey expr_key(const Instruction& inst);

// Allocas whose result is only ever used as a load/store address.
std::set<std::string> non_escaping_allocas(const Function& fn);

// Dead-if-unused instructions that are unused: the work left for dce.
std::size_t count_dead(const Function& fn);
// Later duplicates of an earlier identical expression in the same block.
std::size_t count_cse_candidates(const Function& fn);

class NameFactory {
 public:
  explicit NameFactory(const Function& fn);
  // A register name not yet used in the function, derived from `base`.
  std::string fresh_reg(const std::string& base);
  std::string fresh_label(const std::string& base);

 private:
  std::string fresh(std::set<std::string>& used, const std::string& base);
  std::set<std::string> regs_;
  std::set<std::string> labels_;
};

// Removes instructions from block bodies (not phis or terminators) whose
// result is in `names`.
void erase_defs(Function& fn, const std::set<std::string>& names);

bool is_power_of_two(std::int64_t v, int* log2);

}  // namespace phaseforge::detail

#endif  // PHASEFORGE_SRC_PASSES_PASS_UTIL_HPP_
