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

#include "phaseforge/ir.hpp"

#include <algorithm>

namespace phaseforge {
namespace {

constexpr std::array<std::string_view, kNumOpcodes> kOpcodeNames = {
    "add", "sub",   "mul",    "div", "rem",  "shl",   "shr",
    "and", "or",    "xor",    "icmp", "select", "phi", "load",
    "store", "alloca", "gep", "br",  "jmp",  "ret"};

constexpr std::array<std::string_view, 6> kPredicateNames = {
    "eq", "ne", "slt", "sle", "sgt", "sge"};

}  // namespace

std::string_view opcode_name(Opcode op) {
  return kOpcodeNames[static_cast<std::size_t>(op)];
}

std::optional<Opcode> opcode_from_name(std::string_view name) {
  auto it = std::find(kOpcodeNames.begin(), kOpcodeNames.end(), name);
  if (it == kOpcodeNames.end()) return std::nullopt;
  return static_cast<Opcode>(it - kOpcodeNames.begin());
}

std::string_view predicate_name(Predicate pred) {
  return kPredicateNames[static_cast<std::size_t>(pred)];
}

std::optional<Predicate> predicate_from_name(std::string_view name) {
  auto it = std::find(kPredicateNames.begin(), kPredicateNames.end(), name);
  if (it == kPredicateNames.end()) return std::nullopt;
  return static_cast<Predicate>(it - kPredicateNames.begin());
}

bool is_terminator(Opcode op) {
  return op == Opcode::kBr || op == Opcode::kJmp || op == Opcode::kRet;
}

bool is_arithmetic(Opcode op) {
  return static_cast<std::uint8_t>(op) <= static_cast<std::uint8_t>(Opcode::kXor);
}

bool is_binary(Opcode op) { return is_arithmetic(op) || op == Opcode::kICmp; }

bool is_commutative(Opcode op) {
  switch (op) {
    case Opcode::kAdd:
    case Opcode::kMul:
    case Opcode::kAnd:
    case Opcode::kOr:
    case Opcode::kXor:
      return true;
    default:
      return false;
  }
}

bool has_result(Opcode op) {
  return !(op == Opcode::kStore || is_terminator(op));
}

std::optional<std::size_t> operand_arity(Opcode op) {
  if (is_binary(op)) return 2;
  switch (op) {
    case Opcode::kSelect:
    case Opcode::kBr:
      return 3;
    case Opcode::kLoad:
    case Opcode::kJmp:
    case Opcode::kRet:
      return 1;
    case Opcode::kStore:
    case Opcode::kGep:
      return 2;
    case Opcode::kAlloca:
      return 0;
    default:
      return std::nullopt;
  }
}

std::vector<std::string> BasicBlock::successors() const {
  std::vector<std::string> out;
  for (const Value& v : terminator.operands) {
    if (v.is_label() &&
        std::find(out.begin(), out.end(), v.name) == out.end()) {
      out.push_back(v.name);
    }
  }
  return out;
}

const BasicBlock* Function::find_block(std::string_view label) const {
  for (const BasicBlock& b : blocks) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

BasicBlock* Function::find_block(std::string_view label) {
  for (BasicBlock& b : blocks) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

std::optional<std::size_t> Function::block_index(std::string_view label) const {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].label == label) return i;
  }
  return std::nullopt;
}

std::size_t instruction_count(const Function& f) {
  std::size_t n = 0;
  for (const BasicBlock& b : f.blocks) n += b.size();
  return n;
}

Instruction make_binary(std::string result, Opcode op, Value lhs, Value rhs) {
  Instruction i;
  i.result = std::move(result);
  i.op = op;
  i.operands = {std::move(lhs), std::move(rhs)};
  return i;
}

Instruction make_icmp(std::string result, Predicate pred, Value lhs,
                      Value rhs) {
  Instruction i = make_binary(std::move(result), Opcode::kICmp,
                              std::move(lhs), std::move(rhs));
  i.pred = pred;
  return i;
}

Instruction make_jmp(std::string target) {
  Instruction i;
  i.op = Opcode::kJmp;
  i.operands = {Value::label(std::move(target))};
  return i;
}

Instruction make_br(Value cond, std::string then_label,
                    std::string else_label) {
  Instruction i;
  i.op = Opcode::kBr;
  i.operands = {std::move(cond), Value::label(std::move(then_label)),
                Value::label(std::move(else_label))};
  return i;
}

Instruction make_ret(Value v) {
  Instruction i;
  i.op = Opcode::kRet;
  i.operands = {std::move(v)};
  return i;
}

}  // namespace phaseforge
