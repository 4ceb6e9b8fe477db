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

// Toy SSA intermediate representation: one function, basic blocks with phis,
// a straight-line body and exactly one terminator.

#ifndef PHASEFORGE_IR_HPP_
#define PHASEFORGE_IR_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phaseforge {

// Table order matters: feature indices 0-19 follow it.
enum class Opcode : std::uint8_t {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kRem,
  kShl,
  kShr,
  kAnd,
  kOr,
  kXor,
  kICmp,
  kSelect,
  kPhi,
  kLoad,
  kStore,
  kAlloca,
  kGep,
  kBr,
  kJmp,
  kRet,
};

inline constexpr std::size_t kNumOpcodes = 20;

enum class Predicate : std::uint8_t { kEq, kNe, kSlt, kSle, kSgt, kSge };

std::string_view opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);
std::string_view predicate_name(Predicate pred);
std::optional<Predicate> predicate_from_name(std::string_view name);

bool is_terminator(Opcode op);
// add .. xor
bool is_arithmetic(Opcode op);
// Arithmetic plus icmp: the two-operand value instructions.
bool is_binary(Opcode op);
bool is_commutative(Opcode op);
bool has_result(Opcode op);
// Value-operand count; phi is variadic and returns nullopt.
std::optional<std::size_t> operand_arity(Opcode op);

struct Value {
  enum class Kind : std::uint8_t { kReg, kConst, kLabel };

  Kind kind = Kind::kConst;
  std::string name;  // register (without '%') or label
  std::int64_t imm = 0;

  static Value reg(std::string n) { return {Kind::kReg, std::move(n), 0}; }
  static Value constant(std::int64_t v) { return {Kind::kConst, {}, v}; }
  static Value label(std::string n) { return {Kind::kLabel, std::move(n), 0}; }

  bool is_reg() const { return kind == Kind::kReg; }
  bool is_const() const { return kind == Kind::kConst; }
  bool is_label() const { return kind == Kind::kLabel; }
  bool is_reg(std::string_view n) const { return is_reg() && name == n; }

  friend auto operator<=>(const Value&, const Value&) = default;
  friend bool operator==(const Value&, const Value&) = default;
};

// Operand layout by opcode:
//   binary / icmp:  [lhs, rhs]
//   select:         [cond, if_true, if_false]
//   phi:            [label0, value0, label1, value1, ...]
//   load:           [address]
//   store:          [value, address]
//   alloca:         []  (size in `alloca_size`)
//   gep:            [base, index]
//   br:             [cond, then_label, else_label]
//   jmp:            [label]
//   ret:            [value]
struct Instruction {
  std::optional<std::string> result;
  Opcode op = Opcode::kRet;
  std::vector<Value> operands;
  Predicate pred = Predicate::kEq;  // icmp only
  std::int64_t alloca_size = 0;     // alloca only

  std::size_t num_incoming() const { return operands.size() / 2; }
  const std::string& incoming_label(std::size_t i) const {
    return operands[2 * i].name;
  }
  const Value& incoming_value(std::size_t i) const {
    return operands[2 * i + 1];
  }
  Value& incoming_value(std::size_t i) { return operands[2 * i + 1]; }

  // Positions of operands that carry data (everything but labels).
  template <typename Fn>
  void for_each_value_operand(Fn&& fn) {
    for (Value& v : operands) {
      if (!v.is_label()) fn(v);
    }
  }
  template <typename Fn>
  void for_each_value_operand(Fn&& fn) const {
    for (const Value& v : operands) {
      if (!v.is_label()) fn(v);
    }
  }

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> phis;
  std::vector<Instruction> body;
  Instruction terminator;

  std::size_t size() const { return phis.size() + body.size() + 1; }
  std::vector<std::string> successors() const;

  friend bool operator==(const BasicBlock&, const BasicBlock&) = default;
};

struct Function {
  std::string name = "main";
  std::vector<std::string> params;
  std::vector<BasicBlock> blocks;

  const BasicBlock* find_block(std::string_view label) const;
  BasicBlock* find_block(std::string_view label);
  std::optional<std::size_t> block_index(std::string_view label) const;

  friend bool operator==(const Function&, const Function&) = default;
};

struct Program {
  std::vector<Function> functions;

  const Function& main() const { return functions.front(); }
  Function& main() { return functions.front(); }

  friend bool operator==(const Program&, const Program&) = default;
};

// Calls fn(Instruction&) on every instruction: phis, body, terminator.
template <typename Fn>
void for_each_instruction(BasicBlock& block, Fn&& fn) {
  for (Instruction& i : block.phis) fn(i);
  for (Instruction& i : block.body) fn(i);
  fn(block.terminator);
}
template <typename Fn>
void for_each_instruction(const BasicBlock& block, Fn&& fn) {
  for (const Instruction& i : block.phis) fn(i);
  for (const Instruction& i : block.body) fn(i);
  fn(block.terminator);
}
template <typename Fn>
void for_each_instruction(Function& f, Fn&& fn) {
  for (BasicBlock& b : f.blocks) for_each_instruction(b, fn);
}
template <typename Fn>
void for_each_instruction(const Function& f, Fn&& fn) {
  for (const BasicBlock& b : f.blocks) for_each_instruction(b, fn);
}

std::size_t instruction_count(const Function& f);

// Instruction factories, mostly for tests and pass rewrites.
Instruction make_binary(std::string result, Opcode op, Value lhs, Value rhs);
Instruction make_icmp(std::string result, Predicate pred, Value lhs, Value rhs);
Instruction make_jmp(std::string target);
Instruction make_br(Value cond, std::string then_label, std::string else_label);
Instruction make_ret(Value v);

}  // namespace phaseforge

#endif  // PHASEFORGE_IR_HPP_
