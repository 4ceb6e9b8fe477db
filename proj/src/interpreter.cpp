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

#include "phaseforge/interpreter.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace phaseforge {

std::string_view trap_name(TrapKind t) {
  switch (t) {
    case TrapKind::kDivByZero:
      return "div_by_zero";
    case TrapKind::kOobMemory:
      return "oob_memory";
    case TrapKind::kFuelExhausted:
      return "fuel_exhausted";
    case TrapKind::kMalformedPhi:
      return "malformed_phi";
  }
  return "unknown";
}

std::optional<std::int64_t> eval_binary(Opcode op, Predicate pred,
                                        std::int64_t lhs, std::int64_t rhs) {
  // Wrapping arithmetic is done in the unsigned domain.
  const auto a = static_cast<std::uint64_t>(lhs);
  const auto b = static_cast<std::uint64_t>(rhs);
  switch (op) {
    case Opcode::kAdd:
      return static_cast<std::int64_t>(a + b);
    case Opcode::kSub:
      return static_cast<std::int64_t>(a - b);
    case Opcode::kMul:
      return static_cast<std::int64_t>(a * b);
    case Opcode::kDiv:
      if (rhs == 0) return std::nullopt;
      if (lhs == std::numeric_limits<std::int64_t>::min() && rhs == -1) {
        return lhs;
      }
      return lhs / rhs;
    case Opcode::kRem:
      if (rhs == 0) return std::nullopt;
      if (rhs == -1) return 0;
      return lhs % rhs;
    case Opcode::kShl:
      return static_cast<std::int64_t>(a << (b & 63));
    case Opcode::kShr:
      return lhs >> (b & 63);  // arithmetic
    case Opcode::kAnd:
      return static_cast<std::int64_t>(a & b);
    case Opcode::kOr:
      return static_cast<std::int64_t>(a | b);
    case Opcode::kXor:
      return static_cast<std::int64_t>(a ^ b);
    case Opcode::kICmp:
      switch (pred) {
        case Predicate::kEq:
          return lhs == rhs;
        case Predicate::kNe:
          return lhs != rhs;
        case Predicate::kSlt:
          return lhs < rhs;
        case Predicate::kSle:
          return lhs <= rhs;
        case Predicate::kSgt:
          return lhs > rhs;
        case Predicate::kSge:
          return lhs >= rhs;
      }
      break;
    default:
      break;
  }
  throw std::logic_error("eval_binary: not a binary opcode");
}

namespace {

class Machine {
 public:
  Machine(const Function& fn, std::uint64_t fuel) : fn_(fn), fuel_(fuel) {
    for (std::size_t i = 0; i < fn.blocks.size(); ++i) {
      block_of_[fn.blocks[i].label] = i;
    }
  }

  ExecResult run(std::span<const std::int64_t> args) {
    for (std::size_t i = 0; i < fn_.params.size(); ++i) {
      regs_[fn_.params[i]] = args[i];
    }
    std::size_t block = 0;
    std::optional<std::size_t> from;
    while (true) {
      const BasicBlock& b = fn_.blocks[block];
      // Phis read their inputs before any of them is written.
      if (!b.phis.empty()) {
        std::vector<std::int64_t> incoming;
        incoming.reserve(b.phis.size());
        for (const Instruction& phi : b.phis) {
          if (!charge()) return trap(TrapKind::kFuelExhausted);
          const Value* v = nullptr;
          if (from) {
            for (std::size_t k = 0; k < phi.num_incoming(); ++k) {
              if (phi.incoming_label(k) == fn_.blocks[*from].label) {
                v = &phi.incoming_value(k);
                break;
              }
            }
          }
          if (v == nullptr) return trap(TrapKind::kMalformedPhi);
          incoming.push_back(read(*v));
        }
        for (std::size_t k = 0; k < b.phis.size(); ++k) {
          regs_[*b.phis[k].result] = incoming[k];
        }
      }
      for (const Instruction& inst : b.body) {
        if (!charge()) return trap(TrapKind::kFuelExhausted);
        if (auto t = execute(inst)) return trap(*t);
      }
      if (!charge()) return trap(TrapKind::kFuelExhausted);
      const Instruction& term = b.terminator;
      std::string_view target;
      switch (term.op) {
        case Opcode::kRet: {
          ExecResult r;
          r.value = read(term.operands[0]);
          r.steps_used = steps_;
          return r;
        }
        case Opcode::kJmp:
          target = term.operands[0].name;
          break;
        case Opcode::kBr:
          target = read(term.operands[0]) != 0 ? term.operands[1].name
                                               : term.operands[2].name;
          break;
        default:
          throw std::logic_error("interpret: bad terminator");
      }
      from = block;
      block = block_of_.at(std::string(target));
    }
  }

 private:
  bool charge() {
    if (steps_ >= fuel_) return false;
    ++steps_;
    return true;
  }

  ExecResult trap(TrapKind t) const {
    ExecResult r;
    r.trap = t;
    r.steps_used = steps_;
    return r;
  }

  std::int64_t read(const Value& v) const {
    if (v.is_const()) return v.imm;
    auto it = regs_.find(v.name);
    if (it == regs_.end()) {
      throw std::logic_error("interpret: read of undefined %" + v.name);
    }
    return it->second;
  }

  std::int64_t* slot(std::int64_t ptr) {
    const auto u = static_cast<std::uint64_t>(ptr);
    const std::uint64_t alloc = u >> 32;
    const std::uint64_t offset = u & 0xffffffffULL;
    if (alloc == 0 || alloc > memory_.size()) return nullptr;
    std::vector<std::int64_t>& region = memory_[alloc - 1];
    if (offset >= region.size()) return nullptr;
    return &region[offset];
  }

  std::optional<TrapKind> execute(const Instruction& inst) {
    const std::string& dst = inst.result ? *inst.result : empty_;
    switch (inst.op) {
      case Opcode::kSelect:
        regs_[dst] = read(inst.operands[0]) != 0 ? read(inst.operands[1])
                                                 : read(inst.operands[2]);
        return std::nullopt;
      case Opcode::kAlloca:
        memory_.emplace_back(static_cast<std::size_t>(inst.alloca_size), 0);
        regs_[dst] = static_cast<std::int64_t>(
            static_cast<std::uint64_t>(memory_.size()) << 32);
        return std::nullopt;
      case Opcode::kGep:
        regs_[dst] = static_cast<std::int64_t>(
            static_cast<std::uint64_t>(read(inst.operands[0])) +
            static_cast<std::uint64_t>(read(inst.operands[1])));
        return std::nullopt;
      case Opcode::kLoad: {
        std::int64_t* s = slot(read(inst.operands[0]));
        if (s == nullptr) return TrapKind::kOobMemory;
        regs_[dst] = *s;
        return std::nullopt;
      }
      case Opcode::kStore: {
        std::int64_t* s = slot(read(inst.operands[1]));
        if (s == nullptr) return TrapKind::kOobMemory;
        *s = read(inst.operands[0]);
        return std::nullopt;
      }
      default:
        break;
    }
    auto v = eval_binary(inst.op, inst.pred, read(inst.operands[0]),
                         read(inst.operands[1]));
    if (!v) return TrapKind::kDivByZero;
    regs_[dst] = *v;
    return std::nullopt;
  }

  const Function& fn_;
  std::uint64_t fuel_;
  std::uint64_t steps_ = 0;
  std::unordered_map<std::string, std::size_t> block_of_;
  std::unordered_map<std::string, std::int64_t> regs_;
  std::vector<std::vector<std::int64_t>> memory_;
  std::string empty_;
};

}  // namespace

ExecResult interpret(const Program& p, std::span<const std::int64_t> args,
                     std::uint64_t fuel) {
  const Function& fn = p.main();
  if (args.size() != fn.params.size()) {
    throw std::invalid_argument("interpret: expected " +
                                std::to_string(fn.params.size()) +
                                " arguments, got " + std::to_string(args.size()));
  }
  Machine m(fn, fuel);
  return m.run(args);
}

}  // namespace phaseforge
