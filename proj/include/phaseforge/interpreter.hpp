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

// Reference interpreter. It defines the observable semantics every pass must
// preserve.

#ifndef PHASEFORGE_INTERPRETER_HPP_
#define PHASEFORGE_INTERPRETER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "phaseforge/ir.hpp"

namespace phaseforge {

enum class TrapKind : std::uint8_t {
  kDivByZero,
  kOobMemory,
  kFuelExhausted,
  kMalformedPhi,
};

std::string_view trap_name(TrapKind t);

struct ExecResult {
  std::optional<std::int64_t> value;  // set when the program returned
  std::optional<TrapKind> trap;       // set otherwise
  std::uint64_t steps_used = 0;

  bool returned() const { return value.has_value(); }
  // Same returned value or same trap kind; step counts may differ.
  bool same_outcome(const ExecResult& other) const {
    return value == other.value && trap == other.trap;
  }
  friend bool operator==(const ExecResult&, const ExecResult&) = default;
};

// Pointers are encoded as ((allocation_number + 1) << 32) + slot_offset; each
// executed alloca yields a fresh zero-initialised allocation.
//
// Throws std::invalid_argument when args.size() differs from the parameter
// count.
ExecResult interpret(const Program& p, std::span<const std::int64_t> args,
                     std::uint64_t fuel);

// Shared with constant folding. Returns nullopt where execution would trap.
std::optional<std::int64_t> eval_binary(Opcode op, Predicate pred,
                                        std::int64_t lhs, std::int64_t rhs);

}  // namespace phaseforge

#endif  // PHASEFORGE_INTERPRETER_HPP_
