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

// Reader and writer for the `.tir` textual format.

#ifndef PHASEFORGE_IR_TEXT_HPP_
#define PHASEFORGE_IR_TEXT_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

#include "phaseforge/ir.hpp"

namespace phaseforge {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kUnknownOpcode, kArity };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

// Whitespace is insignificant; `;` starts a comment running to end of line.
Program parse_text(std::string_view source);

// Canonical form: one instruction per line, two-space indent, blocks in
// stored order.
std::string emit_text(const Program& program);
std::string format_value(const Value& v);
std::string format_instruction(const Instruction& inst);

}  // namespace phaseforge

#endif  // PHASEFORGE_IR_TEXT_HPP_
