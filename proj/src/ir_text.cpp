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

#include "phaseforge/ir_text.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>
#include <vector>

namespace phaseforge {

ParseError::ParseError(Kind kind, int line, int column,
                       const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { kIdent, kGlobal, kReg, kInt, kPunct, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int column = 1;
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto read_ident = [&](std::size_t start) {
    std::size_t j = start;
    while (j < src.size() && is_ident_char(src[j])) ++j;
    return j;
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == ';') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (c == '%' || c == '@') {
      if (i + 1 >= src.size() || !is_ident_start(src[i + 1])) {
        throw ParseError(ParseError::Kind::kSyntax, line, col,
                         std::string("expected identifier after '") + c + "'");
      }
      std::size_t end = read_ident(i + 1);
      t.kind = c == '%' ? Tok::kReg : Tok::kGlobal;
      t.text = std::string(src.substr(i + 1, end - i - 1));
      advance(end - i);
    } else if (is_ident_start(c)) {
      std::size_t end = read_ident(i);
      t.kind = Tok::kIdent;
      t.text = std::string(src.substr(i, end - i));
      advance(end - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < src.size() &&
                std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t end = i + 1;
      while (end < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[end]))) {
        ++end;
      }
      t.kind = Tok::kInt;
      t.text = std::string(src.substr(i, end - i));
      auto [ptr, ec] =
          std::from_chars(t.text.data(), t.text.data() + t.text.size(),
                          t.value);
      if (ec != std::errc()) {
        throw ParseError(ParseError::Kind::kSyntax, line, col,
                         "integer literal out of range: " + t.text);
      }
      advance(end - i);
    } else if (std::string_view("{}()[]:,=").find(c) !=
               std::string_view::npos) {
      t.kind = Tok::kPunct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(ParseError::Kind::kSyntax, line, col,
                       std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::kEnd;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

// An operand as written, before opcode-specific checking.
struct RawOperand {
  enum class Kind { kValue, kLabel, kIncoming } kind = Kind::kValue;
  Value value;
  std::string label;
  int line = 0;
  int column = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program parse_program() {
    expect_ident("func");
    const Token& name = next();
    if (name.kind != Tok::kGlobal) fail(name, "expected function name '@...'");
    Function fn;
    fn.name = name.text;
    expect_punct("(");
    if (!peek_punct(")")) {
      while (true) {
        const Token& p = next();
        if (p.kind != Tok::kReg) fail(p, "expected parameter register");
        fn.params.push_back(p.text);
        if (!peek_punct(",")) break;
        next();
      }
    }
    expect_punct(")");
    expect_punct("{");
    while (!peek_punct("}")) {
      fn.blocks.push_back(parse_block());
    }
    expect_punct("}");
    if (fn.blocks.empty()) fail(peek(), "function has no blocks");
    if (peek().kind != Tok::kEnd) fail(peek(), "trailing input after function");
    Program p;
    p.functions.push_back(std::move(fn));
    return p;
  }

 private:
  BasicBlock parse_block() {
    const Token& label = next();
    if (label.kind != Tok::kIdent) fail(label, "expected block label");
    expect_punct(":");
    BasicBlock block;
    block.label = label.text;
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::kEnd || (t.kind == Tok::kPunct && t.text == "}")) {
        fail(t, "block '" + block.label + "' lacks a terminator");
      }
      if (t.kind == Tok::kIdent && peek(1).kind == Tok::kPunct &&
          peek(1).text == ":") {
        fail(t, "block '" + block.label + "' lacks a terminator");
      }
      Instruction inst = parse_instruction();
      if (is_terminator(inst.op)) {
        block.terminator = std::move(inst);
        return block;
      }
      if (inst.op == Opcode::kPhi) {
        if (!block.body.empty()) {
          fail(t, "phi after non-phi instruction in block '" + block.label +
                      "'");
        }
        block.phis.push_back(std::move(inst));
      } else {
        block.body.push_back(std::move(inst));
      }
    }
  }

  Instruction parse_instruction() {
    Instruction inst;
    const Token& first = next();
    const Token* op_tok = &first;
    if (first.kind == Tok::kReg) {
      inst.result = first.text;
      expect_punct("=");
      op_tok = &next();
    }
    if (op_tok->kind != Tok::kIdent) fail(*op_tok, "expected opcode");
    auto op = opcode_from_name(op_tok->text);
    if (!op) {
      throw ParseError(ParseError::Kind::kUnknownOpcode, op_tok->line,
                       op_tok->column, "unknown opcode '" + op_tok->text + "'");
    }
    inst.op = *op;
    if (inst.op == Opcode::kICmp) {
      const Token& pt = peek();
      if (pt.kind == Tok::kIdent) {
        if (auto pred = predicate_from_name(pt.text)) {
          inst.pred = *pred;
          next();
        } else {
          fail(pt, "unknown icmp predicate '" + pt.text + "'");
        }
      } else {
        arity_error(*op_tok, "icmp requires a predicate");
      }
    }
    std::vector<RawOperand> raw = parse_operand_list();
    build_operands(inst, *op_tok, raw);
    if (has_result(inst.op) && !inst.result) {
      fail(*op_tok, std::string(opcode_name(inst.op)) + " must define a result");
    }
    if (!has_result(inst.op) && inst.result) {
      fail(*op_tok, std::string(opcode_name(inst.op)) + " produces no result");
    }
    return inst;
  }

  std::vector<RawOperand> parse_operand_list() {
    std::vector<RawOperand> out;
    if (!starts_operand(peek())) return out;
    while (true) {
      out.push_back(parse_operand());
      if (!peek_punct(",")) break;
      next();
    }
    return out;
  }

  static bool starts_operand(const Token& t) {
    return t.kind == Tok::kReg || t.kind == Tok::kInt ||
           (t.kind == Tok::kPunct && t.text == "[") ||
           (t.kind == Tok::kIdent && !opcode_from_name(t.text));
  }

  RawOperand parse_operand() {
    const Token& t = next();
    RawOperand r;
    r.line = t.line;
    r.column = t.column;
    switch (t.kind) {
      case Tok::kReg:
        r.value = Value::reg(t.text);
        return r;
      case Tok::kInt:
        r.value = Value::constant(t.value);
        return r;
      case Tok::kIdent:
        r.kind = RawOperand::Kind::kLabel;
        r.label = t.text;
        return r;
      default:
        break;
    }
    if (t.kind == Tok::kPunct && t.text == "[") {
      const Token& l = next();
      if (l.kind != Tok::kIdent) fail(l, "expected predecessor label");
      expect_punct(":");
      const Token& v = next();
      if (v.kind == Tok::kReg) {
        r.value = Value::reg(v.text);
      } else if (v.kind == Tok::kInt) {
        r.value = Value::constant(v.value);
      } else {
        fail(v, "expected incoming value");
      }
      expect_punct("]");
      r.kind = RawOperand::Kind::kIncoming;
      r.label = l.text;
      return r;
    }
    fail(t, "expected operand");
  }

  void build_operands(Instruction& inst, const Token& op_tok,
                      std::vector<RawOperand>& raw) {
    const std::string name(opcode_name(inst.op));
    auto need_count = [&](std::size_t n) {
      if (raw.size() != n) {
        arity_error(op_tok, name + " expects " + std::to_string(n) +
                                " operands, got " + std::to_string(raw.size()));
      }
    };
    auto need_value = [&](const RawOperand& r) -> Value {
      if (r.kind != RawOperand::Kind::kValue) {
        throw ParseError(ParseError::Kind::kSyntax, r.line, r.column,
                         name + " operand must be a register or integer");
      }
      return r.value;
    };
    auto need_label = [&](const RawOperand& r) -> Value {
      if (r.kind != RawOperand::Kind::kLabel) {
        throw ParseError(ParseError::Kind::kSyntax, r.line, r.column,
                         name + " operand must be a block label");
      }
      return Value::label(r.label);
    };

    switch (inst.op) {
      case Opcode::kPhi:
        if (raw.empty()) arity_error(op_tok, "phi needs at least one incoming");
        for (const RawOperand& r : raw) {
          if (r.kind != RawOperand::Kind::kIncoming) {
            throw ParseError(ParseError::Kind::kSyntax, r.line, r.column,
                             "phi operand must be '[label: value]'");
          }
          inst.operands.push_back(Value::label(r.label));
          inst.operands.push_back(r.value);
        }
        return;
      case Opcode::kAlloca: {
        need_count(1);
        Value v = need_value(raw[0]);
        if (!v.is_const() || v.imm <= 0) {
          throw ParseError(ParseError::Kind::kSyntax, raw[0].line,
                           raw[0].column, "alloca size must be a positive integer");
        }
        inst.alloca_size = v.imm;
        return;
      }
      case Opcode::kBr:
        need_count(3);
        inst.operands = {need_value(raw[0]), need_label(raw[1]),
                         need_label(raw[2])};
        return;
      case Opcode::kJmp:
        need_count(1);
        inst.operands = {need_label(raw[0])};
        return;
      default: {
        need_count(*operand_arity(inst.op));
        for (const RawOperand& r : raw) inst.operands.push_back(need_value(r));
        return;
      }
    }
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool peek_punct(std::string_view p) const {
    return peek().kind == Tok::kPunct && peek().text == p;
  }
  void expect_punct(std::string_view p) {
    const Token& t = next();
    if (t.kind != Tok::kPunct || t.text != p) {
      fail(t, "expected '" + std::string(p) + "'");
    }
  }
  void expect_ident(std::string_view word) {
    const Token& t = next();
    if (t.kind != Tok::kIdent || t.text != word) {
      fail(t, "expected '" + std::string(word) + "'");
    }
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(ParseError::Kind::kSyntax, t.line, t.column, msg);
  }
  [[noreturn]] static void arity_error(const Token& t, const std::string& msg) {
    throw ParseError(ParseError::Kind::kArity, t.line, t.column, msg);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse_text(std::string_view source) {
  Parser parser(tokenize(source));
  return parser.parse_program();
}

std::string format_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::kReg:
      return "%" + v.name;
    case Value::Kind::kConst:
      return std::to_string(v.imm);
    case Value::Kind::kLabel:
      return v.name;
  }
  return {};
}

std::string format_instruction(const Instruction& inst) {
  std::string out;
  if (inst.result) out += "%" + *inst.result + " = ";
  out += opcode_name(inst.op);
  if (inst.op == Opcode::kICmp) {
    out += " ";
    out += predicate_name(inst.pred);
  }
  if (inst.op == Opcode::kAlloca) {
    out += " " + std::to_string(inst.alloca_size);
    return out;
  }
  if (inst.op == Opcode::kPhi) {
    for (std::size_t i = 0; i < inst.num_incoming(); ++i) {
      out += i == 0 ? " [" : ", [";
      out += inst.incoming_label(i) + ": " +
             format_value(inst.incoming_value(i)) + "]";
    }
    return out;
  }
  for (std::size_t i = 0; i < inst.operands.size(); ++i) {
    out += i == 0 ? " " : ", ";
    out += format_value(inst.operands[i]);
  }
  return out;
}

std::string emit_text(const Program& program) {
  std::ostringstream os;
  for (const Function& fn : program.functions) {
    os << "func @" << fn.name << "(";
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      os << (i ? ", %" : "%") << fn.params[i];
    }
    os << ") {\n";
    for (const BasicBlock& b : fn.blocks) {
      os << b.label << ":\n";
      for_each_instruction(b, [&](const Instruction& inst) {
        os << "  " << format_instruction(inst) << "\n";
      });
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace phaseforge
