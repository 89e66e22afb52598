// Copyright 2026 The qctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qctx/gates.hpp"

namespace qctx {

/// Syntax or semantic error in an OpenQASM 2 source, with location.
class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& msg)
      : Error("qasm:" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line, col;
};

namespace detail {

struct Token {
  enum Kind { Id, Number, Symbol, End } kind = End;
  std::string text;
  double value = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::End;
      return;
    }
    char c = src_[pos_];
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
        bump();
      tok_.kind = Token::Id;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit((unsigned char)c) || c == '.') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isdigit((unsigned char)src_[pos_]) || src_[pos_] == '.' ||
              src_[pos_] == 'e' || src_[pos_] == 'E' ||
              ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
               (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))))
        bump();
      tok_.kind = Token::Number;
      tok_.text = src_.substr(start, pos_ - start);
      try {
        tok_.value = std::stod(tok_.text);
      } catch (...) {
        throw ParseError(tok_.line, tok_.col, "malformed number '" + tok_.text + "'");
      }
      return;
    }
    if (c == '"') {
      size_t start = ++pos_;
      ++col_;
      while (pos_ < src_.size() && src_[pos_] != '"') bump();
      if (pos_ >= src_.size()) throw ParseError(tok_.line, tok_.col, "unterminated string");
      tok_.kind = Token::Symbol;
      tok_.text = "\"" + src_.substr(start, pos_ - start) + "\"";
      bump();
      return;
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      tok_.kind = Token::Symbol;
      tok_.text = "->";
      bump();
      bump();
      return;
    }
    tok_.kind = Token::Symbol;
    tok_.text = std::string(1, c);
    bump();
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) bump();
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

}  // namespace detail

/// Parses the supported OpenQASM 2 subset into a Circuit. Multiple quantum
/// registers are flattened into one index space in declaration order.
/// Measurements are dropped (a note is appended to *warnings when given).
inline Circuit parse_qasm(const std::string& text,
                          std::vector<std::string>* warnings = nullptr) {
  using detail::Token;
  detail::Lexer lex(text);

  struct Reg {
    std::string name;
    uint32_t offset, size;
  };
  std::vector<Reg> qregs;
  Circuit circ;

  auto warn = [&](const std::string& m) {
    if (warnings) warnings->push_back(m);
  };
  auto expect_symbol = [&](const std::string& s) {
    Token t = lex.next();
    if (t.kind != Token::Symbol || t.text != s)
      throw ParseError(t.line, t.col, "expected '" + s + "', got '" + t.text + "'");
  };
  auto find_reg = [&](const Token& t) -> const Reg& {
    for (const Reg& r : qregs)
      if (r.name == t.text) return r;
    throw ParseError(t.line, t.col, "unknown register '" + t.text + "'");
  };

  // expression grammar: expr := term (('+'|'-') term)*
  //                     term := factor (('*'|'/') factor)*
  //                     factor := ('-'|'+') factor | number | pi | '(' expr ')'
  std::function<double()> parse_expr = [&]() -> double {
    std::function<double()> parse_factor = [&]() -> double {
      Token t = lex.peek();
      if (t.kind == Token::Symbol && (t.text == "-" || t.text == "+")) {
        lex.next();
        double v = parse_factor();
        return t.text == "-" ? -v : v;
      }
      if (t.kind == Token::Symbol && t.text == "(") {
        lex.next();
        double v = parse_expr();
        expect_symbol(")");
        return v;
      }
      if (t.kind == Token::Number) {
        lex.next();
        return t.value;
      }
      if (t.kind == Token::Id && t.text == "pi") {
        lex.next();
        return kPi;
      }
      throw ParseError(t.line, t.col, "expected angle expression, got '" + t.text + "'");
    };
    auto parse_term = [&]() -> double {
      double v = parse_factor();
      for (;;) {
        Token t = lex.peek();
        if (t.kind == Token::Symbol && (t.text == "*" || t.text == "/")) {
          lex.next();
          double r = parse_factor();
          v = t.text == "*" ? v * r : v / r;
        } else {
          return v;
        }
      }
    };
    double v = parse_term();
    for (;;) {
      Token t = lex.peek();
      if (t.kind == Token::Symbol && (t.text == "+" || t.text == "-")) {
        lex.next();
        double r = parse_term();
        v = t.text == "+" ? v + r : v - r;
      } else {
        return v;
      }
    }
  };

  // argument: reg '[' int ']'   (whole-register args allowed for barrier only)
  auto parse_indexed = [&]() -> uint32_t {
    Token name = lex.next();
    if (name.kind != Token::Id) throw ParseError(name.line, name.col, "expected register name");
    const Reg& r = find_reg(name);
    expect_symbol("[");
    Token idx = lex.next();
    if (idx.kind != Token::Number)
      throw ParseError(idx.line, idx.col, "expected qubit index");
    long i = (long)idx.value;
    if (i < 0 || (uint32_t)i >= r.size)
      throw ParseError(idx.line, idx.col, "index out of range for register '" + r.name + "'");
    expect_symbol("]");
    return r.offset + (uint32_t)i;
  };

  auto skip_to_semicolon = [&]() {
    for (;;) {
      Token t = lex.next();
      if (t.kind == Token::End) return;
      if (t.kind == Token::Symbol && t.text == ";") return;
    }
  };

  static const std::map<std::string, GateKind> kGateNames = {
      {"u3", GateKind::U3}, {"u", GateKind::U3},    {"rz", GateKind::Rz},
      {"sx", GateKind::Sx}, {"x", GateKind::X},     {"h", GateKind::H},
      {"t", GateKind::T},   {"tdg", GateKind::Tdg}, {"cx", GateKind::Cx},
      {"swap", GateKind::Swap}, {"ccx", GateKind::Ccx}, {"rzx", GateKind::Rzx}};

  for (;;) {
    Token t = lex.peek();
    if (t.kind == Token::End) break;
    if (t.kind != Token::Id)
      throw ParseError(t.line, t.col, "expected statement, got '" + t.text + "'");

    if (t.text == "OPENQASM") {
      lex.next();
      Token v = lex.next();
      if (v.kind != Token::Number)
        throw ParseError(v.line, v.col, "expected version number");
      expect_symbol(";");
      continue;
    }
    if (t.text == "include") {
      lex.next();
      skip_to_semicolon();
      continue;
    }
    if (t.text == "qreg") {
      lex.next();
      Token name = lex.next();
      if (name.kind != Token::Id) throw ParseError(name.line, name.col, "expected register name");
      expect_symbol("[");
      Token n = lex.next();
      if (n.kind != Token::Number || n.value < 1)
        throw ParseError(n.line, n.col, "expected register size");
      expect_symbol("]");
      expect_symbol(";");
      qregs.push_back({name.text, circ.num_qubits, (uint32_t)n.value});
      circ.num_qubits += (uint32_t)n.value;
      continue;
    }
    if (t.text == "creg") {
      lex.next();
      skip_to_semicolon();
      continue;
    }
    if (t.text == "measure") {
      lex.next();
      skip_to_semicolon();
      warn("measure statement dropped (line " + std::to_string(t.line) + ")");
      continue;
    }
    if (t.text == "barrier") {
      lex.next();
      std::vector<uint32_t> qs;
      for (;;) {
        Token name = lex.peek();
        if (name.kind != Token::Id)
          throw ParseError(name.line, name.col, "expected register in barrier");
        // whole-register barrier
        Token saved = lex.next();
        const Reg& r = find_reg(saved);
        if (lex.peek().kind == Token::Symbol && lex.peek().text == "[") {
          expect_symbol("[");
          Token idx = lex.next();
          if (idx.kind != Token::Number || (uint32_t)idx.value >= r.size)
            throw ParseError(idx.line, idx.col, "index out of range");
          expect_symbol("]");
          qs.push_back(r.offset + (uint32_t)idx.value);
        } else {
          for (uint32_t i = 0; i < r.size; ++i) qs.push_back(r.offset + i);
        }
        Token sep = lex.next();
        if (sep.kind == Token::Symbol && sep.text == ",") continue;
        if (sep.kind == Token::Symbol && sep.text == ";") break;
        throw ParseError(sep.line, sep.col, "expected ',' or ';' in barrier");
      }
      circ.push(gate::barrier(qs));
      continue;
    }

    auto it = kGateNames.find(t.text);
    if (it == kGateNames.end())
      throw ParseError(t.line, t.col, "unknown gate name '" + t.text + "'");
    lex.next();
    GateKind kind = it->second;

    std::vector<double> params;
    if (lex.peek().kind == Token::Symbol && lex.peek().text == "(") {
      lex.next();
      if (!(lex.peek().kind == Token::Symbol && lex.peek().text == ")")) {
        params.push_back(parse_expr());
        while (lex.peek().kind == Token::Symbol && lex.peek().text == ",") {
          lex.next();
          params.push_back(parse_expr());
        }
      }
      expect_symbol(")");
    }
    if (params.size() != kind_param_count(kind))
      throw ParseError(t.line, t.col,
                       std::string("gate '") + kind_name(kind) + "' expects " +
                           std::to_string(kind_param_count(kind)) + " parameter(s)");

    std::vector<uint32_t> qs;
    qs.push_back(parse_indexed());
    while (lex.peek().kind == Token::Symbol && lex.peek().text == ",") {
      lex.next();
      qs.push_back(parse_indexed());
    }
    expect_symbol(";");
    if (qs.size() != kind_arity(kind))
      throw ParseError(t.line, t.col,
                       std::string("gate '") + kind_name(kind) + "' expects " +
                           std::to_string(kind_arity(kind)) + " qubit(s)");
    Gate g{kind, qs, params, GateTag::Program};
    validate_gate(g, circ.num_qubits);
    circ.push(std::move(g));
  }
  if (circ.num_qubits == 0 && !circ.gates.empty())
    throw ParseError(1, 1, "no quantum register declared");
  return circ;
}

/// Emits the circuit as OpenQASM 2 text. Angles are printed with 17
/// significant digits so that parse(emit(c)) reproduces them exactly.
inline std::string emit_qasm(const Circuit& c) {
  std::ostringstream os;
  os << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  os << "qreg q[" << c.num_qubits << "];\n";
  char buf[64];
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Barrier) {
      os << "barrier ";
      for (size_t i = 0; i < g.qubits.size(); ++i)
        os << (i ? "," : "") << "q[" << g.qubits[i] << "]";
      os << ";\n";
      continue;
    }
    os << kind_name(g.kind);
    if (!g.params.empty()) {
      os << "(";
      for (size_t i = 0; i < g.params.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", g.params[i]);
        os << (i ? "," : "") << buf;
      }
      os << ")";
    }
    os << " ";
    for (size_t i = 0; i < g.qubits.size(); ++i)
      os << (i ? "," : "") << "q[" << g.qubits[i] << "]";
    os << ";\n";
  }
  return os.str();
}

}  // namespace qctx
