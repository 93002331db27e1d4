// Copyright 2026 The ssm-dyn Authors
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

#include "ssmdyn/model_file.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

namespace ssmdyn {

namespace {

enum class Tok { number, ident, lparen, rparen, comma, plus, minus, star, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      // Number with optional exponent and optional "/denominator".
      auto digits = [&] {
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
          ++i;
          if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      };
      digits();
      if (i < s.size() && s[i] == '/') {
        ++i;
        digits();
      }
      out.push_back({Tok::number, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::lparen; break;
      case ')': kind = Tok::rparen; break;
      case ',': kind = Tok::comma; break;
      case '+': kind = Tok::plus; break;
      case '-': kind = Tok::minus; break;
      case '*': kind = Tok::star; break;
      default:
        throw ModelError("unexpected character '" + std::string(1, c) + "' at column " +
                         std::to_string(i + 1));
    }
    out.push_back({kind, std::string(1, c), start});
    ++i;
  }
  out.push_back({Tok::end, "", s.size()});
  return out;
}

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const SpinRegister& reg)
      : tokens_(tokenize(text)), reg_(reg), dim_(reg.hilbert_dim()) {}

  Operator parse() {
    Operator out = expression();
    if (peek().kind != Tok::end) fail("trailing input");
    return out;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ModelError("operator expression: " + what + " at column " +
                     std::to_string(peek().pos + 1));
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    ++pos_;
  }

  Operator expression() {
    double sign = 1.0;
    if (peek().kind == Tok::minus) {
      sign = -1.0;
      ++pos_;
    } else if (peek().kind == Tok::plus) {
      ++pos_;
    }
    Operator acc = sign * term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const double s = next().kind == Tok::minus ? -1.0 : 1.0;
      acc += s * term();
    }
    return acc;
  }

  static bool starts_factor(Tok k) {
    return k == Tok::number || k == Tok::ident || k == Tok::lparen;
  }

  Operator term() {
    if (!starts_factor(peek().kind)) fail("expected a term");
    double coefficient = 1.0;
    Matrix product = Matrix::Identity(dim_, dim_);
    while (true) {
      if (peek().kind == Tok::number) {
        coefficient *= parse_number(next().text);
      } else if (peek().kind == Tok::ident || peek().kind == Tok::lparen) {
        product = product * factor().matrix();
      } else {
        break;
      }
      if (peek().kind == Tok::star) {
        ++pos_;
        if (!starts_factor(peek().kind)) fail("expected a factor after '*'");
      }
    }
    return Operator(Matrix(coefficient * product));
  }

  Operator factor() {
    if (peek().kind == Tok::lparen) {
      ++pos_;
      Operator inner = expression();
      expect(Tok::rparen, "')'");
      return inner;
    }
    const Token tok = next();
    const std::string& name = tok.text;
    if (name == "I") return Operator::identity(dim_);
    if (name == "Sx") return collective_spin(reg_, Axis::x);
    if (name == "Sy") return collective_spin(reg_, Axis::y);
    if (name == "Sz") return collective_spin(reg_, Axis::z);
    if (name == "Sm") return collective_lowering(reg_);
    if (name == "Sp") return collective_lowering(reg_).adjoint();
    if (name == "expi") {
      expect(Tok::lparen, "'(' after expi");
      double sign = 1.0;
      if (peek().kind == Tok::minus) {
        sign = -1.0;
        ++pos_;
      }
      if (peek().kind != Tok::number) fail("expected a phase");
      const double phi = sign * parse_number(next().text);
      expect(Tok::comma, "','");
      const Operator a = expression();
      expect(Tok::rparen, "')'");
      return Operator(expm(kI * phi * a.matrix()));
    }
    if (name.size() >= 2 && (name[0] == 'X' || name[0] == 'Y' || name[0] == 'Z')) {
      const std::string digits = name.substr(1);
      for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) fail("unknown operator '" + name + "'");
      }
      const Axis axis = name[0] == 'X' ? Axis::x : name[0] == 'Y' ? Axis::y : Axis::z;
      return site_pauli(reg_, std::stoi(digits), axis);
    }
    --pos_;
    fail("unknown operator '" + name + "'");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const SpinRegister& reg_;
  Index dim_;
};

// "weight : expression"
std::pair<double, std::string_view> split_weighted(std::string_view value, const std::string& where) {
  const auto colon = value.find(':');
  if (colon == std::string_view::npos) {
    throw ModelError(where + ": expected '<number> : <operator>'");
  }
  return {parse_number(value.substr(0, colon)), value.substr(colon + 1)};
}

}  // namespace

Operator parse_operator_expression(std::string_view expr, const SpinRegister& reg) {
  return ExpressionParser(expr, reg).parse();
}

LiouvillianModel parse_model(const KeyValueFile& kv) {
  static const std::vector<std::string> known = {"sites",        "hamiltonian", "lindblad", "kraus",
                                                 "perturbation", "strength",    "scale"};
  for (const auto& e : kv.entries()) {
    if (std::find(known.begin(), known.end(), e.key) == known.end()) {
      throw ModelError(kv.source() + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
  }
  const auto sites = kv.get_int("sites");
  if (!sites) throw ModelError(kv.source() + ": missing required key 'sites'");
  const SpinRegister reg(static_cast<int>(*sites));

  auto located = [&](const KeyValueFile::Entry& e) {
    return kv.source() + ":" + std::to_string(e.line);
  };

  LiouvillianModel model;
  model.dim = reg.hilbert_dim();
  try {
    for (const auto& e : kv.all("hamiltonian")) {
      model.hamiltonian_terms.push_back({parse_operator_expression(e.value, reg), 1.0});
    }
    for (const auto& e : kv.all("lindblad")) {
      const auto [rate, expr] = split_weighted(e.value, located(e));
      model.lindblad_terms.push_back({parse_operator_expression(expr, reg), rate});
    }
    for (const auto& e : kv.all("kraus")) {
      const auto [weight, expr] = split_weighted(e.value, located(e));
      model.kraus_terms.push_back({parse_operator_expression(expr, reg), weight});
    }
    if (const auto p = kv.get("perturbation")) {
      model.perturbation = parse_operator_expression(*p, reg);
    }
  } catch (const ModelError& e) {
    throw ModelError(kv.source() + ": " + e.what());
  }
  model.strength = kv.get_double("strength").value_or(1.0);
  model.scale = kv.get_double("scale").value_or(1.0);
  model.validate();
  return model;
}

LiouvillianModel load_model(const std::filesystem::path& path) {
  return parse_model(KeyValueFile::load(path));
}

}  // namespace ssmdyn
