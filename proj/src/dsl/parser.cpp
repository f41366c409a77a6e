#include <cctype>
#include <cstdlib>

#include "finsler/dsl/expr.hpp"

namespace finsler::dsl {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      out.push_back({Tok::Number, start, s.substr(start, i - start)});
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, start, s.substr(start, i - start)});
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      default:
        throw ParseError(i, "'" + std::string(1, s[i]) + "'",
                         {"number", "variable", "function", "operator", "'('", "')'"});
    }
    out.push_back({k, i, std::string(1, s[i])});
    ++i;
  }
  out.push_back({Tok::End, s.size(), ""});
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, int dim) : toks_(lex(text)), dim_(dim) {}

  NodePtr parse() {
    NodePtr e = expr();
    if (peek().kind != Tok::End) throw ParseError(peek().offset, describe(peek()), {"operator", "end of input"});
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int dim_;
  // offset of the most recent binary operator awaiting its right operand
  std::size_t pending_op_ = std::string::npos;

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }

  NodePtr expr() {
    NodePtr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      Token op = next();
      pending_op_ = op.offset;
      NodePtr rhs = term();
      lhs = op.kind == Tok::Plus ? add(lhs, rhs) : sub(lhs, rhs);
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      Token op = next();
      pending_op_ = op.offset;
      NodePtr rhs = unary();
      lhs = op.kind == Tok::Star ? mul(lhs, rhs) : div(lhs, rhs);
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().kind == Tok::Minus) {
      next();
      return neg(unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().kind == Tok::Caret) {
      Token op = next();
      pending_op_ = op.offset;
      std::size_t at = peek().offset;
      NodePtr e = exponent();
      if (e->op != Op::Constant) throw ParseError(at, "non-constant exponent", {"constant exponent"});
      return pow(base, e->value);
    }
    return base;
  }

  NodePtr exponent() {
    if (peek().kind == Tok::Minus) {
      next();
      return neg(exponent());
    }
    return power();
  }

  [[noreturn]] void operand_error() {
    const Token& t = peek();
    bool dangling = t.kind == Tok::End || t.kind == Tok::Plus || t.kind == Tok::Star || t.kind == Tok::Slash ||
                    t.kind == Tok::Caret || t.kind == Tok::RParen;
    std::size_t off = (dangling && pending_op_ != std::string::npos) ? pending_op_ : t.offset;
    throw ParseError(off, describe(t), {"number", "variable", "function call", "'('"});
  }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) throw ParseError(peek().offset, describe(peek()), {what});
    next();
  }

  NodePtr primary() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::Number: {
        next();
        pending_op_ = std::string::npos;
        return number(t);
      }
      case Tok::LParen: {
        next();
        pending_op_ = std::string::npos;
        NodePtr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        next();
        pending_op_ = std::string::npos;
        if (t.text == "exp" || t.text == "ln" || t.text == "sqrt") {
          expect(Tok::LParen, "'('");
          NodePtr a = expr();
          expect(Tok::RParen, "')'");
          if (t.text == "exp") return exp(a);
          if (t.text == "ln") return ln(a);
          return pow(a, Number::rational(Rational(1, 2)));
        }
        return var(t);
      }
      default:
        operand_error();
    }
  }

  NodePtr number(const Token& t) {
    bool integral = t.text.find_first_of(".eE") == std::string::npos;
    if (integral && t.text.size() <= 18) return constant(std::strtoll(t.text.c_str(), nullptr, 10));
    return constant(Number::real(std::strtod(t.text.c_str(), nullptr)));
  }

  NodePtr var(const Token& t) {
    const std::string& s = t.text;
    if (s.size() >= 2 && (s[0] == 'x' || s[0] == 'y') &&
        s.find_first_not_of("0123456789", 1) == std::string::npos && s[1] != '0') {
      if (s.size() > 6) throw VariableError(t.offset, "variable index too large in " + s);
      int idx = std::atoi(s.c_str() + 1);
      if (idx > dim_)
        throw VariableError(t.offset, "variable " + s + " exceeds dimension " + std::to_string(dim_));
      return variable(s[0] == 'x' ? VarId::x(idx) : VarId::y(idx));
    }
    throw VariableError(t.offset, "unknown variable '" + s + "' at offset " + std::to_string(t.offset));
  }
};

}  // namespace

NodePtr parse_expression(const std::string& text, int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  return Parser(text, dim).parse();
}

EnergyExpr parse_energy(const std::string& text, int dim) {
  if (dim < 2) throw std::invalid_argument("dimension must be at least 2");
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw std::invalid_argument("empty energy expression");
  return EnergyExpr(parse_expression(text, dim), dim);
}

}  // namespace finsler::dsl
