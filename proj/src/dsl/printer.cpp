#include <cmath>
#include <cstdio>

#include "finsler/dsl/expr.hpp"

namespace finsler::dsl {

namespace {

std::string real_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

// Constants print as atoms: bare non-negative integers, anything else parenthesized.
std::string number_text(const Number& c) {
  if (c.exact) {
    if (c.q.is_integer() && c.q.num() >= 0) return std::to_string(c.q.num());
    return "(" + c.q.str() + ")";
  }
  if (c.v >= 0 && std::isfinite(c.v)) return real_text(c.v);
  return "(" + real_text(c.v) + ")";
}

int prec(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void emit(const Node& n, int min_prec, std::string& out) {
  bool paren = prec(n) < min_prec;
  if (paren) out += '(';
  switch (n.op) {
    case Op::Constant: out += number_text(n.value); break;
    case Op::Variable: out += n.var.name(); break;
    case Op::Add:
    case Op::Sub:
      emit(*n.args[0], 1, out);
      out += n.op == Op::Add ? " + " : " - ";
      emit(*n.args[1], 2, out);
      break;
    case Op::Mul:
    case Op::Div:
      emit(*n.args[0], 2, out);
      out += n.op == Op::Mul ? "*" : "/";
      emit(*n.args[1], 3, out);
      break;
    case Op::Neg:
      out += '-';
      emit(*n.args[0], 4, out);
      break;
    case Op::Pow:
      emit(*n.args[0], 5, out);
      out += '^';
      out += number_text(n.value);
      break;
    case Op::Exp:
    case Op::Ln:
      out += n.op == Op::Exp ? "exp(" : "ln(";
      emit(*n.args[0], 0, out);
      out += ')';
      break;
  }
  if (paren) out += ')';
}

}  // namespace

std::string print(const NodePtr& e) {
  std::string out;
  emit(*e, 0, out);
  return out;
}

}  // namespace finsler::dsl
