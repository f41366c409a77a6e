#pragma once

#include <cmath>
#include <vector>

#include "finsler/dsl/expr.hpp"

namespace finsler::dsl {

/// Scalar operations needed to evaluate an expression tree over T.
/// value(t) gives the point value used for domain checks.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double value(double t) { return t; }
  static double exp(double t) { return std::exp(t); }
  static double log(double t) { return std::log(t); }
  static double pow(double t, double r) { return std::pow(t, r); }
  static double ipow(double t, long long k) { return std::pow(t, static_cast<double>(k)); }
};

/// Evaluate with leaves leaf(flat_var_index) and constants konst(double).
template <class T, class Leaf, class Konst>
T evaluate_as(const Node& n, const Leaf& leaf, const Konst& konst, int dim) {
  using Tr = ScalarTraits<T>;
  switch (n.op) {
    case Op::Constant: return konst(n.value.value());
    case Op::Variable: return leaf(n.var.flat(dim));
    case Op::Add: return evaluate_as<T>(*n.args[0], leaf, konst, dim) + evaluate_as<T>(*n.args[1], leaf, konst, dim);
    case Op::Sub: return evaluate_as<T>(*n.args[0], leaf, konst, dim) - evaluate_as<T>(*n.args[1], leaf, konst, dim);
    case Op::Mul: return evaluate_as<T>(*n.args[0], leaf, konst, dim) * evaluate_as<T>(*n.args[1], leaf, konst, dim);
    case Op::Div: {
      T b = evaluate_as<T>(*n.args[1], leaf, konst, dim);
      if (Tr::value(b) == 0.0) throw DomainError("division by zero", print(n.args[1]));
      return evaluate_as<T>(*n.args[0], leaf, konst, dim) / b;
    }
    case Op::Neg: return -evaluate_as<T>(*n.args[0], leaf, konst, dim);
    case Op::Pow: {
      T b = evaluate_as<T>(*n.args[0], leaf, konst, dim);
      const Number& r = n.value;
      double bv = Tr::value(b);
      if (r.is_integer()) {
        if (bv == 0.0 && r.q.num() < 0) throw DomainError("negative power of zero", print(n.args[0]));
        return Tr::ipow(b, r.q.num());
      }
      if (!(bv > 0.0)) throw DomainError("fractional power of non-positive base", print(n.args[0]));
      return Tr::pow(b, r.value());
    }
    case Op::Exp: return Tr::exp(evaluate_as<T>(*n.args[0], leaf, konst, dim));
    case Op::Ln: {
      T a = evaluate_as<T>(*n.args[0], leaf, konst, dim);
      if (!(Tr::value(a) > 0.0)) throw DomainError("logarithm of non-positive value", print(n.args[0]));
      return Tr::log(a);
    }
  }
  return konst(0.0);
}

}  // namespace finsler::dsl
