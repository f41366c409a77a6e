#include "finsler/dsl/expr.hpp"

#include <cmath>

namespace finsler::dsl {

namespace {

NodePtr make(Op op, std::vector<NodePtr> args, Number v = {}) {
  return std::make_shared<const Node>(op, v, VarId{}, std::move(args));
}

const Number* const_of(const NodePtr& e) {
  return e->op == Op::Constant ? &e->value : nullptr;
}

}  // namespace

NodePtr constant(Number v) { return std::make_shared<const Node>(Op::Constant, v, VarId{}, std::vector<NodePtr>{}); }

NodePtr constant(std::int64_t p, std::int64_t q) { return constant(Number::rational(Rational(p, q))); }

NodePtr variable(VarId v) { return std::make_shared<const Node>(Op::Variable, Number{}, v, std::vector<NodePtr>{}); }

bool is_constant(const NodePtr& e, double v) {
  const Number* c = const_of(e);
  return c && c->value() == v;
}

NodePtr add(NodePtr a, NodePtr b) {
  const Number *ca = const_of(a), *cb = const_of(b);
  if (ca && cb) return constant(*ca + *cb);
  if (ca && ca->is_zero()) return b;
  if (cb && cb->is_zero()) return a;
  return make(Op::Add, {std::move(a), std::move(b)});
}

NodePtr sub(NodePtr a, NodePtr b) {
  const Number *ca = const_of(a), *cb = const_of(b);
  if (ca && cb) return constant(*ca - *cb);
  if (cb && cb->is_zero()) return a;
  if (ca && ca->is_zero()) return neg(std::move(b));
  return make(Op::Sub, {std::move(a), std::move(b)});
}

NodePtr mul(NodePtr a, NodePtr b) {
  const Number *ca = const_of(a), *cb = const_of(b);
  if (ca && cb) return constant(*ca * *cb);
  if ((ca && ca->is_zero()) || (cb && cb->is_zero())) return constant(0);
  if (ca && ca->is_one()) return b;
  if (cb && cb->is_one()) return a;
  return make(Op::Mul, {std::move(a), std::move(b)});
}

NodePtr div(NodePtr a, NodePtr b) {
  const Number *ca = const_of(a), *cb = const_of(b);
  if (ca && cb && !cb->is_zero()) return constant(*ca / *cb);
  if (cb && cb->is_one()) return a;
  if (ca && ca->is_zero() && !(cb && cb->is_zero())) return constant(0);
  return make(Op::Div, {std::move(a), std::move(b)});
}

NodePtr neg(NodePtr a) {
  if (const Number* c = const_of(a)) return constant(-*c);
  if (a->op == Op::Neg) return a->args[0];
  return make(Op::Neg, {std::move(a)});
}

NodePtr pow(NodePtr a, Number e) {
  if (e.is_zero()) return constant(1);
  if (e.is_one()) return a;
  if (const Number* c = const_of(a)) {
    if (c->exact && e.is_integer()) {
      if (auto r = Rational::ipow(c->q, e.q.num())) return constant(Number::rational(*r));
    }
  }
  return make(Op::Pow, {std::move(a)}, e);
}

NodePtr exp(NodePtr a) {
  if (is_constant(a, 0.0)) return constant(1);
  return make(Op::Exp, {std::move(a)});
}

NodePtr ln(NodePtr a) {
  if (is_constant(a, 1.0)) return constant(0);
  return make(Op::Ln, {std::move(a)});
}

std::size_t node_count(const NodePtr& e) {
  std::size_t n = 1;
  for (const auto& a : e->args) n += node_count(a);
  return n;
}

ParseError::ParseError(std::size_t offset, std::string found, std::vector<std::string> expected)
    : std::runtime_error([&] {
        std::string m = "syntax error at offset " + std::to_string(offset) + ": found " + found + ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) m += (i ? " or " : "") + expected[i];
        return m;
      }()),
      offset_(offset),
      found_(std::move(found)),
      expected_(std::move(expected)) {}

EnergyExpr::EnergyExpr(NodePtr root, int dim) : root_(std::move(root)), dim_(dim) {}

std::string EnergyExpr::str() const { return print(root_); }

EnergyExpr differentiate(const EnergyExpr& e, VarId var, int order) {
  if (var.index < 1 || var.index > e.dim()) throw std::invalid_argument("invalid variable " + var.name());
  if (order < 1) throw std::invalid_argument("derivative order must be positive");
  NodePtr r = e.root();
  for (int k = 0; k < order; ++k) r = differentiate(r, var);
  return EnergyExpr(r, e.dim());
}

double evaluate(const EnergyExpr& e, const std::vector<double>& z) { return evaluate(e.root(), z, e.dim()); }

FieldSpec::FieldSpec(std::vector<NodePtr> coefficients, int dim) : coeffs_(std::move(coefficients)), dim_(dim) {
  if (static_cast<int>(coeffs_.size()) != dim)
    throw std::invalid_argument("field needs " + std::to_string(dim) + " coefficients, got " +
                                std::to_string(coeffs_.size()));
}

std::vector<double> FieldSpec::evaluate(const std::vector<double>& z) const {
  std::vector<double> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(dsl::evaluate(c, z, dim_));
  return out;
}

FieldSpec FieldSpec::parse(const std::string& text, int dim) {
  std::vector<NodePtr> cs;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      cs.push_back(parse_expression(text.substr(start, i - start), dim));
      start = i + 1;
    } else if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      --depth;
    }
  }
  return FieldSpec(std::move(cs), dim);
}

FieldSpec FieldSpec::frame(int i, int dim) {
  std::vector<NodePtr> cs(dim, constant(0));
  cs.at(i - 1) = constant(1);
  return FieldSpec(std::move(cs), dim);
}

}  // namespace finsler::dsl
