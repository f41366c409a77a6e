#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/dsl/rational.hpp"

namespace finsler::dsl {

enum class Op { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Exp, Ln };

/// Variable identity. Flat index: x_i -> i-1, y_i -> n+i-1.
struct VarId {
  enum class Kind { X, Y };
  Kind kind = Kind::Y;
  int index = 1;  // 1-based

  static VarId x(int i) { return {Kind::X, i}; }
  static VarId y(int i) { return {Kind::Y, i}; }
  int flat(int n) const { return (kind == Kind::X ? 0 : n) + index - 1; }
  static VarId from_flat(int f, int n) { return f < n ? x(f + 1) : y(f - n + 1); }
  std::string name() const { return (kind == Kind::X ? "x" : "y") + std::to_string(index); }
  friend bool operator==(const VarId&, const VarId&) = default;
};

class Node;
using NodePtr = std::shared_ptr<const Node>;

class Node {
 public:
  Op op;
  Number value;     // Constant payload, or the exponent of Pow
  VarId var;        // Variable payload
  std::vector<NodePtr> args;

  Node(Op o, Number v, VarId x, std::vector<NodePtr> a)
      : op(o), value(v), var(x), args(std::move(a)) {}
};

// Smart constructors. They fold constants and apply the local rules
// 0*u, 1*u, u^1, u^0, u+0, u-0, 0-u, u/1, 0/u, exp(0), ln(1).
NodePtr constant(Number v);
NodePtr constant(std::int64_t p, std::int64_t q = 1);
NodePtr variable(VarId v);
NodePtr add(NodePtr a, NodePtr b);
NodePtr sub(NodePtr a, NodePtr b);
NodePtr mul(NodePtr a, NodePtr b);
NodePtr div(NodePtr a, NodePtr b);
NodePtr neg(NodePtr a);
NodePtr pow(NodePtr a, Number exponent);
NodePtr exp(NodePtr a);
NodePtr ln(NodePtr a);

bool is_constant(const NodePtr& e, double v);
std::size_t node_count(const NodePtr& e);

/// Parse failure: byte offset into the input and the tokens that would have been accepted.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string found, std::vector<std::string> expected);
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t offset_;
  std::string found_;
  std::vector<std::string> expected_;
};

/// Unknown identifier or variable index outside 1..dim.
class VariableError : public std::runtime_error {
 public:
  VariableError(std::size_t offset, const std::string& msg)
      : std::runtime_error(msg), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside the expression's domain. subexpr is the printed offending node.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string subexpr)
      : std::runtime_error(what + ": " + subexpr), subexpr_(std::move(subexpr)) {}
  const std::string& subexpr() const { return subexpr_; }

 private:
  std::string subexpr_;
};

/// An immutable expression over x1..xn, y1..yn.
class EnergyExpr {
 public:
  EnergyExpr() = default;
  EnergyExpr(NodePtr root, int dim);

  const NodePtr& root() const { return root_; }
  int dim() const { return dim_; }
  std::string str() const;

 private:
  NodePtr root_;
  int dim_ = 0;
};

EnergyExpr parse_energy(const std::string& text, int dim);
NodePtr parse_expression(const std::string& text, int dim);

std::string print(const NodePtr& e);

EnergyExpr differentiate(const EnergyExpr& e, VarId var, int order = 1);
NodePtr differentiate(const NodePtr& e, VarId var);

/// Values ordered as x1..xn then y1..yn.
double evaluate(const EnergyExpr& e, const std::vector<double>& z);
double evaluate(const NodePtr& e, const std::vector<double>& z, int dim);

/// Horizontal field X = sum X^i h_i given by n coefficient expressions.
class FieldSpec {
 public:
  FieldSpec() = default;
  FieldSpec(std::vector<NodePtr> coefficients, int dim);

  int dim() const { return dim_; }
  const std::vector<NodePtr>& coefficients() const { return coeffs_; }
  std::vector<double> evaluate(const std::vector<double>& z) const;

  /// "e1,e2,...,en" with top-level commas separating coefficients.
  static FieldSpec parse(const std::string& text, int dim);
  /// The constant frame field h_i (1-based).
  static FieldSpec frame(int i, int dim);

 private:
  std::vector<NodePtr> coeffs_;
  int dim_ = 0;
};

}  // namespace finsler::dsl
