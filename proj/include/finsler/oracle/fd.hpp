#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "finsler/core/pipeline.hpp"
#include "finsler/dsl/expr.hpp"

namespace finsler::oracle {

struct FdEstimate {
  double value = 0;
  double error = 0;  // |Richardson - fine-step estimate|
};

/// A stencil point left the expression's domain.
class StencilError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default step for a derivative of the given total order at coordinate value c.
double default_step(int order, double c);

using ScalarFn = std::function<double(const std::vector<double>&)>;

/// Nested central differences with one Richardson step (h, h/2).
/// vars are flat indices into z; step <= 0 selects default_step per variable.
FdEstimate fd_partial(const ScalarFn& f, const std::vector<int>& vars, const std::vector<double>& z,
                      double step = 0.0);
FdEstimate fd_partial(const dsl::EnergyExpr& e, const std::vector<dsl::VarId>& vars, const ChartPoint& z,
                      double step = 0.0);

/// Spray and Barthel coefficients assembled from symbolic second derivatives of E,
/// a dense linear solve, and finite differences; shares nothing with the jet pipeline.
class FdGeometry {
 public:
  explicit FdGeometry(const dsl::EnergyExpr& e);
  int n() const { return n_; }
  double energy(const std::vector<double>& z) const;
  std::vector<double> g(const std::vector<double>& z) const;
  /// G^i with S = y^i d/dx_i - 2 G^i d/dy_i
  std::vector<double> spray(const std::vector<double>& z) const;
  /// N^i_j = dG^i/dy^j by central differences, row-major
  std::vector<double> barthel(const std::vector<double>& z, double step = 0.0) const;
  /// coordinate components of X = sum X^i h_i for a field spec
  std::vector<double> coordinates(const dsl::FieldSpec& f, const std::vector<double>& z, double step = 0.0) const;

 private:
  dsl::EnergyExpr e_;
  int n_;
  std::vector<dsl::NodePtr> ex_, ey_, gyy_, gyx_;  // E_xi, E_yi, E_yiyj, E_yixj
};

/// [A, B] at z in coordinates (2n), from central-difference Jacobians of the coordinate fields.
std::vector<double> fd_bracket(const dsl::EnergyExpr& e, const dsl::FieldSpec& a, const dsl::FieldSpec& b,
                               const ChartPoint& z, double step = 0.0);

}  // namespace finsler::oracle
