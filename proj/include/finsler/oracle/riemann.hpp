#pragma once

#include <stdexcept>
#include <vector>

#include "finsler/core/tensor.hpp"
#include "finsler/dsl/expr.hpp"

namespace finsler::oracle {

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// a_ij = (1/2) d^2E/dy^i dy^j, row-major; x-only for a quadratic energy.
std::vector<dsl::NodePtr> quadratic_coefficients(const dsl::EnergyExpr& e);

/// Christoffel symbols Gamma^a_bc of a(x) at x, layout [a][b][c].
TensorField christoffel(const std::vector<dsl::NodePtr>& a, int n, const std::vector<double>& x);

/// Classical Riemann tensor R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb,
/// i.e. R(d_c, d_d) d_b = R^a_bcd d_a. Requires a(x) symmetric positive definite.
TensorField riemann_oracle(const std::vector<dsl::NodePtr>& a, int n, const std::vector<double>& x);

}  // namespace finsler::oracle
