#pragma once

#include <string>
#include <vector>

#include "finsler/core/pipeline.hpp"
#include "finsler/core/tensor.hpp"
#include "finsler/oracle/fd.hpp"

namespace finsler::oracle {

/// Cartan connection from symbolic metric derivatives and the finite-difference Barthel connection.
class FdConnection {
 public:
  explicit FdConnection(const dsl::EnergyExpr& e);

  int dim() const { return n_; }
  /// Gamma_A^m_i for A in [0, 2n): F^m_iA for A < n, C^m_i(A-n) otherwise; layout [A][m][i]
  std::vector<double> cartan(const std::vector<double>& z) const;
  /// N^m_j, layout [m][j]
  std::vector<double> barthel(const std::vector<double>& z) const { return geo_.barthel(z); }

 private:
  int n_;
  FdGeometry geo_;
  std::vector<dsl::NodePtr> g_;                // E_yy, [a][b]
  std::vector<std::vector<dsl::NodePtr>> gx_;  // [c][a*n+b] d/dx_c
  std::vector<std::vector<dsl::NodePtr>> gy_;  // [c][a*n+b] d/dy_c
};

/// Curvature of the Cartan connection by nested central differences: "R", "P" or "Q" in the same stored
/// layout and sign as GeometryBundle::curv_R / curv_P / curv_Q.
TensorField fd_curvature(const dsl::EnergyExpr& e, const ChartPoint& z, const std::string& which);

}  // namespace finsler::oracle
