#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/core/jet.hpp"
#include "finsler/core/tensor.hpp"
#include "finsler/dsl/expr.hpp"

namespace finsler {

/// A point z = (x, y) of TM minus the zero section in one chart.
struct ChartPoint {
  std::vector<double> x, y;
  bool admissible = false;
  std::string reason;

  int dim() const { return static_cast<int>(x.size()); }
  std::vector<double> z() const;
  static ChartPoint from_z(const std::vector<double>& z);
};

class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kDefaultCondLimit = 1e12;

/// Checks E > 0, y != 0, domain, and conditioning of g and the fundamental form.
ChartPoint admit(const dsl::EnergyExpr& e, std::vector<double> x, std::vector<double> y,
                 double cond_limit = kDefaultCondLimit);

enum class ConnectionKind { Cartan, Berwald };

/// Jet-valued tensor in the adapted frame; all slots have dimension n.
struct JetTensor {
  std::string name;
  std::vector<Valence> valence;
  int n = 0;
  std::vector<Jet> data;

  std::size_t index(const std::vector<int>& idx) const;
  Jet& at(const std::vector<int>& idx) { return data[index(idx)]; }
  const Jet& at(const std::vector<int>& idx) const { return data[index(idx)]; }
  std::vector<int> shape() const { return std::vector<int>(valence.size(), n); }
};

/// Every pipeline quantity as a truncated Taylor jet in the 2n chart variables.
/// Frame: h_j = d/dx_j - N^m_j d/dy_m (index A < n), v_k = d/dy_k (index A = n + k).
class Pipeline {
 public:
  static constexpr int kMinOrder = 5;

  Pipeline(const dsl::EnergyExpr& e, const ChartPoint& z, int order = kMinOrder,
           double cond_limit = kDefaultCondLimit);

  int n() const { return n_; }
  int order() const { return order_; }
  const ChartPoint& point() const { return point_; }
  const dsl::EnergyExpr& energy() const { return expr_; }
  const std::shared_ptr<const JetSpace>& space() const { return space_; }

  const Jet& E() const { return E_; }
  const Jet& Ex(int i) const { return Ex_[i]; }
  const Jet& Ey(int i) const { return Ey_[i]; }
  const Jet& g(int i, int j) const { return g_[i * n_ + j]; }
  const Jet& ginv(int i, int j) const { return ginv_[i * n_ + j]; }
  /// spray coefficients G^i, with S = y^i dx_i - 2 G^i dy_i
  const Jet& G(int i) const { return G_[i]; }
  /// Barthel coefficients N^i_j = dG^i/dy^j
  const Jet& N(int i, int j) const { return N_[i * n_ + j]; }
  /// Berwald coefficients G^i_jk = dN^i_j/dy^k
  const Jet& B(int i, int j, int k) const { return B_[(i * n_ + j) * n_ + k]; }
  /// curvature of the Barthel connection, R^i_jk = delta_k N^i_j - delta_j N^i_k
  const Jet& Rb(int i, int j, int k) const { return Rb_[(i * n_ + j) * n_ + k]; }
  /// first Cartan tensor lowered C_ijk = (1/2) dg_ij/dy^k and raised C^i_jk
  const Jet& Cl(int i, int j, int k) const { return Cl_[(i * n_ + j) * n_ + k]; }
  const Jet& C(int i, int j, int k) const { return C_[(i * n_ + j) * n_ + k]; }
  /// horizontal Cartan coefficients F^i_jk
  const Jet& F(int i, int j, int k) const { return F_[(i * n_ + j) * n_ + k]; }
  /// second Cartan tensor from the Lie-derivative formula, raised C'^i_jk and lowered C'_ijk
  const Jet& Cp(int i, int j, int k) const { return Cp_[(i * n_ + j) * n_ + k]; }
  const Jet& Cpl(int i, int j, int k) const { return Cpl_[(i * n_ + j) * n_ + k]; }

  Jet delta(const Jet& f, int j) const;
  /// e_A(f) for the adapted frame index A in [0, 2n)
  Jet frame_derivative(const Jet& f, int a) const;

  /// connection matrices Gamma_A^m_i with D_{e_A} v_i = Gamma_A^m_i v_m
  const Jet& conn(ConnectionKind k, int a, int m, int i) const;
  /// vertical components c^m_AB of [e_A, e_B]
  const Jet& structure(int a, int b, int m) const { return c_[((a * 2 * n_) + b) * n_ + m]; }
  /// K(e_A, e_B)^m_i, the curvature operator acting on v_i
  const Jet& curvature(ConnectionKind k, int a, int b, int m, int i) const;

  /// Named tensors in stored layout: g, C, Cp, barthel, R, P, Q, Rb0, Pb0, hbar
  JetTensor tensor(const std::string& name) const;

  double cond_g() const { return cond_g_; }
  double cond_omega() const { return cond_omega_; }
  /// 2n x 2n fundamental form, row-major, Omega_AB = Omega(d_A, d_B) in coordinates
  const std::vector<double>& omega() const { return omega_; }
  /// solution of i_S Omega = -dE in coordinates (2n)
  const std::vector<double>& spray_field() const { return spray_field_; }

 private:
  void build_connections();
  std::vector<Jet> curvature_of(ConnectionKind k) const;

  dsl::EnergyExpr expr_;
  ChartPoint point_;
  int n_, order_;
  std::shared_ptr<const JetSpace> space_;
  Jet E_;
  std::vector<Jet> Ex_, Ey_, g_, ginv_, G_, N_, B_, Rb_, Cl_, C_, F_, Cp_, Cpl_;
  std::vector<Jet> conn_cartan_, conn_berwald_, c_;
  std::vector<Jet> K_cartan_, K_berwald_;
  std::vector<double> omega_, spray_field_;
  double cond_g_ = 0, cond_omega_ = 0;
};

/// D_{e_A} T for a frame tensor T using the given connection.
JetTensor covariant(const Pipeline& p, const JetTensor& t, int a, ConnectionKind k = ConnectionKind::Cartan);

}  // namespace finsler
