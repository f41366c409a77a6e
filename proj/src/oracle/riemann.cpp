#include "finsler/oracle/riemann.hpp"

#include <Eigen/Dense>

namespace finsler::oracle {

using dsl::NodePtr;
using dsl::VarId;

std::vector<NodePtr> quadratic_coefficients(const dsl::EnergyExpr& e) {
  const int n = e.dim();
  std::vector<NodePtr> out;
  for (int i = 1; i <= n; ++i) {
    NodePtr di = dsl::differentiate(e.root(), VarId::y(i));
    for (int j = 1; j <= n; ++j)
      out.push_back(dsl::mul(dsl::constant(1, 2), dsl::differentiate(di, VarId::y(j))));
  }
  return out;
}

namespace {

struct Metric {
  int n;
  Eigen::MatrixXd a, ainv;
  std::vector<Eigen::MatrixXd> da;                // da[c](i,j) = d_c a_ij
  std::vector<std::vector<Eigen::MatrixXd>> dda;  // dda[c][d](i,j)
};

Metric evaluate_metric(const std::vector<NodePtr>& a, int n, const std::vector<double>& x) {
  if (static_cast<int>(a.size()) != n * n) throw std::invalid_argument("coefficient matrix must be n x n");
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("x must have n coordinates");
  std::vector<double> z = x;
  z.resize(2 * n, 1.0);  // y is unused by x-only coefficients
  Metric m{n, Eigen::MatrixXd(n, n), {}, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd(n, n)),
           std::vector<std::vector<Eigen::MatrixXd>>(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd(n, n)))};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const NodePtr& e = a[i * n + j];
      m.a(i, j) = dsl::evaluate(e, z, n);
      for (int c = 0; c < n; ++c) {
        NodePtr dc = dsl::differentiate(e, VarId::x(c + 1));
        m.da[c](i, j) = dsl::evaluate(dc, z, n);
        for (int d = 0; d < n; ++d) m.dda[c][d](i, j) = dsl::evaluate(dsl::differentiate(dc, VarId::x(d + 1)), z, n);
      }
    }
  Eigen::LLT<Eigen::MatrixXd> llt(m.a);
  if (llt.info() != Eigen::Success || (m.a - m.a.transpose()).norm() > 1e-12 * m.a.norm())
    throw NotPositiveDefinite("coefficient matrix is not symmetric positive definite");
  m.ainv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return m;
}

// lowered symbols Gamma_{d,bc} = 1/2 (d_b a_dc + d_c a_db - d_d a_bc) and their derivatives along e
double lowered(const Metric& m, int d, int b, int c) {
  return 0.5 * (m.da[b](d, c) + m.da[c](d, b) - m.da[d](b, c));
}
double lowered_d(const Metric& m, int e, int d, int b, int c) {
  return 0.5 * (m.dda[b][e](d, c) + m.dda[c][e](d, b) - m.dda[d][e](b, c));
}

}  // namespace

TensorField christoffel(const std::vector<NodePtr>& a, int n, const std::vector<double>& x) {
  Metric m = evaluate_metric(a, n, x);
  TensorField g("christoffel", {{Frame::Coordinate, Valence::Up, n}, {Frame::Coordinate, Valence::Down, n},
                                {Frame::Coordinate, Valence::Down, n}});
  for (int p = 0; p < n; ++p)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0;
        for (int d = 0; d < n; ++d) s += m.ainv(p, d) * lowered(m, d, b, c);
        g(p, b, c) = s;
      }
  return g;
}

TensorField riemann_oracle(const std::vector<NodePtr>& a, int n, const std::vector<double>& x) {
  Metric m = evaluate_metric(a, n, x);
  // Gamma^p_bc and d_e Gamma^p_bc with d_e(a^-1) = -a^-1 (d_e a) a^-1
  std::vector<double> G(n * n * n), dG(n * n * n * n);
  auto gi = [&](int p, int b, int c) -> double& { return G[(p * n + b) * n + c]; };
  auto dgi = [&](int e, int p, int b, int c) -> double& { return dG[((e * n + p) * n + b) * n + c]; };
  for (int p = 0; p < n; ++p)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0;
        for (int d = 0; d < n; ++d) s += m.ainv(p, d) * lowered(m, d, b, c);
        gi(p, b, c) = s;
      }
  for (int e = 0; e < n; ++e) {
    Eigen::MatrixXd dinv = -m.ainv * m.da[e] * m.ainv;
    for (int p = 0; p < n; ++p)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double s = 0;
          for (int d = 0; d < n; ++d) s += dinv(p, d) * lowered(m, d, b, c) + m.ainv(p, d) * lowered_d(m, e, d, b, c);
          dgi(e, p, b, c) = s;
        }
  }
  TensorField r("riemann", {{Frame::Coordinate, Valence::Up, n}, {Frame::Coordinate, Valence::Down, n},
                            {Frame::Coordinate, Valence::Down, n}, {Frame::Coordinate, Valence::Down, n}});
  for (int p = 0; p < n; ++p)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = dgi(c, p, d, b) - dgi(d, p, c, b);
          for (int e = 0; e < n; ++e) s += gi(p, c, e) * gi(e, d, b) - gi(p, d, e) * gi(e, c, b);
          r(p, b, c, d) = s;
        }
  r.declare({2, 3, true});
  return r;
}

}  // namespace finsler::oracle
