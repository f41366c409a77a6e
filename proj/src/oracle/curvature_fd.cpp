#include "finsler/oracle/curvature_fd.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace finsler::oracle {

using dsl::VarId;

FdConnection::FdConnection(const dsl::EnergyExpr& e) : n_(e.dim()), geo_(e) {
  const int n = n_;
  gx_.resize(n);
  gy_.resize(n);
  for (int a = 1; a <= n; ++a) {
    auto ea = dsl::differentiate(e.root(), VarId::y(a));
    for (int b = 1; b <= n; ++b) {
      auto gab = dsl::differentiate(ea, VarId::y(b));
      g_.push_back(gab);
      for (int c = 1; c <= n; ++c) {
        gx_[c - 1].push_back(dsl::differentiate(gab, VarId::x(c)));
        gy_[c - 1].push_back(dsl::differentiate(gab, VarId::y(c)));
      }
    }
  }
}

std::vector<double> FdConnection::cartan(const std::vector<double>& z) const {
  const int n = n_;
  auto ev = [&](const dsl::NodePtr& f) {
    try {
      return dsl::evaluate(f, z, n);
    } catch (const dsl::DomainError& err) {
      throw StencilError(std::string("stencil left the domain: ") + err.what());
    }
  };
  Eigen::MatrixXd g(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g(a, b) = ev(g_[a * n + b]);
  Eigen::MatrixXd gi = g.inverse();
  std::vector<double> N = geo_.barthel(z);
  std::vector<Eigen::MatrixXd> dy(n, Eigen::MatrixXd(n, n)), delta(n, Eigen::MatrixXd(n, n));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) dy[c](a, b) = ev(gy_[c][a * n + b]);
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = ev(gx_[j][a * n + b]);
        for (int p = 0; p < n; ++p) s -= N[p * n + j] * dy[p](a, b);
        delta[j](a, b) = s;
      }
  std::vector<double> out(2 * n * n * n, 0.0);
  auto at = [&](int a, int m, int i) -> double& { return out[(a * n + m) * n + i]; };
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i) {
        double f = 0, c = 0;
        for (int l = 0; l < n; ++l) {
          f += 0.5 * gi(m, l) * (delta[i](l, k) + delta[k](i, l) - delta[l](i, k));
          c += 0.5 * gi(m, l) * dy[k](l, i);
        }
        at(k, m, i) = f;
        at(n + k, m, i) = c;
      }
  return out;
}

namespace {

// derivative of f along direction u at z, central differences plus one Richardson step
std::vector<double> directional(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                                const std::vector<double>& z, const std::vector<double>& u) {
  double scale = 1.0;
  for (double c : z) scale = std::max(scale, std::abs(c));
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0) * scale;
  auto diff = [&](double hh) {
    std::vector<double> zp = z, zm = z;
    for (std::size_t i = 0; i < z.size(); ++i) {
      zp[i] += hh * u[i];
      zm[i] -= hh * u[i];
    }
    auto a = f(zp), b = f(zm);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] - b[i]) / (2 * hh);
    return a;
  };
  auto c = diff(h), fi = diff(h / 2);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (4 * fi[i] - c[i]) / 3;
  return c;
}

}  // namespace

TensorField fd_curvature(const dsl::EnergyExpr& e, const ChartPoint& z, const std::string& which) {
  if (which != "R" && which != "P" && which != "Q") throw std::invalid_argument("fd_curvature: unknown '" + which + "'");
  FdConnection con(e);
  const int n = e.dim(), d = 2 * n;
  const auto z0 = z.z();
  const auto N = con.barthel(z0);
  const auto gam = con.cartan(z0);
  // coordinate vectors of the adapted frame at z
  std::vector<std::vector<double>> frame(d, std::vector<double>(d, 0.0));
  for (int j = 0; j < n; ++j) {
    frame[j][j] = 1.0;
    for (int m = 0; m < n; ++m) frame[j][n + m] = -N[m * n + j];
    frame[n + j][n + j] = 1.0;
  }
  // dN[c][m*n+j] = dN^m_j / dz^c
  std::vector<std::vector<double>> dN(d);
  for (int c = 0; c < d; ++c) {
    std::vector<double> u(d, 0.0);
    u[c] = 1.0;
    dN[c] = directional([&](const std::vector<double>& w) { return con.barthel(w); }, z0, u);
  }
  // Berwald coefficients and Barthel curvature
  auto Bc = [&](int m, int j, int k) { return dN[n + k][m * n + j]; };
  auto deltaN = [&](int m, int j, int k) {  // delta_k N^m_j
    double s = dN[k][m * n + j];
    for (int q = 0; q < n; ++q) s -= N[q * n + k] * dN[n + q][m * n + j];
    return s;
  };
  auto structure = [&](int a, int b, int p) -> double {
    if (a < n && b < n) return deltaN(p, a, b) - deltaN(p, b, a);
    if (a < n && b >= n) return Bc(p, a, b - n);
    if (a >= n && b < n) return -Bc(p, b, a - n);
    return 0.0;
  };
  std::vector<std::vector<double>> dgam(d);  // dgam[a] = e_a(Gamma) for all B, m, i
  for (int a = 0; a < d; ++a)
    dgam[a] = directional([&](const std::vector<double>& w) { return con.cartan(w); }, z0, frame[a]);
  auto G = [&](int a, int m, int i) { return gam[(a * n + m) * n + i]; };
  auto dG = [&](int a, int b, int m, int i) { return dgam[a][(b * n + m) * n + i]; };
  auto K = [&](int a, int b, int m, int i) {
    double s = dG(a, b, m, i) - dG(b, a, m, i);
    for (int l = 0; l < n; ++l) s += G(a, m, l) * G(b, l, i) - G(b, m, l) * G(a, l, i);
    for (int p = 0; p < n; ++p) s -= structure(a, b, p) * G(n + p, m, i);
    return s;
  };
  std::vector<Slot> slots = {{Frame::Horizontal, Valence::Up, n},
                             {Frame::Horizontal, Valence::Down, n},
                             {Frame::Horizontal, Valence::Down, n},
                             {Frame::Horizontal, Valence::Down, n}};
  TensorField t(which, slots);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          if (which == "R") t(m, i, j, k) = -K(j, k, m, i);
          if (which == "P") t(m, i, j, k) = -K(j, n + k, m, i);
          if (which == "Q") t(m, i, j, k) = K(n + j, n + k, m, i);
        }
  return t;
}

}  // namespace finsler::oracle
