#include "finsler/oracle/fd.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace finsler::oracle {

double default_step(int order, double c) {
  double eps = std::numeric_limits<double>::epsilon();
  return std::pow(eps, 1.0 / (order + 4)) * std::max(1.0, std::abs(c));
}

namespace {

double nested(const ScalarFn& f, const std::vector<int>& vars, std::size_t k, std::vector<double>& z,
              const std::vector<double>& h) {
  if (k == vars.size()) return f(z);
  int v = vars[k];
  double c = z[v];
  z[v] = c + h[k];
  double plus = nested(f, vars, k + 1, z, h);
  z[v] = c - h[k];
  double minus = nested(f, vars, k + 1, z, h);
  z[v] = c;
  return (plus - minus) / (2.0 * h[k]);
}

}  // namespace

FdEstimate fd_partial(const ScalarFn& f, const std::vector<int>& vars, const std::vector<double>& z, double step) {
  if (vars.empty()) return {f(z), 0.0};
  std::vector<double> h;
  for (int v : vars) h.push_back(step > 0 ? step : default_step(static_cast<int>(vars.size()), z.at(v)));
  std::vector<double> w = z;
  double coarse = nested(f, vars, 0, w, h);
  for (auto& s : h) s *= 0.5;
  double fine = nested(f, vars, 0, w, h);
  double rich = (4.0 * fine - coarse) / 3.0;
  return {rich, std::abs(rich - fine)};
}

FdEstimate fd_partial(const dsl::EnergyExpr& e, const std::vector<dsl::VarId>& vars, const ChartPoint& z,
                      double step) {
  std::vector<int> flat;
  for (const auto& v : vars) {
    if (v.index < 1 || v.index > e.dim()) throw std::invalid_argument("invalid variable " + v.name());
    flat.push_back(v.flat(e.dim()));
  }
  ScalarFn f = [&](const std::vector<double>& w) {
    try {
      return dsl::evaluate(e, w);
    } catch (const dsl::DomainError& err) {
      throw StencilError(std::string("stencil left the domain: ") + err.what());
    }
  };
  return fd_partial(f, flat, z.z(), step);
}

FdGeometry::FdGeometry(const dsl::EnergyExpr& e) : e_(e), n_(e.dim()) {
  using dsl::VarId;
  for (int i = 1; i <= n_; ++i) {
    ex_.push_back(dsl::differentiate(e.root(), VarId::x(i)));
    ey_.push_back(dsl::differentiate(e.root(), VarId::y(i)));
  }
  for (int i = 0; i < n_; ++i)
    for (int j = 1; j <= n_; ++j) {
      gyy_.push_back(dsl::differentiate(ey_[i], VarId::y(j)));
      gyx_.push_back(dsl::differentiate(ey_[i], VarId::x(j)));
    }
}

double FdGeometry::energy(const std::vector<double>& z) const { return dsl::evaluate(e_, z); }

std::vector<double> FdGeometry::g(const std::vector<double>& z) const {
  std::vector<double> out;
  for (const auto& t : gyy_) out.push_back(dsl::evaluate(t, z, n_));
  return out;
}

std::vector<double> FdGeometry::spray(const std::vector<double>& z) const {
  const int n = n_;
  Eigen::MatrixXd g(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    double r = dsl::evaluate(ex_[i], z, n);
    for (int j = 0; j < n; ++j) {
      g(i, j) = dsl::evaluate(gyy_[i * n + j], z, n);
      r -= z[n + j] * dsl::evaluate(gyx_[i * n + j], z, n);
    }
    rhs(i) = r;
  }
  Eigen::VectorXd b = g.partialPivLu().solve(rhs);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = -0.5 * b(i);
  return out;
}

std::vector<double> FdGeometry::barthel(const std::vector<double>& z, double step) const {
  const int n = n_;
  std::vector<double> out(n * n);
  for (int j = 0; j < n; ++j) {
    double h = step > 0 ? step : default_step(1, z[n + j]);
    std::vector<double> w = z;
    auto diff = [&](double hh) {
      w[n + j] = z[n + j] + hh;
      auto p = spray(w);
      w[n + j] = z[n + j] - hh;
      auto m = spray(w);
      w[n + j] = z[n + j];
      std::vector<double> d(n);
      for (int i = 0; i < n; ++i) d[i] = (p[i] - m[i]) / (2 * hh);
      return d;
    };
    auto c = diff(h), f = diff(h / 2);
    for (int i = 0; i < n; ++i) out[i * n + j] = (4 * f[i] - c[i]) / 3;
  }
  return out;
}

std::vector<double> FdGeometry::coordinates(const dsl::FieldSpec& f, const std::vector<double>& z,
                                            double step) const {
  const int n = n_;
  auto a = f.evaluate(z);
  auto N = barthel(z, step);
  std::vector<double> out(2 * n, 0.0);
  for (int i = 0; i < n; ++i) {
    out[i] = a[i];
    for (int m = 0; m < n; ++m) out[n + m] -= a[i] * N[m * n + i];
  }
  return out;
}

std::vector<double> fd_bracket(const dsl::EnergyExpr& e, const dsl::FieldSpec& a, const dsl::FieldSpec& b,
                               const ChartPoint& z, double step) {
  FdGeometry geo(e);
  const int d = 2 * e.dim();
  const auto z0 = z.z();
  auto field = [&](const dsl::FieldSpec& f, const std::vector<double>& w) {
    try {
      return geo.coordinates(f, w);
    } catch (const dsl::DomainError& err) {
      throw StencilError(std::string("stencil left the domain: ") + err.what());
    }
  };
  // jac[c][r] = d V^r / d z^c
  auto jacobian = [&](const dsl::FieldSpec& f) {
    std::vector<std::vector<double>> jac(d);
    for (int c = 0; c < d; ++c) {
      double h = step > 0 ? step : default_step(1, z0[c]);
      std::vector<double> w = z0;
      auto diff = [&](double hh) {
        w[c] = z0[c] + hh;
        auto p = field(f, w);
        w[c] = z0[c] - hh;
        auto m = field(f, w);
        w[c] = z0[c];
        std::vector<double> r(d);
        for (int k = 0; k < d; ++k) r[k] = (p[k] - m[k]) / (2 * hh);
        return r;
      };
      auto co = diff(h), fi = diff(h / 2);
      jac[c].resize(d);
      for (int k = 0; k < d; ++k) jac[c][k] = (4 * fi[k] - co[k]) / 3;
    }
    return jac;
  };
  auto va = field(a, z0), vb = field(b, z0);
  auto ja = jacobian(a), jb = jacobian(b);
  std::vector<double> out(d, 0.0);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) out[r] += jb[c][r] * va[c] - ja[c][r] * vb[c];
  return out;
}

}  // namespace finsler::oracle
