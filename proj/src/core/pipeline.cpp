#include "finsler/core/pipeline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "finsler/dsl/eval.hpp"

namespace finsler {

std::vector<double> ChartPoint::z() const {
  std::vector<double> out = x;
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

ChartPoint ChartPoint::from_z(const std::vector<double>& z) {
  if (z.size() % 2 != 0) throw std::invalid_argument("point needs 2n coordinates");
  ChartPoint p;
  std::size_t n = z.size() / 2;
  p.x.assign(z.begin(), z.begin() + n);
  p.y.assign(z.begin() + n, z.end());
  return p;
}

namespace {

Jet energy_jet(const dsl::EnergyExpr& e, const std::vector<double>& z, const std::shared_ptr<const JetSpace>& sp) {
  return dsl::evaluate_as<Jet>(
      *e.root(), [&](int i) { return Jet::variable(sp, i, z[i]); }, [&](double c) { return Jet::constant(sp, c); },
      e.dim());
}

double condition(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  double lo = s(s.size() - 1);
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

struct Basic {
  std::string reason;
  Eigen::MatrixXd g, omega;
  double cond_g = 0, cond_omega = 0;
};

// Ey: first y-partials of E as jets of order >= 2.
Basic basic_checks(const Jet& E, const std::vector<Jet>& Ey, const std::vector<double>& y,
                   int n, double cond_limit) {
  Basic b;
  bool nonzero = false;
  for (double v : y) nonzero = nonzero || v != 0.0;
  if (!nonzero) {
    b.reason = "y is the zero vector";
    return b;
  }
  if (!std::isfinite(E.value())) {
    b.reason = "E is not finite";
    return b;
  }
  if (!(E.value() > 0.0)) {
    b.reason = "E is not positive";
    return b;
  }
  b.g.resize(n, n);
  b.omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      b.g(i, j) = Ey[i].partial(n + j).value();
      double exy = Ey[j].partial(i).value() - Ey[i].partial(j).value();  // E_{y_j x_i} - E_{y_i x_j}
      b.omega(i, j) = exy;
      b.omega(i, n + j) = -b.g(i, j);
      b.omega(n + i, j) = b.g(i, j);
    }
  }
  if (!b.g.allFinite() || !b.omega.allFinite()) {
    b.reason = "non-finite second derivatives";
    return b;
  }
  b.cond_g = condition(b.g);
  b.cond_omega = condition(b.omega);
  if (!(b.cond_g <= cond_limit)) {
    b.reason = "vertical metric is singular or ill-conditioned (cond " + std::to_string(b.cond_g) + ")";
    return b;
  }
  if (!(b.cond_omega <= cond_limit)) {
    b.reason = "fundamental form is degenerate (cond " + std::to_string(b.cond_omega) + ")";
    return b;
  }
  return b;
}

}  // namespace

ChartPoint admit(const dsl::EnergyExpr& e, std::vector<double> x, std::vector<double> y, double cond_limit) {
  ChartPoint p;
  p.x = std::move(x);
  p.y = std::move(y);
  int n = e.dim();
  if (p.dim() != n || static_cast<int>(p.y.size()) != n) {
    p.reason = "point dimension does not match energy dimension";
    return p;
  }
  auto sp = jet_space(2 * n, 2);
  try {
    auto z = p.z();
    Jet E = energy_jet(e, z, sp);
    std::vector<Jet> Ey;
    for (int i = 0; i < n; ++i) Ey.push_back(E.partial(n + i));
    Basic b = basic_checks(E, Ey, p.y, n, cond_limit);
    p.reason = b.reason;
  } catch (const dsl::DomainError& err) {
    p.reason = std::string("domain violation: ") + err.what();
  }
  p.admissible = p.reason.empty();
  return p;
}

std::size_t JetTensor::index(const std::vector<int>& idx) const {
  std::size_t o = 0;
  for (int v : idx) o = o * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
  return o;
}

Pipeline::Pipeline(const dsl::EnergyExpr& e, const ChartPoint& z, int order, double cond_limit)
    : expr_(e), point_(z), n_(e.dim()), order_(order) {
  const int n = n_;
  if (order < kMinOrder) throw std::invalid_argument("pipeline order must be at least 5");
  if (z.dim() != n || static_cast<int>(z.y.size()) != n)
    throw AdmissibilityError("point dimension does not match energy dimension");
  space_ = jet_space(2 * n, order);
  const auto zz = z.z();
  try {
    E_ = energy_jet(e, zz, space_);
  } catch (const dsl::DomainError& err) {
    throw AdmissibilityError(std::string("domain violation: ") + err.what());
  }
  for (int i = 0; i < n; ++i) {
    Ex_.push_back(E_.partial(i));
    Ey_.push_back(E_.partial(n + i));
  }
  Basic b = basic_checks(E_, Ey_, z.y, n, cond_limit);
  if (!b.reason.empty()) throw AdmissibilityError(b.reason);
  point_.admissible = true;
  point_.reason.clear();
  cond_g_ = b.cond_g;
  cond_omega_ = b.cond_omega;
  {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> om = b.omega;
    omega_.assign(om.data(), om.data() + 4 * n * n);
    Eigen::VectorXd dE(2 * n);
    for (int i = 0; i < n; ++i) {
      dE(i) = Ex_[i].value();
      dE(n + i) = Ey_[i].value();
    }
    // i_S Omega = -dE  <=>  sum_A S^A Omega_AB = -dE_B
    Eigen::VectorXd s = b.omega.transpose().partialPivLu().solve(-dE);
    spray_field_.assign(s.data(), s.data() + 2 * n);
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g_.push_back(Ey_[i].partial(n + j));
  ginv_ = jet_inverse(g_, n);

  std::vector<Jet> Y;
  for (int j = 0; j < n; ++j) Y.push_back(Jet::variable(space_, n + j, z.y[j]));
  std::vector<Jet> rhs;
  for (int i = 0; i < n; ++i) {
    Jet r = Ex_[i];
    for (int j = 0; j < n; ++j) r -= Y[j] * Ey_[i].partial(j);
    rhs.push_back(r);
  }
  for (int i = 0; i < n; ++i) {
    Jet s = ginv(i, 0) * rhs[0];
    for (int j = 1; j < n; ++j) s += ginv(i, j) * rhs[j];
    G_.push_back(-0.5 * s);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) N_.push_back(G_[i].partial(n + j));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) B_.push_back(N(i, j).partial(n + k));

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) Rb_.push_back(delta(N(i, j), k) - delta(N(i, k), j));

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) Cl_.push_back(0.5 * g(i, j).partial(n + k));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet s = ginv(i, 0) * Cl(0, j, k);
        for (int l = 1; l < n; ++l) fma_into(s, ginv(i, l), Cl(l, j, k));
        C_.push_back(s);
      }

  std::vector<Jet> dg;  // dg[(l*n+k)*n+j] = delta_j g_lk
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) dg.push_back(delta(g(l, k), j));
  auto DG = [&](int l, int k, int j) -> const Jet& { return dg[(l * n + k) * n + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet s;
        for (int l = 0; l < n; ++l) {
          Jet t = DG(l, k, j) + DG(j, l, k) - DG(j, k, l);
          if (l == 0)
            s = ginv(i, l) * t;
          else
            fma_into(s, ginv(i, l), t);
        }
        F_.push_back(0.5 * s);
      }

  // (1/2)(L_{h_k} g)(v_i, v_j) = g_mj C'^m_ki
  std::vector<Jet> lw;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet s = delta(g(i, j), k);
        for (int m = 0; m < n; ++m) {
          s -= B(m, k, i) * g(m, j);
          s -= B(m, k, j) * g(i, m);
        }
        lw.push_back(0.5 * s);
      }
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        Jet s = ginv(m, 0) * lw[(k * n + i) * n + 0];
        for (int j = 1; j < n; ++j) fma_into(s, ginv(m, j), lw[(k * n + i) * n + j]);
        Cp_.push_back(s);
      }
  for (int w = 0; w < n; ++w)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) Cpl_.push_back(lw[(k * n + i) * n + w]);

  build_connections();
}

Jet Pipeline::delta(const Jet& f, int j) const {
  Jet r = f.partial(j);
  for (int m = 0; m < n_; ++m) r -= N(m, j) * f.partial(n_ + m);
  return r;
}

Jet Pipeline::frame_derivative(const Jet& f, int a) const {
  if (a < n_) return delta(f, a);
  return f.partial(a);
}

const Jet& Pipeline::conn(ConnectionKind k, int a, int m, int i) const {
  const auto& v = k == ConnectionKind::Cartan ? conn_cartan_ : conn_berwald_;
  return v[(a * n_ + m) * n_ + i];
}

const Jet& Pipeline::curvature(ConnectionKind k, int a, int b, int m, int i) const {
  const auto& v = k == ConnectionKind::Cartan ? K_cartan_ : K_berwald_;
  return v[((a * 2 * n_ + b) * n_ + m) * n_ + i];
}

void Pipeline::build_connections() {
  const int n = n_;
  Jet zero_b = Jet::constant(space_, 0.0, B(0, 0, 0).order());
  for (int a = 0; a < 2 * n; ++a)
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i) {
        if (a < n) {
          conn_cartan_.push_back(F(m, i, a));
          conn_berwald_.push_back(B(m, i, a));
        } else {
          conn_cartan_.push_back(C(m, i, a - n));
          conn_berwald_.push_back(zero_b);
        }
      }
  Jet zero_c = Jet::constant(space_, 0.0, Rb(0, 0, 0).order());
  c_.assign(static_cast<std::size_t>(4 * n * n * n), zero_c);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m) {
        c_[((j * 2 * n) + k) * n + m] = Rb(m, j, k);
        c_[((j * 2 * n) + n + k) * n + m] = B(m, j, k);
        c_[(((n + j) * 2 * n) + k) * n + m] = -B(m, k, j);
      }
  K_cartan_ = curvature_of(ConnectionKind::Cartan);
  K_berwald_ = curvature_of(ConnectionKind::Berwald);
}

std::vector<Jet> Pipeline::curvature_of(ConnectionKind kind) const {
  const int n = n_, d = 2 * n;
  std::vector<std::vector<Jet>> dgam(static_cast<std::size_t>(d * d));  // dgam[a*d+b] = e_a(Gamma_b)
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      if (a == b) continue;
      auto& v = dgam[a * d + b];
      for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i) v.push_back(frame_derivative(conn(kind, b, m, i), a));
    }
  std::vector<Jet> K(static_cast<std::size_t>(d * d * n * n));
  int ord = dgam[1][0].order();
  for (int a = 0; a < d; ++a) {
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i) K[((a * d + a) * n + m) * n + i] = Jet::constant(space_, 0.0, ord);
    for (int b = a + 1; b < d; ++b)
      for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i) {
          Jet s = dgam[a * d + b][m * n + i] - dgam[b * d + a][m * n + i];
          for (int l = 0; l < n; ++l) {
            fma_into(s, conn(kind, a, m, l), conn(kind, b, l, i));
            fma_into(s, -conn(kind, b, m, l), conn(kind, a, l, i));
          }
          for (int p = 0; p < n; ++p) fma_into(s, -structure(a, b, p), conn(kind, n + p, m, i));
          K[((a * d + b) * n + m) * n + i] = s;
          K[((b * d + a) * n + m) * n + i] = -s;
        }
  }
  return K;
}

JetTensor Pipeline::tensor(const std::string& name) const {
  const int n = n_;
  JetTensor t;
  t.name = name;
  t.n = n;
  const Valence U = Valence::Up, D = Valence::Down;
  auto fill3 = [&](auto&& f) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) t.data.push_back(f(i, j, k));
  };
  auto fill4 = [&](auto&& f) {
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) t.data.push_back(f(h, i, j, k));
  };
  if (name == "g") {
    t.valence = {D, D};
    t.data = g_;
  } else if (name == "hbar") {
    t.valence = {D, D};
    Jet two_e = 2.0 * E_;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t.data.push_back(g(i, j) - Ey_[i] * Ey_[j] / two_e);
  } else if (name == "C") {
    t.valence = {D, D, D};
    t.data = Cl_;
  } else if (name == "C_up") {
    t.valence = {U, D, D};
    t.data = C_;
  } else if (name == "Cp") {
    t.valence = {D, D, D};
    t.data = Cpl_;
  } else if (name == "Cp_up") {
    t.valence = {U, D, D};
    t.data = Cp_;
  } else if (name == "barthel") {
    t.valence = {U, D, D};
    t.data = Rb_;
  } else if (name == "R" || name == "Rb0") {
    auto k = name == "R" ? ConnectionKind::Cartan : ConnectionKind::Berwald;
    t.valence = {U, D, D, D};
    fill4([&](int h, int i, int j, int kk) { return -curvature(k, j, kk, h, i); });
  } else if (name == "P" || name == "Pb0") {
    auto k = name == "P" ? ConnectionKind::Cartan : ConnectionKind::Berwald;
    t.valence = {U, D, D, D};
    fill4([&](int h, int i, int j, int kk) { return -curvature(k, j, n + kk, h, i); });
  } else if (name == "Q") {
    t.valence = {U, D, D, D};
    fill4([&](int h, int i, int j, int kk) { return curvature(ConnectionKind::Cartan, n + j, n + kk, h, i); });
  } else if (name == "F") {
    t.valence = {U, D, D};
    fill3([&](int i, int j, int k) { return F(i, j, k); });
  } else {
    throw std::invalid_argument("unsupported tensor name '" + name + "'");
  }
  return t;
}

JetTensor covariant(const Pipeline& p, const JetTensor& t, int a, ConnectionKind kind) {
  const int n = t.n;
  JetTensor out;
  out.name = "D" + t.name;
  out.valence = t.valence;
  out.n = n;
  out.data.reserve(t.data.size());
  const int r = static_cast<int>(t.valence.size());
  for_each_index(t.shape(), [&](const std::vector<int>& idx) {
    Jet s = p.frame_derivative(t.at(idx), a);
    auto sw = idx;
    for (int slot = 0; slot < r; ++slot) {
      for (int m = 0; m < n; ++m) {
        sw[slot] = m;
        if (t.valence[slot] == Valence::Up)
          fma_into(s, p.conn(kind, a, idx[slot], m), t.at(sw));
        else
          fma_into(s, -p.conn(kind, a, m, idx[slot]), t.at(sw));
      }
      sw[slot] = idx[slot];
    }
    out.data.push_back(s);
  });
  return out;
}

}  // namespace finsler
