#include "finsler/core/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace finsler {

namespace {

Slot vs(Valence v = Valence::Down) { return {Frame::Vertical, v, 0}; }
Slot hs(Valence v = Valence::Down) { return {Frame::Horizontal, v, 0}; }
Slot cs(Valence v = Valence::Down) { return {Frame::Coordinate, v, 0}; }

TensorField make(const std::string& name, std::vector<Slot> slots, int dim) {
  for (auto& s : slots) s.dim = dim;
  return TensorField(name, std::move(slots));
}

constexpr Valence U = Valence::Up;

}  // namespace

TensorField values_of(const JetTensor& t, Frame frame) {
  std::vector<Slot> slots;
  for (auto v : t.valence) slots.push_back({frame, v, t.n});
  TensorField f(t.name, slots);
  for (std::size_t i = 0; i < t.data.size(); ++i) f.data()[i] = t.data[i].value();
  return f;
}

const TensorField& GeometryBundle::by_name(const std::string& name) const {
  if (name == "barthel") return barthel_curv;
  if (name == "spray") return spray;
  if (name == "gamma") return gamma;
  if (name == "R") return curv_R;
  if (name == "P") return curv_P;
  if (name == "Q") return curv_Q;
  if (name == "Rb0") return berwald_R;
  if (name == "Pb0") return berwald_P;
  if (name == "g") return g;
  if (name == "C") return cartan_C;
  if (name == "Cp") return cartan_Cp;
  if (name == "hbar") return hbar;
  throw std::invalid_argument("unknown tensor name '" + name + "'");
}

GeometryBundle bundle_from(const Pipeline& p) {
  const int n = p.n();
  GeometryBundle b;
  b.n = n;
  b.point = p.point();
  b.energy = p.E().value();
  b.cond_g = p.cond_g();
  b.cond_omega = p.cond_omega();

  b.omega = make("omega", {cs(), cs()}, 2 * n);
  b.omega.data() = p.omega();
  b.omega.declare({0, 1, true});

  b.g = make("g", {vs(), vs()}, n);
  b.g_inv = make("g_inv", {vs(U), vs(U)}, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      b.g(i, j) = p.g(i, j).value();
      b.g_inv(i, j) = p.ginv(i, j).value();
    }
  b.g.declare({0, 1, false});
  b.g_inv.declare({0, 1, false});

  b.spray = make("spray", {vs(U)}, n);
  for (int i = 0; i < n; ++i) b.spray(i) = p.G(i).value();
  b.spray_field = make("spray_field", {cs(U)}, 2 * n);
  b.spray_field.data() = p.spray_field();

  b.gamma = make("gamma", {vs(U), hs()}, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.gamma(i, j) = p.N(i, j).value();

  auto N = [&](int i, int j) { return p.N(i, j).value(); };
  b.g_full = make("g_full", {cs(), cs()}, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double xx = b.g(i, j), xy = 0.0;
      for (int m = 0; m < n; ++m) {
        xy += N(m, i) * b.g(m, j);
        for (int l = 0; l < n; ++l) xx += N(m, i) * N(l, j) * b.g(m, l);
      }
      b.g_full(i, j) = xx;
      b.g_full(i, n + j) = xy;
      b.g_full(n + j, i) = xy;
      b.g_full(n + i, n + j) = b.g(i, j);
    }
  b.g_full.declare({0, 1, false});

  b.proj_h = make("proj_h", {cs(U), cs()}, 2 * n);
  b.proj_v = make("proj_v", {cs(U), cs()}, 2 * n);
  b.J = make("J", {cs(U), cs()}, 2 * n);
  b.F_op = make("F", {cs(U), cs()}, 2 * n);
  for (int i = 0; i < n; ++i) {
    b.proj_h(i, i) = 1.0;
    for (int m = 0; m < n; ++m) b.proj_h(n + m, i) = -N(m, i);
    b.J(n + i, i) = 1.0;
    b.F_op(i, n + i) = 1.0;
    for (int m = 0; m < n; ++m) b.F_op(n + m, n + i) = -N(m, i);
    b.F_op(n + i, i) = -1.0;
    for (int m = 0; m < n; ++m) {
      b.F_op(m, i) += N(m, i);
      for (int l = 0; l < n; ++l) b.F_op(n + l, i) -= N(m, i) * N(l, m);
    }
  }
  for (int a = 0; a < 2 * n; ++a)
    for (int c = 0; c < 2 * n; ++c) b.proj_v(a, c) = (a == c ? 1.0 : 0.0) - b.proj_h(a, c);

  b.berwald_coeff = make("berwald_coeff", {vs(U), vs(), hs()}, n);
  b.barthel_curv = make("barthel_curv", {vs(U), hs(), hs()}, n);
  b.cartan_C = make("cartan_C", {vs(), vs(), vs()}, n);
  b.cartan_C_up = make("cartan_C_up", {vs(U), vs(), vs()}, n);
  b.cartan_Cp = make("cartan_Cp", {vs(), hs(), hs()}, n);
  b.cartan_Cp_up = make("cartan_Cp_up", {vs(U), hs(), hs()}, n);
  b.conn_h = make("conn_h", {vs(U), vs(), hs()}, n);
  b.conn_v = make("conn_v", {vs(U), vs(), vs()}, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        b.berwald_coeff(i, j, k) = p.B(i, j, k).value();
        b.barthel_curv(i, j, k) = p.Rb(i, j, k).value();
        b.cartan_C(i, j, k) = p.Cl(i, j, k).value();
        b.cartan_C_up(i, j, k) = p.C(i, j, k).value();
        b.cartan_Cp(i, j, k) = p.Cpl(i, j, k).value();
        b.cartan_Cp_up(i, j, k) = p.Cp(i, j, k).value();
        b.conn_h(i, j, k) = p.F(i, j, k).value();
        b.conn_v(i, j, k) = p.C(i, j, k).value();
      }
  b.berwald_coeff.declare({1, 2, false});
  b.barthel_curv.declare({1, 2, true});
  b.cartan_C.declare({0, 1, false}).declare({1, 2, false});
  b.cartan_C_up.declare({1, 2, false});
  b.cartan_Cp.declare({1, 2, false});
  b.cartan_Cp_up.declare({1, 2, false});
  b.conn_h.declare({1, 2, false});
  b.conn_v.declare({1, 2, false});

  auto four = [&](const std::string& name, const std::string& src, Frame fj, Frame fk) {
    TensorField t = make(name, {vs(U), vs(), {fj, Valence::Down, 0}, {fk, Valence::Down, 0}}, n);
    JetTensor jt = p.tensor(src);
    for (std::size_t i = 0; i < jt.data.size(); ++i) t.data()[i] = jt.data[i].value();
    return t;
  };
  b.curv_R = four("curv_R", "R", Frame::Horizontal, Frame::Horizontal);
  b.curv_R.declare({2, 3, true});
  b.curv_P = four("curv_P", "P", Frame::Horizontal, Frame::Vertical);
  b.curv_Q = four("curv_Q", "Q", Frame::Vertical, Frame::Vertical);
  b.curv_Q.declare({2, 3, true});
  b.berwald_R = four("berwald_R", "Rb0", Frame::Horizontal, Frame::Horizontal);
  b.berwald_R.declare({2, 3, true});
  b.berwald_P = four("berwald_P", "Pb0", Frame::Horizontal, Frame::Vertical);

  double two_e = 2.0 * b.energy;
  b.ell = make("ell", {vs()}, n);
  for (int i = 0; i < n; ++i) b.ell(i) = p.Ey(i).value() / std::sqrt(two_e);
  b.hbar = make("hbar", {vs(), vs()}, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.hbar(i, j) = b.g(i, j) - b.ell(i) * b.ell(j);
  b.hbar.declare({0, 1, false});
  double tr = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tr += b.g_inv(i, j) * b.hbar(i, j);
  b.hbar_trace_vertical = tr;

  Eigen::MatrixXd gf(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a)
    for (int c = 0; c < 2 * n; ++c) gf(a, c) = b.g_full(a, c);
  Eigen::VectorXd lt(2 * n);  // l(X) = g(X, C) / sqrt(2E) with C the Liouville field
  for (int a = 0; a < 2 * n; ++a) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += gf(a, n + j) * b.point.y[j];
    lt(a) = s / std::sqrt(two_e);
  }
  Eigen::MatrixXd hext = gf - lt * lt.transpose();
  b.hbar_trace_extended = gf.partialPivLu().solve(hext).trace();
  return b;
}

ChartPoint require_admissible(const dsl::EnergyExpr& e, const std::vector<double>& x, const std::vector<double>& y) {
  ChartPoint p = admit(e, x, y);
  if (!p.admissible) throw AdmissibilityError(p.reason);
  return p;
}

GeometryBundle compute_geometry(const dsl::EnergyExpr& e, const ChartPoint& z) { return bundle_from(Pipeline(e, z)); }

TensorField fundamental_form(const dsl::EnergyExpr& e, const ChartPoint& z) { return compute_geometry(e, z).omega; }
TensorField vertical_metric(const dsl::EnergyExpr& e, const ChartPoint& z) { return compute_geometry(e, z).g; }
TensorField canonical_spray(const dsl::EnergyExpr& e, const ChartPoint& z) { return compute_geometry(e, z).spray; }
TensorField barthel_connection(const dsl::EnergyExpr& e, const ChartPoint& z) { return compute_geometry(e, z).gamma; }
TensorField barthel_curvature(const dsl::EnergyExpr& e, const ChartPoint& z) {
  return compute_geometry(e, z).barthel_curv;
}

CartanTensors cartan_tensors(const dsl::EnergyExpr& e, const ChartPoint& z) {
  auto b = compute_geometry(e, z);
  return {b.cartan_C, b.cartan_C_up, b.cartan_Cp, b.cartan_Cp_up};
}

CartanConnection cartan_connection(const dsl::EnergyExpr& e, const ChartPoint& z) {
  auto b = compute_geometry(e, z);
  return {b.conn_h, b.conn_v};
}

Curvatures cartan_curvatures(const dsl::EnergyExpr& e, const ChartPoint& z) {
  auto b = compute_geometry(e, z);
  return {b.curv_R, b.curv_P, b.curv_Q};
}

BerwaldCurvatures berwald_curvatures(const dsl::EnergyExpr& e, const ChartPoint& z) {
  auto b = compute_geometry(e, z);
  return {b.berwald_R, b.berwald_P};
}

TensorField covariant_derivative(const dsl::EnergyExpr& e, const ChartPoint& z, const std::string& tensor,
                                 Direction d) {
  static const char* names[] = {"g", "C", "C_up", "Cp", "Cp_up", "barthel", "R", "P", "Q", "hbar"};
  bool ok = false;
  for (auto* nm : names) ok = ok || tensor == nm;
  if (!ok) throw std::invalid_argument("unsupported tensor name '" + tensor + "'");
  Pipeline p(e, z);
  if (d.index < 0 || d.index >= p.n()) throw std::invalid_argument("direction index out of range");
  JetTensor t = p.tensor(tensor);
  TensorField out = values_of(covariant(p, t, d.frame_index(p.n())));
  return out;
}

TensorField angular_metric(const dsl::EnergyExpr& e, const ChartPoint& z) { return compute_geometry(e, z).hbar; }

}  // namespace finsler
