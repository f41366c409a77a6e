#include "finsler/nullity/identities.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <stdexcept>
#include <thread>

#include "common.hpp"
#include "finsler/core/geometry.hpp"
#include "finsler/nullity/bracket.hpp"

namespace finsler::nullity {

namespace {

constexpr double kFloor = 1e-8;

enum class Kind { Residual, Kernel, Flag, Observation };

struct Spec {
  const char* name;
  const char* statement;
  Kind kind;
  bool deep;
};

const std::vector<Spec>& specs() {
  static const std::vector<Spec> s = {
      {"euler", "y^i y^j g_ij = 2E and y^i dE/dy^i = 2E", Kind::Residual, false},
      {"spray_homogeneity", "y^j N^i_j = 2 G^i", Kind::Residual, false},
      {"connection_homogeneity", "y^k G^i_jk = N^i_j", Kind::Residual, false},
      {"conservative", "d_h E = 0", Kind::Residual, false},
      {"torsion", "weak torsion B^i_jk - B^i_kj = 0 and F^i_jk = F^i_kj", Kind::Residual, false},
      {"liouville", "J S = C", Kind::Residual, false},
      {"extended_metric", "g(X,Y) = Omega(X,FY)", Kind::Residual, false},
      {"cartan_spray", "C(X,S) = 0 and C'(X,S) = 0", Kind::Residual, false},
      {"second_cartan_routes", "Lie-derivative C' equals F - B", Kind::Residual, false},
      {"metric_compatible", "D g = 0", Kind::Residual, false},
      {"r_on_spray", "R(X,Y)S = Rb(X,Y)", Kind::Residual, false},
      {"p_on_spray", "P(X,Y)S = C'(X,Y)", Kind::Residual, false},
      {"p_spray_slots", "P(S,X)Y = P(X,S)Y = 0", Kind::Residual, false},
      {"q_spray_slots", "Q(S,X)Y = Q(X,S)Y = Q(X,Y)S = 0", Kind::Residual, false},
      {"q_cartan_form", "Q(X,Y)Z = C(FC(X,Z),Y) - C(FC(Y,Z),X)", Kind::Residual, false},
      {"bianchi_a", "cyclic R(X,Y)Z = cyclic C(F Rb(X,Y),Z)", Kind::Residual, false},
      {"bianchi_b", "cyclic Q(X,Y)Z = 0", Kind::Residual, false},
      {"bianchi_c", "C(F Rb(X,Y),Z) = Rb(FC(X,Z),Y) - Rb(FC(Y,Z),X)", Kind::Residual, false},
      {"bianchi_h", "cyclic (D_JX Q)(Y,Z) = 0", Kind::Residual, false},
      {"barthel_bracket", "Rb(X,Y) = -v[hX,hY]", Kind::Residual, false},
      {"berwald_spray", "Berwald R(X,Y)S = Rb(X,Y)", Kind::Residual, false},
      {"kernel_basis", "||A v|| <= 10 tol ||A|| ||v|| for every reported basis vector", Kind::Kernel, false},
      {"nullity_inclusion", "N_R is contained in N_Rb (sine of largest principal angle)", Kind::Residual, false},
      {"r_kernel_reduction", "Z in N_R implies R(X,Y)Z = C(F Rb(X,Y),Z)", Kind::Residual, false},
      {"spray_in_nr_flat_barthel", "S in N_R implies Rb = 0", Kind::Flag, false},
      {"spray_in_np", "S in N_P", Kind::Residual, false},
      {"np_kills_cp", "X in N_P implies C'(X,Y) = 0", Kind::Residual, false},
      {"spray_in_nq", "S in N_Q", Kind::Residual, false},
      {"nq_kills_q", "Z in N_Q implies Q(X,Y)Z = 0", Kind::Residual, false},
      {"nr_nonzero", "N_R is nonzero", Kind::Observation, false},
      {"np_nonzero", "N_P is nonzero", Kind::Observation, false},
      {"nq_nonzero", "N_Q is nonzero", Kind::Observation, false},
      {"r_decomposition", "R = Berwald R + D_h C' terms + C'C' terms + C(F Rb)", Kind::Residual, true},
      {"p_decomposition", "P = Berwald P + D_h C - D_J C' + C C' terms", Kind::Residual, true},
      {"bianchi_d", "cyclic (D_hX Rb)(Y,Z) = cyclic C'(F Rb(X,Y),Z)", Kind::Residual, true},
      {"bianchi_e", "cyclic (D_hX R)(Y,Z) = cyclic P(X, F Rb(Y,Z))", Kind::Residual, true},
      {"bianchi_f", "(D_hX P)(Y,Z) - (D_hY P)(X,Z) + (D_JZ R)(X,Y) = ...", Kind::Residual, true},
      {"bianchi_g", "(D_hX Q)(Y,Z) - (D_JY P)(X,Z) + (D_JZ P)(X,Y) = ...", Kind::Residual, true},
  };
  return s;
}

struct Terms {
  double diff = 0, scale = 0;
  void add(double t) {
    diff += t;
    scale = std::max(scale, std::abs(t));
  }
  void sub(double t) { add(-t); }
};

/// max |lhs - rhs| / max(term scale, floor) over all multi-indices of the given rank
template <class F>
double residual(int rank, int n, F&& f, double floor = kFloor) {
  double worst = 0, scale = 0;
  for_each_index(std::vector<int>(rank, n), [&](const std::vector<int>& idx) {
    Terms t;
    f(idx, t);
    worst = std::max(worst, std::abs(t.diff));
    scale = std::max(scale, t.scale);
  });
  return worst / std::max({scale, floor, kFloor});
}

using Results = std::map<std::string, double>;

Results evaluate_point(const dsl::EnergyExpr& e, const ChartPoint& z, bool deep, double kernel_tol) {
  Results out;
  Pipeline p(e, z);
  const GeometryBundle b = bundle_from(p);
  const int n = p.n(), d = 2 * n;
  const auto o = detail::operators(p);
  const auto& y = o.y;
  const auto& R = o.R;
  const auto& P = o.P;
  const auto& Q = o.Q;
  const auto& Rb = o.Rb;
  const auto& C = o.C;
  const auto& Cp = o.Cp;
  auto v = [](const Jet& j) { return j.value(); };

  out["euler"] = std::max(residual(0, n,
                                   [&](const std::vector<int>&, Terms& t) {
                                     for (int i = 0; i < n; ++i)
                                       for (int j = 0; j < n; ++j) t.add(y[i] * y[j] * v(p.g(i, j)));
                                     t.sub(2 * v(p.E()));
                                   }),
                          residual(0, n, [&](const std::vector<int>&, Terms& t) {
                            for (int i = 0; i < n; ++i) t.add(y[i] * v(p.Ey(i)));
                            t.sub(2 * v(p.E()));
                          }));
  out["spray_homogeneity"] = residual(1, n, [&](const std::vector<int>& ix, Terms& t) {
    for (int j = 0; j < n; ++j) t.add(y[j] * v(p.N(ix[0], j)));
    t.sub(2 * v(p.G(ix[0])));
  });
  out["connection_homogeneity"] = residual(2, n, [&](const std::vector<int>& ix, Terms& t) {
    for (int k = 0; k < n; ++k) t.add(y[k] * v(p.B(ix[0], ix[1], k)));
    t.sub(v(p.N(ix[0], ix[1])));
  });
  out["conservative"] = residual(1, n, [&](const std::vector<int>& ix, Terms& t) {
    t.add(v(p.Ex(ix[0])));
    for (int m = 0; m < n; ++m) t.sub(v(p.N(m, ix[0])) * v(p.Ey(m)));
  });
  out["torsion"] = std::max(residual(3, n,
                                     [&](const std::vector<int>& ix, Terms& t) {
                                       t.add(v(p.B(ix[0], ix[1], ix[2])));
                                       t.sub(v(p.B(ix[0], ix[2], ix[1])));
                                     }),
                            residual(3, n, [&](const std::vector<int>& ix, Terms& t) {
                              t.add(v(p.F(ix[0], ix[1], ix[2])));
                              t.sub(v(p.F(ix[0], ix[2], ix[1])));
                            }));
  out["liouville"] = residual(1, d, [&](const std::vector<int>& ix, Terms& t) {
    for (int c = 0; c < d; ++c) t.add(b.J(ix[0], c) * b.spray_field(c));
    if (ix[0] >= n) t.sub(y[ix[0] - n]);
  });
  out["extended_metric"] = residual(2, d, [&](const std::vector<int>& ix, Terms& t) {
    for (int c = 0; c < d; ++c) t.add(b.omega(ix[0], c) * b.F_op(c, ix[1]));
    t.sub(b.g_full(ix[0], ix[1]));
  });
  // C' is a cancellation of connection-sized terms
  double conn_scale = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        conn_scale = std::max({conn_scale, std::abs(v(p.F(i, j, k))), std::abs(v(p.B(i, j, k)))});
  double ymax = 0;
  for (double c : y) ymax = std::max(ymax, std::abs(c));
  out["cartan_spray"] = std::max(residual(2, n,
                                          [&](const std::vector<int>& ix, Terms& t) {
                                            for (int k = 0; k < n; ++k) t.add(C(ix[0], ix[1], k) * y[k]);
                                          }),
                                 residual(2, n, [&](const std::vector<int>& ix, Terms& t) {
                                   for (int k = 0; k < n; ++k) t.add(Cp(ix[0], ix[1], k) * y[k]);
                                 }, conn_scale * ymax));
  out["second_cartan_routes"] = residual(3, n, [&](const std::vector<int>& ix, Terms& t) {
    t.add(Cp(ix[0], ix[1], ix[2]));
    t.sub(v(p.F(ix[0], ix[1], ix[2])));
    t.add(v(p.B(ix[0], ix[1], ix[2])));
  });
  {
    double worst = 0;
    for (int a = 0; a < d; ++a)
      worst = std::max(worst, residual(2, n, [&](const std::vector<int>& ix, Terms& t) {
                         int i = ix[0], j = ix[1];
                         t.add(v(p.frame_derivative(p.g(i, j), a)));
                         for (int m = 0; m < n; ++m) {
                           t.sub(v(p.conn(ConnectionKind::Cartan, a, m, i)) * v(p.g(m, j)));
                           t.sub(v(p.conn(ConnectionKind::Cartan, a, m, j)) * v(p.g(i, m)));
                         }
                       }));
    out["metric_compatible"] = worst;
  }
  out["r_on_spray"] = residual(3, n, [&](const std::vector<int>& ix, Terms& t) {
    for (int i = 0; i < n; ++i) t.add(y[i] * R(ix[0], i, ix[1], ix[2]));
    t.sub(Rb(ix[0], ix[1], ix[2]));
  });
  out["p_on_spray"] = residual(3, n, [&](const std::vector<int>& ix, Terms& t) {
    for (int i = 0; i < n; ++i) t.add(y[i] * P(ix[0], i, ix[1], ix[2]));
    t.sub(Cp(ix[0], ix[1], ix[2]));
  }, conn_scale);
  {
    auto slot = [&](const TensorField& T, int s) {
      return residual(3, n, [&](const std::vector<int>& ix, Terms& t) {
        for (int q = 0; q < n; ++q) {
          int idx[4];
          for (int r = 0, u = 0; r < 4; ++r) idx[r] = r == s ? q : ix[u++];
          t.add(y[q] * T(idx[0], idx[1], idx[2], idx[3]));
        }
      });
    };
    out["p_spray_slots"] = std::max(slot(P, 2), slot(P, 3));
    out["q_spray_slots"] = std::max({slot(Q, 1), slot(Q, 2), slot(Q, 3)});
  }
  out["q_cartan_form"] = residual(4, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], i = ix[1], j = ix[2], k = ix[3];
    t.add(Q(m, i, j, k));
    for (int q = 0; q < n; ++q) {
      t.sub(C(m, q, k) * C(q, j, i));
      t.add(C(m, q, j) * C(q, k, i));
    }
  });
  out["bianchi_a"] = residual(4, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], i = ix[1], j = ix[2], k = ix[3];
    t.add(R(m, i, j, k));
    t.add(R(m, j, k, i));
    t.add(R(m, k, i, j));
    for (int q = 0; q < n; ++q) {
      t.sub(C(m, q, i) * Rb(q, j, k));
      t.sub(C(m, q, j) * Rb(q, k, i));
      t.sub(C(m, q, k) * Rb(q, i, j));
    }
  });
  out["bianchi_b"] = residual(4, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], i = ix[1], j = ix[2], k = ix[3];
    t.add(Q(m, i, j, k));
    t.add(Q(m, j, k, i));
    t.add(Q(m, k, i, j));
  });
  out["bianchi_c"] = residual(4, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], i = ix[1], j = ix[2], k = ix[3];
    for (int q = 0; q < n; ++q) {
      t.add(C(m, q, i) * Rb(q, j, k));
      t.sub(Rb(m, q, k) * C(q, j, i));
      t.add(Rb(m, q, j) * C(q, k, i));
    }
  });
  {
    std::vector<TensorField> dq;
    for (int l = 0; l < n; ++l) dq.push_back(detail::cov(p, "Q", n + l));
    double worst = 0, scale = 0;
    for_each_index(std::vector<int>(5, n), [&](const std::vector<int>& ix) {
      int m = ix[0], i = ix[1], l = ix[2], j = ix[3], k = ix[4];
      Terms t;
      t.add(dq[l](m, i, j, k));
      t.add(dq[j](m, i, k, l));
      t.add(dq[k](m, i, l, j));
      worst = std::max(worst, std::abs(t.diff));
      scale = std::max(scale, t.scale);
    });
    out["bianchi_h"] = worst / std::max(scale, kFloor);
  }
  {
    double worst = 0, scale = Rb.max_abs();
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        auto br = lie_bracket(p, dsl::FieldSpec::frame(j + 1, n), dsl::FieldSpec::frame(k + 1, n));
        for (int m = 0; m < n; ++m) {
          worst = std::max(worst, std::abs(Rb(m, j, k) + br.vertical[m]));
          worst = std::max(worst, std::abs(br.horizontal[m]));
          scale = std::max(scale, std::abs(br.vertical[m]));
        }
      }
    out["barthel_bracket"] = worst / std::max(scale, kFloor);
  }
  out["berwald_spray"] = residual(3, n, [&](const std::vector<int>& ix, Terms& t) {
    for (int i = 0; i < n; ++i) t.add(y[i] * o.R0(ix[0], i, ix[1], ix[2]));
    t.sub(Rb(ix[0], ix[1], ix[2]));
  });

  // nullity spaces
  const NullityReport kb = nullity_space(b, Which::Barthel, kernel_tol), kr = nullity_space(b, Which::R, kernel_tol),
                      kp = nullity_space(b, Which::P, kernel_tol), kq = nullity_space(b, Which::Q, kernel_tol);
  {
    double worst = 0;
    for (const auto* k : {&kb, &kr, &kp, &kq}) {
      auto a = nullity_matrix(b, k->which);
      for (const auto& vec : k->basis) worst = std::max(worst, membership_residual(a, vec));
    }
    out["kernel_basis"] = worst;
  }
  out["nullity_inclusion"] = containment_residual(kr.basis, kb.basis);
  {
    double worst = 0, scale = 0;
    for (const auto& zv : kr.basis)
      for_each_index(std::vector<int>(3, n), [&](const std::vector<int>& ix) {
        int m = ix[0], j = ix[1], k = ix[2];
        Terms t;
        for (int i = 0; i < n; ++i) {
          t.add(R(m, i, j, k) * zv[i]);
          for (int q = 0; q < n; ++q) t.sub(C(m, q, i) * zv[i] * Rb(q, j, k));
        }
        worst = std::max(worst, std::abs(t.diff));
        scale = std::max(scale, t.scale);
      });
    // terms vanish individually when Z lies in the kernel; measure against the tensors themselves
    scale = std::max({scale, R.max_abs(), C.max_abs() * Rb.max_abs()});
    out["r_kernel_reduction"] = worst / std::max(scale, kFloor);
  }
  {
    auto ar = nullity_matrix(b, Which::R);
    bool s_in = membership_residual(ar, y) <= 10 * kernel_tol;
    double nmax = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) nmax = std::max(nmax, std::abs(v(p.N(i, j))));
    bool rb_nonzero = Rb.max_abs() > 1e-9 * std::max(1.0, nmax * nmax);
    out["spray_in_nr_flat_barthel"] = (s_in && rb_nonzero) ? 1.0 : 0.0;
  }
  out["spray_in_np"] = membership_residual(nullity_matrix(b, Which::P), y);
  {
    double worst = 0;
    for (const auto& xv : kp.basis)
      for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) {
          double s = 0;
          for (int j = 0; j < n; ++j) s += xv[j] * Cp(m, j, k);
          worst = std::max(worst, std::abs(s));
        }
    out["np_kills_cp"] = worst / std::max({Cp.max_abs(), conn_scale, kFloor});
  }
  out["spray_in_nq"] = membership_residual(nullity_matrix(b, Which::Q), y);
  {
    double worst = 0;
    for (const auto& zv : kq.basis)
      for_each_index(std::vector<int>(3, n), [&](const std::vector<int>& ix) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += Q(ix[0], i, ix[1], ix[2]) * zv[i];
        worst = std::max(worst, std::abs(s));
      });
    out["nq_kills_q"] = worst / std::max(Q.max_abs(), kFloor);
  }
  out["nr_nonzero"] = kr.mu;
  out["np_nonzero"] = kp.mu;
  out["nq_nonzero"] = kq.mu;

  if (!deep) return out;
  std::vector<TensorField> dhR, dvR, dhP, dvP, dhQ, dhRb, dhC, dhCp, dvCp;
  for (int l = 0; l < n; ++l) {
    dhR.push_back(detail::negated(detail::cov(p, "R", l)));
    dvR.push_back(detail::negated(detail::cov(p, "R", n + l)));
    dhP.push_back(detail::negated(detail::cov(p, "P", l)));
    dvP.push_back(detail::negated(detail::cov(p, "P", n + l)));
    dhQ.push_back(detail::cov(p, "Q", l));
    dhRb.push_back(detail::negated(detail::cov(p, "barthel", l)));
    dhC.push_back(detail::cov(p, "C_up", l));
    dhCp.push_back(detail::cov(p, "Cp_up", l));
    dvCp.push_back(detail::cov(p, "Cp_up", n + l));
  }
  out["r_decomposition"] = residual(4, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], i = ix[1], j = ix[2], k = ix[3];
    t.add(R(m, i, j, k));
    t.sub(o.R0(m, i, j, k));
    t.sub(dhCp[j](m, k, i));
    t.add(dhCp[k](m, j, i));
    for (int q = 0; q < n; ++q) {
      t.sub(Cp(m, q, k) * Cp(q, j, i));
      t.add(Cp(m, q, j) * Cp(q, k, i));
      t.sub(C(m, q, i) * Rb(q, j, k));
    }
  });
  out["p_decomposition"] = residual(4, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], i = ix[1], j = ix[2], k = ix[3];
    t.add(P(m, i, j, k));
    t.sub(o.P0(m, i, j, k));
    t.sub(dhC[j](m, k, i));
    t.add(dvCp[k](m, j, i));
    for (int q = 0; q < n; ++q) {
      t.sub(C(m, q, k) * Cp(q, j, i));
      t.sub(C(m, q, i) * Cp(q, j, k));
      t.add(Cp(m, q, j) * C(q, k, i));
      t.add(Cp(m, q, i) * C(q, j, k));
    }
  });
  out["bianchi_d"] = residual(4, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], l = ix[1], j = ix[2], k = ix[3];
    t.add(dhRb[l](m, j, k));
    t.add(dhRb[j](m, k, l));
    t.add(dhRb[k](m, l, j));
    for (int q = 0; q < n; ++q) {
      t.sub(Cp(m, q, k) * Rb(q, l, j));
      t.sub(Cp(m, q, l) * Rb(q, j, k));
      t.sub(Cp(m, q, j) * Rb(q, k, l));
    }
  });
  out["bianchi_e"] = residual(5, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], i = ix[1], l = ix[2], j = ix[3], k = ix[4];
    t.add(dhR[l](m, i, j, k));
    t.add(dhR[j](m, i, k, l));
    t.add(dhR[k](m, i, l, j));
    for (int q = 0; q < n; ++q) {
      t.sub(P(m, i, l, q) * Rb(q, j, k));
      t.sub(P(m, i, j, q) * Rb(q, k, l));
      t.sub(P(m, i, k, q) * Rb(q, l, j));
    }
  });
  out["bianchi_f"] = residual(5, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], i = ix[1], j = ix[2], k = ix[3], l = ix[4];
    t.add(dhP[j](m, i, k, l));
    t.sub(dhP[k](m, i, j, l));
    t.add(dvR[l](m, i, j, k));
    for (int q = 0; q < n; ++q) {
      t.sub(P(m, i, j, q) * Cp(q, k, l));
      t.add(P(m, i, k, q) * Cp(q, j, l));
      t.sub(R(m, i, q, j) * C(q, k, l));
      t.add(R(m, i, q, k) * C(q, j, l));
      t.add(Q(m, i, q, l) * Rb(q, j, k));
    }
  });
  out["bianchi_g"] = residual(5, n, [&](const std::vector<int>& ix, Terms& t) {
    int m = ix[0], i = ix[1], j = ix[2], k = ix[3], l = ix[4];
    t.add(dhQ[j](m, i, k, l));
    t.sub(dvP[k](m, i, j, l));
    t.add(dvP[l](m, i, j, k));
    for (int q = 0; q < n; ++q) {
      t.sub(P(m, i, q, l) * C(q, j, k));
      t.add(P(m, i, q, k) * C(q, l, j));
      t.add(Q(m, i, q, l) * Cp(q, j, k));
      t.sub(Q(m, i, q, k) * Cp(q, l, j));
    }
  });
  return out;
}

}  // namespace

const IdentityResult& SuiteReport::result(const std::string& name) const {
  for (const auto& r : results)
    if (r.name == name) return r;
  throw std::out_of_range("no identity '" + name + "'");
}

std::vector<std::string> identity_names(bool deep) {
  std::vector<std::string> out;
  for (const auto& s : specs())
    if (deep || !s.deep) out.push_back(s.name);
  return out;
}

SuiteReport verify_identities(const dsl::EnergyExpr& e, const std::vector<ChartPoint>& points, double tol, bool deep,
                              double kernel_tol) {
  SuiteReport rep;
  rep.tolerance = tol;
  rep.kernel_tol = kernel_tol;
  rep.deep = deep;
  rep.points = static_cast<int>(points.size());
  std::vector<Results> per(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                     static_cast<unsigned>(points.size())));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < points.size(); i += workers) {
      try {
        per[i] = evaluate_point(e, points[i], deep, kernel_tol);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  for (const auto& s : specs()) {
    IdentityResult r;
    r.name = s.name;
    r.statement = s.statement;
    r.points = rep.points;
    if (s.deep && !deep) {
      r.skipped = true;
      r.note = "needs --deep-checks";
      rep.results.push_back(r);
      continue;
    }
    switch (s.kind) {
      case Kind::Residual: r.threshold = tol; break;
      case Kind::Kernel: r.threshold = 10 * kernel_tol; break;
      case Kind::Flag: r.threshold = 0.5; break;
      case Kind::Observation: r.threshold = 0.5; break;
    }
    if (s.kind == Kind::Observation) {
      r.observation = true;
      int zero = 0;
      for (std::size_t i = 0; i < per.size(); ++i)
        if (per[i].at(s.name) < 0.5) {
          if (zero == 0) r.worst_point = static_cast<int>(i);
          ++zero;
        }
      r.max_residual = zero;
      r.note = "trivial nullity space at " + std::to_string(zero) + " of " + std::to_string(rep.points) + " points";
      rep.results.push_back(r);
      continue;
    }
    for (std::size_t i = 0; i < per.size(); ++i) {
      double v = per[i].at(s.name);
      if (std::isnan(v)) v = INFINITY;
      if (r.worst_point < 0 || v > r.max_residual) {
        r.max_residual = v;
        r.worst_point = static_cast<int>(i);
      }
    }
    r.pass = r.max_residual < r.threshold;
    if (!r.pass) rep.all_pass = false;
    rep.results.push_back(r);
  }
  return rep;
}

}  // namespace finsler::nullity
