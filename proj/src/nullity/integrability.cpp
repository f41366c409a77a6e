#include "finsler/nullity/integrability.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "common.hpp"
#include "finsler/oracle/fd.hpp"

namespace finsler::nullity {

using detail::max_abs;
using detail::norm2;
using Vec = std::vector<double>;
using Basis = std::vector<Vec>;

namespace {

constexpr double kScaleFloor = 1e-8;

const char* curvature_name(Which w) {
  switch (w) {
    case Which::Barthel: return "barthel";
    case Which::R: return "R";
    case Which::P: return "P";
    case Which::Q: return "Q";
  }
  return "R";
}

Eigen::MatrixXd matrix_at(const Pipeline& p, Which w) { return nullity_matrix(detail::val(p, curvature_name(w))); }

Vec barthel_values(const Pipeline& p) {
  const int n = p.n();
  Vec nn(n * n);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i) nn[m * n + i] = p.N(m, i).value();
  return nn;
}

// local frame data at a nearby point
struct Local {
  Basis frame;
  Vec barthel;
};

Local local_frame(const dsl::EnergyExpr& e, Which w, const Vec& z, const Basis& ref, double kernel_tol) {
  const int n = e.dim();
  std::unique_ptr<Pipeline> p;
  try {
    p = std::make_unique<Pipeline>(e, ChartPoint::from_z(z));
  } catch (const std::exception& err) {
    throw FrameError(std::string("frame stencil left the admissible set: ") + err.what());
  }
  NullityReport k = kernel_of(matrix_at(*p, w), kernel_tol);
  if (k.mu != static_cast<int>(ref.size()))
    throw FrameError("nullity index changes inside the frame stencil (" + std::to_string(k.mu) + " vs " +
                     std::to_string(ref.size()) + ")");
  Eigen::MatrixXd K(n, k.mu);
  for (int c = 0; c < k.mu; ++c)
    for (int i = 0; i < n; ++i) K(i, c) = k.basis[c][i];
  Local out;
  out.barthel = barthel_values(*p);
  for (const auto& r : ref) {
    Eigen::VectorXd v = K * (K.transpose() * Eigen::Map<const Eigen::VectorXd>(r.data(), n));
    for (const auto& q : out.frame) v -= Eigen::Map<const Eigen::VectorXd>(q.data(), n).dot(v) *
                                         Eigen::Map<const Eigen::VectorXd>(q.data(), n);
    double nv = v.norm();
    if (nv < 1e-6) throw FrameError("projected reference basis lost rank");
    v /= nv;
    out.frame.emplace_back(v.data(), v.data() + n);
  }
  return out;
}

// (X^i, -N^m_i X^i)
Vec coordinates(const Vec& x, const Vec& barthel, int n) {
  Vec v(2 * n, 0.0);
  for (int i = 0; i < n; ++i) {
    v[i] = x[i];
    for (int m = 0; m < n; ++m) v[n + m] -= barthel[m * n + i] * x[i];
  }
  return v;
}

// conditions of the integrability criteria on kernel pairs
void criteria(const Pipeline& p, Which w, const Basis& frame, const Eigen::MatrixXd& kernel_matrix,
              PointIntegrability& out, const std::vector<Basis>& y_derivs, double tol) {
  if (w != Which::P && w != Which::Q) return;
  const int n = p.n();
  const int mu = static_cast<int>(frame.size());
  auto o = detail::operators(p);
  auto contract2 = [&](auto&& t, const Vec& x, const Vec& y) {
    double s = 0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += t(j, k) * x[j] * y[k];
    return s;
  };
  double rb_scale = std::max(o.Rb.max_abs(), kScaleFloor), rb_worst = 0;
  for (int a = 0; a < mu; ++a)
    for (int b = a + 1; b < mu; ++b)
      for (int m = 0; m < n; ++m)
        rb_worst = std::max(rb_worst, std::abs(contract2([&](int j, int k) { return o.Rb(m, j, k); }, frame[a],
                                                         frame[b])));
  out.barthel_on_kernel = rb_worst / rb_scale;
  if (w == Which::P) {
    double worst = 0, scale = o.R.max_abs() * o.C.max_abs();
    for (int l = 0; l < n; ++l) {
      TensorField dr = detail::negated(detail::cov(p, "R", n + l));
      scale = std::max(scale, dr.max_abs());
      for (int a = 0; a < mu; ++a)
        for (int b = a + 1; b < mu; ++b)
          for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i) {
              double lhs = contract2([&](int j, int k) { return dr(m, i, j, k); }, frame[a], frame[b]);
              double rhs = contract2(
                  [&](int j, int k) {
                    double s = 0;
                    for (int q = 0; q < n; ++q) s += o.R(m, i, k, q) * o.C(q, j, l) - o.R(m, i, j, q) * o.C(q, k, l);
                    return s;
                  },
                  frame[a], frame[b]);
              worst = std::max(worst, std::abs(lhs - rhs));
            }
    }
    out.derivative_identity = worst / std::max(scale, kScaleFloor);
    out.criterion_holds = out.barthel_on_kernel < tol && out.derivative_identity < tol;
  } else {
    std::vector<TensorField> dp;
    double scale = o.P.max_abs() * o.C.max_abs();
    for (int l = 0; l < n; ++l) {
      dp.push_back(detail::negated(detail::cov(p, "P", n + l)));
      scale = std::max(scale, dp.back().max_abs());
    }
    auto A = [&](int m, int i, int j, int k, int l) {
      double s = -dp[j](m, i, k, l) - dp[l](m, i, j, k);
      for (int q = 0; q < n; ++q) s += o.C(q, l, j) * o.P(m, i, q, k);
      return s;
    };
    double worst = 0;
    for (int a = 0; a < mu; ++a)
      for (int b = a + 1; b < mu; ++b)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i) {
              double d = contract2([&](int j, int k) { return A(m, i, j, k, l) - A(m, i, k, j, l); }, frame[a],
                                   frame[b]);
              worst = std::max(worst, std::abs(d));
            }
    out.symmetry_defect = worst / std::max(scale, kScaleFloor);
    out.criterion_holds = out.barthel_on_kernel < tol && out.symmetry_defect < tol;
    // F[JX,JY] has h-components X^i dY/dy_i - Y^i dX/dy_i
    if (!y_derivs.empty()) {
      double flip = 0;
      for (int a = 0; a < mu; ++a)
        for (int b = a + 1; b < mu; ++b) {
          Vec wv(n, 0.0);
          for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i) wv[m] += frame[a][i] * y_derivs[b][i][m] - frame[b][i] * y_derivs[a][i][m];
          if (norm2(wv) > 1e-10) flip = std::max(flip, membership_residual(kernel_matrix, wv));
        }
      out.vertical_flip = flip;
    }
  }
}

void finish_pairs(PointIntegrability& pt, const Eigen::MatrixXd& kernel_matrix, double bracket_tol) {
  for (auto& pb : pt.pairs) {
    pb.vertical_norm = norm2(pb.bracket.vertical);
    double hn = norm2(pb.bracket.horizontal);
    pb.out_of_kernel = hn > 1e-10 ? membership_residual(kernel_matrix, pb.bracket.horizontal) : 0.0;
    pt.max_vertical = std::max(pt.max_vertical, pb.vertical_norm);
    pt.max_out_of_kernel = std::max(pt.max_out_of_kernel, pb.out_of_kernel);
    if (!pb.bracket.is_horizontal || pb.out_of_kernel >= bracket_tol) pt.closed = false;
  }
}

void conclude(IntegrabilityReport& r) {
  r.integrable = true;
  r.criterion_consistent = true;
  for (const auto& p : r.points) {
    if (!p.closed) r.integrable = false;
  }
  for (const auto& p : r.points)
    if (p.criterion_holds != r.integrable && (r.which == Which::P || r.which == Which::Q))
      r.criterion_consistent = false;
  std::string name = std::string("N_") + to_string(r.which);
  r.verdict = name + (r.integrable ? " integrable" : " not integrable");
}

int common_mu(const dsl::EnergyExpr& e, Which w, const std::vector<ChartPoint>& points, double kernel_tol,
              std::vector<NullityReport>& kernels) {
  if (points.empty()) throw std::invalid_argument("integrability check needs at least one point");
  int mu = -1;
  for (const auto& z : points) {
    Pipeline p(e, z);
    NullityReport k = kernel_of(matrix_at(p, w), kernel_tol);
    k.which = w;
    k.point = p.point();
    if (mu >= 0 && k.mu != mu)
      throw NullityVariesError("nullity index is not constant across the supplied points (" + std::to_string(mu) +
                               " vs " + std::to_string(k.mu) + ")");
    mu = k.mu;
    kernels.push_back(std::move(k));
  }
  return mu;
}

}  // namespace

Basis gauge_frame(const dsl::EnergyExpr& e, Which w, const Vec& z, const Basis& reference, double kernel_tol) {
  return local_frame(e, w, z, reference, kernel_tol).frame;
}

IntegrabilityReport integrability_check(const dsl::EnergyExpr& e, Which w, const std::vector<ChartPoint>& points,
                                        double kernel_tol, double bracket_tol) {
  IntegrabilityReport r;
  r.which = w;
  r.kernel_tol = kernel_tol;
  r.bracket_tol = bracket_tol;
  r.frame_kind = "gauge";
  std::vector<NullityReport> kernels;
  r.mu = common_mu(e, w, points, kernel_tol, kernels);
  const int n = e.dim(), d = 2 * n;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const auto& ref = kernels[pi].basis;
    const int mu = static_cast<int>(ref.size());
    Pipeline p(e, points[pi]);
    Eigen::MatrixXd km = matrix_at(p, w);
    PointIntegrability pt;
    pt.point = p.point();
    pt.mu = mu;
    pt.frame = ref;
    const Vec z0 = p.point().z();
    const Vec nn0 = barthel_values(p);
    // jac[a][c] = dV_a/dz^c (2n), by central differences with one Richardson step
    std::vector<std::vector<Vec>> jac(mu, std::vector<Vec>(d, Vec(d, 0.0)));
    std::vector<Basis> yder(mu, Basis(n, Vec(n, 0.0)));
    if (mu >= 2) {
      for (int c = 0; c < d; ++c) {
        double h = oracle::default_step(1, z0[c]);
        auto diff = [&](double hh) {
          Vec zp = z0, zm = z0;
          zp[c] += hh;
          zm[c] -= hh;
          Local lp = local_frame(e, w, zp, ref, kernel_tol), lm = local_frame(e, w, zm, ref, kernel_tol);
          std::vector<std::pair<Vec, Vec>> out;  // (dV, dX)
          for (int a = 0; a < mu; ++a) {
            Vec vp = coordinates(lp.frame[a], lp.barthel, n), vm = coordinates(lm.frame[a], lm.barthel, n);
            Vec dv(d), dx(n);
            for (int k = 0; k < d; ++k) dv[k] = (vp[k] - vm[k]) / (2 * hh);
            for (int k = 0; k < n; ++k) dx[k] = (lp.frame[a][k] - lm.frame[a][k]) / (2 * hh);
            out.emplace_back(dv, dx);
          }
          return out;
        };
        auto coarse = diff(h), fine = diff(h / 2);
        for (int a = 0; a < mu; ++a) {
          for (int k = 0; k < d; ++k) jac[a][c][k] = (4 * fine[a].first[k] - coarse[a].first[k]) / 3;
          if (c >= n)
            for (int k = 0; k < n; ++k) yder[a][c - n][k] = (4 * fine[a].second[k] - coarse[a].second[k]) / 3;
        }
      }
    }
    for (int a = 0; a < mu; ++a)
      for (int b = a + 1; b < mu; ++b) {
        Vec va = coordinates(ref[a], nn0, n), vb = coordinates(ref[b], nn0, n);
        Vec raw(d, 0.0);
        for (int k = 0; k < d; ++k)
          for (int c = 0; c < d; ++c) raw[k] += va[c] * jac[b][c][k] - vb[c] * jac[a][c][k];
        PairBracket pb;
        pb.a = a;
        pb.b = b;
        pb.bracket = split_bracket(raw, nn0, n, bracket_tol);
        pt.pairs.push_back(pb);
      }
    finish_pairs(pt, km, bracket_tol);
    criteria(p, w, ref, km, pt, yder, bracket_tol);
    r.points.push_back(std::move(pt));
  }
  conclude(r);
  return r;
}

IntegrabilityReport integrability_check(const dsl::EnergyExpr& e, Which w, const std::vector<ChartPoint>& points,
                                        const std::vector<std::pair<std::string, dsl::FieldSpec>>& fields,
                                        double kernel_tol, double bracket_tol) {
  IntegrabilityReport r;
  r.which = w;
  r.kernel_tol = kernel_tol;
  r.bracket_tol = bracket_tol;
  r.frame_kind = "fields";
  for (const auto& f : fields) r.field_names.push_back(f.first);
  std::vector<NullityReport> kernels;
  r.mu = common_mu(e, w, points, kernel_tol, kernels);
  const int n = e.dim();
  const int nf = static_cast<int>(fields.size());
  for (const auto& z : points) {
    Pipeline p(e, z);
    Eigen::MatrixXd km = matrix_at(p, w);
    PointIntegrability pt;
    pt.point = p.point();
    pt.mu = r.mu;
    const Vec zz = p.point().z();
    std::vector<Basis> yder;
    for (const auto& [name, f] : fields) {
      Vec v = f.evaluate(zz);
      pt.frame.push_back(v);
      if (norm2(v) == 0.0) throw FrameError("field '" + name + "' vanishes at the point");
      pt.field_membership = std::max(pt.field_membership, membership_residual(km, v));
      Basis dy(n, Vec(n, 0.0));
      for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m)
          dy[i][m] = dsl::evaluate(dsl::differentiate(f.coefficients()[m], dsl::VarId::y(i + 1)), zz, n);
      yder.push_back(dy);
    }
    for (int a = 0; a < nf; ++a)
      for (int b = a + 1; b < nf; ++b) {
        PairBracket pb;
        pb.a = a;
        pb.b = b;
        pb.bracket = lie_bracket(p, fields[a].second, fields[b].second, bracket_tol);
        pt.pairs.push_back(pb);
      }
    finish_pairs(pt, km, bracket_tol);
    if (pt.field_membership >= bracket_tol) r.fields_in_distribution = false;
    criteria(p, w, pt.frame, km, pt, yder, bracket_tol);
    r.points.push_back(std::move(pt));
  }
  conclude(r);
  return r;
}

}  // namespace finsler::nullity
