#include "finsler/nullity/kernel.hpp"

#include <cmath>

namespace finsler::nullity {

const char* to_string(Which w) {
  switch (w) {
    case Which::Barthel: return "barthel";
    case Which::R: return "R";
    case Which::P: return "P";
    case Which::Q: return "Q";
  }
  return "?";
}

Which parse_which(const std::string& s) {
  if (s == "barthel" || s == "Barthel" || s == "Rb") return Which::Barthel;
  if (s == "R") return Which::R;
  if (s == "P") return Which::P;
  if (s == "Q") return Which::Q;
  throw std::invalid_argument("unknown curvature '" + s + "' (expected barthel, R, P or Q)");
}

Eigen::MatrixXd nullity_matrix(const TensorField& t) {
  auto shape = t.shape();
  if (shape.size() != 3 && shape.size() != 4) throw std::invalid_argument("nullity matrix needs a rank 3 or 4 tensor");
  const int n = shape[0];
  if (shape.size() == 3) {
    // T^i_jk, column j, rows (i,k)
    Eigen::MatrixXd a(n * n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) a(i * n + k, j) = t(i, j, k);
    return a;
  }
  Eigen::MatrixXd a(n * n * n, n);
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) a((h * n + i) * n + k, j) = t(h, i, j, k);
  return a;
}

Eigen::MatrixXd nullity_matrix(const GeometryBundle& b, Which w) {
  switch (w) {
    case Which::Barthel: return nullity_matrix(b.barthel_curv);
    case Which::R: return nullity_matrix(b.curv_R);
    case Which::P: return nullity_matrix(b.curv_P);
    case Which::Q: return nullity_matrix(b.curv_Q);
  }
  throw std::logic_error("unreachable");
}

NullityReport kernel_of(const Eigen::MatrixXd& a, double tol) {
  if (!(tol > 0 && tol < 1)) throw std::invalid_argument("kernel tolerance must lie in (0, 1)");
  const int n = static_cast<int>(a.cols());
  NullityReport r;
  r.rows = static_cast<int>(a.rows());
  r.cols = n;
  r.tolerance = tol;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  Eigen::VectorXd s = svd.singularValues();
  r.singular_values.assign(n, 0.0);
  for (int i = 0; i < s.size(); ++i) r.singular_values[i] = s(i);
  const double smax = n > 0 ? r.singular_values[0] : 0.0;
  const Eigen::MatrixXd& v = svd.matrixV();
  int rank = 0;
  if (smax < kAbsoluteFloor) {
    r.warning = "curvature matrix vanishes at this point; nullity index is maximal";
  } else {
    for (double sv : r.singular_values)
      if (sv >= tol * smax) ++rank;
  }
  r.mu = n - rank;
  for (int c = rank; c < n; ++c) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = v(i, c);
    // sign gauge: largest entry positive
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(col[i]) > std::abs(col[arg]) + 1e-14) arg = i;
    if (col[arg] < 0)
      for (auto& x : col) x = -x;
    r.basis.push_back(col);
  }
  return r;
}

NullityReport nullity_space(const GeometryBundle& b, Which w, double tol) {
  NullityReport r = kernel_of(nullity_matrix(b, w), tol);
  r.which = w;
  r.point = b.point;
  return r;
}

double membership_residual(const Eigen::MatrixXd& a, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != a.cols()) throw std::invalid_argument("vector has the wrong number of components");
  Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
  double nv = x.norm();
  if (nv == 0.0) throw std::invalid_argument("membership test needs a nonzero vector");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  double na = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  if (na < kAbsoluteFloor) return 0.0;
  return (a * x).norm() / (na * nv);
}

double nullity_field_membership(const GeometryBundle& b, Which w, const std::vector<double>& v) {
  return membership_residual(nullity_matrix(b, w), v);
}

namespace {

Eigen::MatrixXd orthonormal(const std::vector<std::vector<double>>& vs, int n) {
  Eigen::MatrixXd m(n, vs.size());
  for (std::size_t c = 0; c < vs.size(); ++c) {
    if (static_cast<int>(vs[c].size()) != n) throw std::invalid_argument("basis vectors differ in length");
    for (int i = 0; i < n; ++i) m(i, c) = vs[c][i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  int r = 0;
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-12 * std::max(1.0, smax)) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

double containment_residual(const std::vector<std::vector<double>>& inner,
                            const std::vector<std::vector<double>>& outer) {
  if (inner.empty()) return 0.0;
  if (outer.empty()) return 1.0;
  const int n = static_cast<int>(inner[0].size());
  Eigen::MatrixXd a = orthonormal(inner, n), b = orthonormal(outer, n);
  if (a.cols() == 0) return 0.0;
  if (b.cols() == 0) return 1.0;
  // columns of a minus their projection onto span(b); the largest singular value is sin(theta_max)
  Eigen::MatrixXd rest = a - b * (b.transpose() * a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rest);
  return std::min(1.0, svd.singularValues()(0));
}

double subspace_distance(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size()) return 1.0;
  return std::max(containment_residual(a, b), containment_residual(b, a));
}

}  // namespace finsler::nullity
