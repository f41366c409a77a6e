#include "finsler/nullity/bracket.hpp"

#include <cmath>
#include <stdexcept>

#include "finsler/dsl/eval.hpp"

namespace finsler::nullity {

namespace {

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// coordinate representation (A^i, -A^i N^m_i) as jets
std::vector<Jet> coordinate_field(const Pipeline& p, const dsl::FieldSpec& f) {
  const int n = p.n();
  if (f.dim() != n || static_cast<int>(f.coefficients().size()) != n)
    throw std::invalid_argument("field dimension does not match the energy");
  const auto& sp = p.space();
  const auto z = p.point().z();
  std::vector<Jet> a;
  for (const auto& c : f.coefficients())
    a.push_back(dsl::evaluate_as<Jet>(
        *c, [&](int i) { return Jet::variable(sp, i, z[i]); }, [&](double v) { return Jet::constant(sp, v); }, n));
  std::vector<Jet> out(a.begin(), a.end());
  for (int m = 0; m < n; ++m) {
    Jet s = Jet::constant(sp, 0.0);
    for (int i = 0; i < n; ++i) fma_into(s, a[i], p.N(m, i));
    out.push_back(-s);
  }
  return out;
}

}  // namespace

BracketResult split_bracket(const std::vector<double>& coordinate, const std::vector<double>& barthel, int n,
                            double tol) {
  BracketResult r;
  r.coordinate = coordinate;
  r.tolerance = tol;
  r.horizontal.assign(coordinate.begin(), coordinate.begin() + n);
  r.vertical.assign(coordinate.begin() + n, coordinate.end());
  // d/dx_i = h_i + N^m_i d/dy_m
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i) r.vertical[m] += barthel[m * n + i] * r.horizontal[i];
  r.is_horizontal = norm(r.vertical) <= tol * std::max(1.0, norm(r.horizontal));
  return r;
}

BracketResult lie_bracket(const Pipeline& p, const dsl::FieldSpec& a, const dsl::FieldSpec& b, double tol) {
  const int n = p.n(), d = 2 * n;
  auto va = coordinate_field(p, a), vb = coordinate_field(p, b);
  std::vector<double> raw(d, 0.0);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      raw[r] += va[c].value() * vb[r].derivative({c}) - vb[c].value() * va[r].derivative({c});
  std::vector<double> nn(n * n);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i) nn[m * n + i] = p.N(m, i).value();
  return split_bracket(raw, nn, n, tol);
}

BracketResult lie_bracket(const dsl::EnergyExpr& e, const dsl::FieldSpec& a, const dsl::FieldSpec& b,
                          const ChartPoint& z, double tol) {
  Pipeline p(e, z);
  return lie_bracket(p, a, b, tol);
}

}  // namespace finsler::nullity
