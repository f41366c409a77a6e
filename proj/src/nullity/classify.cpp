#include "finsler/nullity/classify.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "common.hpp"

namespace finsler::nullity {

namespace {

constexpr double kFloor = 1e-8;

struct Fit {
  double scalar = 0, residual = 0;
};

// least squares t ~ c * w
Fit fit_scalar(const std::vector<double>& t, const std::vector<double>& w) {
  double tw = 0, ww = 0, tmax = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tw += t[i] * w[i];
    ww += w[i] * w[i];
    tmax = std::max(tmax, std::abs(t[i]));
  }
  Fit f;
  f.scalar = ww > 0 ? tw / ww : 0.0;
  double worst = 0;
  for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(t[i] - f.scalar * w[i]));
  f.residual = worst / std::max(tmax, kFloor);
  return f;
}

void absorb(PropertyResult& p, double residual) { p.residual = std::max(p.residual, residual); }

void absorb_fit(PropertyResult& p, const Fit& f) {
  absorb(p, f.residual);
  p.fits.push_back(f.scalar);
  if (!p.fit || std::abs(f.scalar) > std::abs(*p.fit)) p.fit = f.scalar;
}

}  // namespace

const PropertyResult& ClassificationReport::property(const std::string& name) const {
  for (const auto& p : properties)
    if (p.name == name) return p;
  throw std::out_of_range("no property '" + name + "'");
}

ClassificationReport classify_space(const dsl::EnergyExpr& e, const std::vector<ChartPoint>& sample, double tol) {
  if (sample.empty()) throw std::invalid_argument("classification needs a non-empty sample");
  const int n = e.dim();
  ClassificationReport rep;
  rep.tolerance = tol;
  PropertyResult riem, lands, berw, hiso, s3;
  riem.name = "riemannian";
  lands.name = "landsberg";
  berw.name = "berwald";
  hiso.name = "h_isotropic";
  s3.name = "s3_like";
  for (const auto& z : sample) {
    Pipeline p(e, z);
    const double ynorm = detail::norm2(p.point().y);
    TensorField g = detail::val(p, "g"), C = detail::val(p, "C"), Cp = detail::val(p, "Cp_up");
    TensorField F = detail::val(p, "F"), hbar = detail::val(p, "hbar");
    TensorField R = detail::negated(detail::val(p, "R")), Q = detail::val(p, "Q"), P0 = detail::val(p, "Pb0");
    double bmax = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) bmax = std::max(bmax, std::abs(p.B(i, j, k).value()));
    absorb(riem, C.max_abs() * ynorm / std::max(g.max_abs(), kFloor));
    absorb(lands, Cp.max_abs() / std::max(std::max(F.max_abs(), bmax), kFloor));
    absorb(berw, P0.max_abs() * ynorm / std::max(bmax, kFloor));

    std::vector<double> t, w;
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            t.push_back(R(m, i, j, k));
            w.push_back(g(j, i) * (m == k) - g(k, i) * (m == j));
          }
    absorb_fit(hiso, fit_scalar(t, w));

    t.clear();
    w.clear();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int q = 0; q < n; ++q) {
            double lowered = 0;
            for (int m = 0; m < n; ++m) lowered += g(m, q) * Q(m, i, j, k);
            t.push_back(lowered);
            w.push_back(hbar(j, i) * hbar(k, q) - hbar(j, q) * hbar(k, i));
          }
    absorb_fit(s3, fit_scalar(t, w));
    for (auto* pr : {&riem, &lands, &berw, &hiso, &s3}) ++pr->sample_count;
  }
  for (auto* pr : {&riem, &lands, &berw, &hiso, &s3}) pr->holds = pr->residual < tol;
  auto flag = [&](const PropertyResult& pr, const char* what) {
    if (!pr.holds || !pr.fit || std::abs(*pr.fit) < tol) return;
    std::ostringstream os;
    os.precision(10);
    os << pr.name << " fit is exact with " << what << " = " << *pr.fit
       << " although the nullity argument forces it to vanish";
    rep.inconsistencies.push_back(os.str());
  };
  if (n >= 3) flag(hiso, "k0");
  if (n >= 4) flag(s3, "r");
  rep.properties = {riem, lands, berw, hiso, s3};
  return rep;
}

}  // namespace finsler::nullity
