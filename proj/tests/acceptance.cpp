// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/cli/examples.hpp"
#include "finsler/cli/run.hpp"
#include "finsler/core/geometry.hpp"
#include "finsler/nullity/bracket.hpp"
#include "finsler/nullity/identities.hpp"
#include "finsler/nullity/integrability.hpp"
#include "finsler/nullity/kernel.hpp"
#include "finsler/oracle/fd.hpp"
#include "finsler/oracle/riemann.hpp"
#include "finsler/oracle/sampler.hpp"

using namespace finsler;
using namespace finsler::cli;
using nullity::Which;

namespace {

constexpr std::uint64_t kSeed = 42;
const char* kCurved = "y1^2+(1-x1^2)*y2^2";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("AC%d %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

const Check& check(const ExampleReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::runtime_error("missing check " + name);
}

std::vector<ChartPoint> generic_points(int id, int count, std::uint64_t seed = kSeed) {
  auto s = example_setup(id);
  auto cfg = s.generic;
  cfg.seed = seed;
  return oracle::Sampler(cfg, dsl::parse_energy(s.energy, s.dim)).take(count);
}

std::vector<ChartPoint> box_points(const dsl::EnergyExpr& e, std::vector<oracle::Interval> box, int count,
                                   std::uint64_t seed) {
  oracle::SamplerConfig c;
  c.seed = seed;
  c.dim = e.dim();
  c.box = std::move(box);
  return oracle::Sampler(c, e).take(count);
}

std::vector<std::vector<double>> evaluate_fields(const std::vector<std::string>& specs, const ChartPoint& z) {
  std::vector<std::vector<double>> out;
  for (const auto& s : specs) out.push_back(dsl::FieldSpec::parse(s, z.dim()).evaluate(z.z()));
  return out;
}

// --- 1 -----------------------------------------------------------------------
void ac1() {
  auto s = example_setup(1);
  auto e = dsl::parse_energy(s.energy, s.dim);
  std::vector<ChartPoint> pts{require_admissible(e, {0, 0, 0, 1}, {1, 1, 1, 1})};
  int ok = 0, total = 0;
  double worst = 0;
  for (const auto& t : s.tables) {
    if (t.tensor != "spray" && t.tensor != "gamma") continue;
    auto L = compare_table(e, t, pts, 1e-9);
    ok += L.matched;
    total += static_cast<int>(L.entries.size());
    for (const auto& c : L.entries) worst = std::max(worst, c.rel_error);
  }
  report(1, total == 10 && ok == total,
         "four-dimensional example, spray and Barthel coefficients at x=(0,0,0,1), y=(1,1,1,1): " +
             std::to_string(ok) + "/" + std::to_string(total) + " printed entries within 1e-9 (worst " + fmt(worst) +
             ")");
}

// --- 2 -----------------------------------------------------------------------
void ac2(const ExampleReport& r1) {
  bool pass = true;
  std::string bad;
  for (const char* c : {"generic_mu_barthel", "generic_basis_barthel", "surface_mu_barthel", "surface_basis_barthel",
                        "surface_mu_R", "surface_basis_R", "inclusion_R_in_Rb", "proper_inclusion"}) {
    if (!check(r1, c).pass) {
      pass = false;
      bad += std::string(" ") + c;
    }
  }
  bool concl = r1.conclusions.size() == 1 && r1.conclusions[0] == "N_𝕽 ⊄ N_R";
  report(2, pass && concl,
         "nullity strata on 11 generic and 10 surface points: mu_Rb 1 / 2, mu_R 1 on the surface, bases within 1e-6, "
         "N_Rb not inside N_R" +
             (bad.empty() ? std::string() : "; failing:" + bad));
}

// --- 3 -----------------------------------------------------------------------
void ac3() {
  auto s = example_setup(2);
  auto e = dsl::parse_energy(s.energy, s.dim);
  auto pts = generic_points(2, 10);
  bool mu_ok = true;
  double angle = 0, hmax = 0, vrel = 0;
  auto A = dsl::FieldSpec::parse(s.bracket_a, 3), B = dsl::FieldSpec::parse(s.bracket_b, 3);
  for (const auto& z : pts) {
    auto k = nullity::nullity_space(compute_geometry(e, z), Which::P);
    mu_ok = mu_ok && k.mu == 2;
    angle = std::max(angle, nullity::subspace_distance(k.basis, evaluate_fields(s.kernel_fields, z)));
    auto br = nullity::lie_bracket(e, A, B, z);
    for (double h : br.horizontal) hmax = std::max(hmax, std::abs(h));
    const double want[] = {-0.5 * z.y[0], 0, z.y[2]};
    double d = 0, sc = 0;
    for (int i = 0; i < 3; ++i) {
      d = std::max(d, std::abs(br.vertical[i] - want[i]));
      sc = std::max(sc, std::abs(want[i]));
    }
    vrel = std::max(vrel, d / sc);
  }
  auto ir = nullity::integrability_check(e, Which::P, pts, {{"X", A}, {"Y", B}});
  bool pass = mu_ok && angle < 1e-6 && hmax < 1e-8 && vrel < 1e-6 && !ir.integrable;
  report(3, pass,
         "three-dimensional example on 10 random points: mu_P = 2 " + std::string(mu_ok ? "everywhere" : "NOT everywhere") +
             ", principal angle " + fmt(angle) + ", bracket horizontal " + fmt(hmax) + ", vertical vs (-y1/2, 0, y3) " +
             fmt(vrel) + ", verdict: " + ir.verdict);
}

// --- 4 -----------------------------------------------------------------------
void ac4(const ExampleReport& r3) {
  auto s = example_setup(3);
  auto e = dsl::parse_energy(s.energy, s.dim);
  auto pts = generic_points(3, 10);
  bool mu_ok = true;
  double angle = 0, vmin = 1e300;
  auto A = dsl::FieldSpec::parse(s.bracket_a, 4), B = dsl::FieldSpec::parse(s.bracket_b, 4);
  for (const auto& z : pts) {
    auto k = nullity::nullity_space(compute_geometry(e, z), Which::Q);
    mu_ok = mu_ok && k.mu == 2;
    angle = std::max(angle, nullity::subspace_distance(k.basis, evaluate_fields(s.kernel_fields, z)));
    double v = 0;
    for (double c : nullity::lie_bracket(e, A, B, z).vertical) v = std::max(v, std::abs(c));
    vmin = std::min(vmin, v);
  }
  auto ir = nullity::integrability_check(e, Which::Q, pts, {{"X", A}, {"Y", B}});
  int matched = 0, matched_first = 0, total = 0;
  bool oracle_ok = true;
  for (const auto& t : r3.tables) {
    matched += t.matched;
    matched_first += t.matched_canonical;
    total += static_cast<int>(t.entries.size());
    oracle_ok = oracle_ok && t.oracle_consistent;
  }
  double ratio = static_cast<double>(matched) / total;
  bool pass = mu_ok && angle < 1e-6 && vmin > 1e-6 && !ir.integrable && oracle_ok && ratio >= 0.8;
  report(4, pass,
         "exponential example on 10 random points: mu_Q = 2 " + std::string(mu_ok ? "everywhere" : "NOT everywhere") +
             ", principal angle " + fmt(angle) + ", min |vertical bracket| " + fmt(vmin) + ", verdict: " + ir.verdict +
             "; printed Q and bracket entries matching the oracle-confirmed values: " + std::to_string(matched) + "/" +
             std::to_string(total) + " (" + fmt(100 * ratio) + "%, need 80%; " + std::to_string(matched_first) + "/" +
             std::to_string(total) + " at the printed point alone)");
}

// --- 5 -----------------------------------------------------------------------
void ac5() {
  struct Metric {
    std::string name, energy;
    int dim;
    std::vector<ChartPoint> pts;
  };
  std::vector<Metric> ms;
  for (int id = 1; id <= 3; ++id) {
    auto s = example_setup(id);
    ms.push_back({"example " + std::to_string(id), s.energy, s.dim, generic_points(id, 20, kSeed + id)});
  }
  {
    auto e = dsl::parse_energy("y1^2+y2^2+y3^2", 3);
    ms.push_back({"flat", e.str(), 3, box_points(e, std::vector<oracle::Interval>(6, {-1, 1}), 20, kSeed)});
  }
  {
    auto e = dsl::parse_energy(kCurved, 2);
    ms.push_back({"curved quadratic", kCurved, 2,
                  box_points(e, {{-0.6, 0.6}, {-0.6, 0.6}, {-1, 1}, {-1, 1}}, 20, kSeed)});
  }
  const std::vector<std::string> names = {"euler",        "conservative", "torsion",       "cartan_spray",
                                          "r_on_spray",   "p_on_spray",   "p_spray_slots", "q_spray_slots",
                                          "bianchi_a",    "bianchi_b",    "bianchi_c",     "bianchi_h",
                                          "barthel_bracket"};
  std::vector<double> worst(names.size(), 0);
  std::vector<std::string> where(names.size());
  int points = 0;
  for (const auto& m : ms) {
    auto rep = nullity::verify_identities(dsl::parse_energy(m.energy, m.dim), m.pts);
    points += static_cast<int>(m.pts.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
      double r = rep.result(names[i]).max_residual;
      if (r > worst[i]) {
        worst[i] = r;
        where[i] = m.name;
      }
    }
  }
  std::string failed;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!(worst[i] < 1e-6)) failed += " " + names[i] + "=" + fmt(worst[i]) + " (" + where[i] + ")";
  double overall = 0;
  for (double w : worst) overall = std::max(overall, w);
  report(5, failed.empty() && points >= 100,
         std::to_string(points) + " points over 5 metrics, " + std::to_string(names.size()) +
             " identities, worst relative residual " + fmt(overall) +
             (failed.empty() ? std::string() : "; above 1e-6:" + failed));
}

// --- 6 -----------------------------------------------------------------------
void ac6() {
  auto e = dsl::parse_energy(kCurved, 2);
  auto a = oracle::quadratic_coefficients(e);
  auto pts = box_points(e, {{-0.6, 0.6}, {-0.6, 0.6}, {-1, 1}, {-1, 1}}, 10, kSeed);
  double cart = 0, pq = 0, rrel = 0;
  bool mu_ok = true;
  for (const auto& z : pts) {
    auto b = compute_geometry(e, z);
    cart = std::max({cart, b.cartan_C.max_abs(), b.cartan_Cp.max_abs()});
    pq = std::max({pq, b.curv_P.max_abs(), b.curv_Q.max_abs()});
    auto riem = oracle::riemann_oracle(a, 2, z.x);
    double d = 0;
    for (std::size_t i = 0; i < riem.size(); ++i) d = std::max(d, std::abs(b.curv_R.data()[i] + riem.data()[i]));
    rrel = std::max(rrel, d / std::max(riem.max_abs(), 1e-300));
    mu_ok = mu_ok && nullity::nullity_space(b, Which::R).mu == nullity::kernel_of(nullity::nullity_matrix(riem)).mu;
  }
  report(6, cart < 1e-9 && pq < 1e-9 && rrel < 1e-6 && mu_ok,
         "curved quadratic energy on 10 points: |C|,|C'| " + fmt(cart) + ", |P|,|Q| " + fmt(pq) +
             ", R vs Christoffel/Riemann oracle " + fmt(rrel) + ", nullity index " +
             (mu_ok ? "agrees" : "DISAGREES"));
}

// --- 7 -----------------------------------------------------------------------
void ac7() {
  std::mt19937_64 rng(kSeed);
  double dworst = 0, bworst = 0;
  int dprobes = 0, bprobes = 0;
  const char* fields[][2] = {{"1, x2*y1, 0", "y3, 0, 1"},
                             {"y2/y1, 1, x1", "0, x3, y1*y2"},
                             {"1, y2/y1, 0", "0, 0, 1"},
                             {"exp(x1), y3, 1", "1, 1, y2^2"}};
  for (int id = 1; id <= 3; ++id) {
    auto s = example_setup(id);
    auto e = dsl::parse_energy(s.energy, s.dim);
    const int n = s.dim;
    auto pts = generic_points(id, 34, kSeed + 100 + id);
    for (std::size_t p = 0; p < pts.size() && dprobes < 100; ++p) {
      const auto& z = pts[p];
      int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
      double sym = vertical_metric(e, z)(i, j);
      double fd = oracle::fd_partial(e, {dsl::VarId::y(i + 1), dsl::VarId::y(j + 1)}, z).value;
      // exact zeros of g are compared against the metric's own scale
      double scale = std::max(std::abs(sym), 1e-3 * vertical_metric(e, z).max_abs());
      dworst = std::max(dworst, std::abs(sym - fd) / scale);
      ++dprobes;
    }
    if (n != 3) continue;
    auto bp = generic_points(id, 100, kSeed + 200);
    for (int t = 0; t < 100; ++t) {
      const auto& z = bp[t];
      auto A = dsl::FieldSpec::parse(fields[t % 4][0], 3), B = dsl::FieldSpec::parse(fields[t % 4][1], 3);
      auto fd = oracle::fd_bracket(e, A, B, z);
      auto ex = nullity::lie_bracket(e, A, B, z);
      double d = 0, sc = 1e-8;
      for (int k = 0; k < 6; ++k) {
        d = std::max(d, std::abs(fd[k] - ex.coordinate[k]));
        sc = std::max(sc, std::abs(fd[k]));
      }
      bworst = std::max(bworst, d / sc);
      ++bprobes;
    }
  }
  report(7, dprobes == 100 && bprobes == 100 && dworst < 1e-6 && bworst < 1e-5,
         std::to_string(dprobes) + " second-derivative probes, worst symbolic vs FD " + fmt(dworst) + "; " +
             std::to_string(bprobes) + " bracket probes, worst exact vs FD " + fmt(bworst));
}

// --- 8 -----------------------------------------------------------------------
void ac8() {
  std::vector<std::pair<std::string, GeometryBundle>> cases;
  for (int id = 1; id <= 3; ++id) {
    auto s = example_setup(id);
    auto e = dsl::parse_energy(s.energy, s.dim);
    cases.emplace_back("example " + std::to_string(id),
                       compute_geometry(e, require_admissible(e, s.canonical.x, s.canonical.y)));
    if (id == 1)
      cases.emplace_back("example 1 surface",
                         compute_geometry(e, require_admissible(e, {0, 0, 0, 1}, {1, 1, 1, -std::cbrt(0.4)})));
  }
  int checks = 0;
  std::string bad;
  const double base = nullity::kDefaultKernelTol;
  for (const auto& [name, b] : cases)
    for (auto w : {Which::Barthel, Which::R, Which::P, Which::Q}) {
      auto m = nullity::nullity_matrix(b, w);
      int mu = nullity::kernel_of(m, base).mu;
      for (double c : {1e-3, 1e3}) {
        ++checks;
        if (nullity::kernel_of(m * c, base).mu != mu) bad += " " + name + "/" + nullity::to_string(w) + "*" + fmt(c);
      }
      for (double f : {0.316, 0.5, 2.0, 3.16}) {
        ++checks;
        if (nullity::kernel_of(m, base * f).mu != mu)
          bad += " " + name + "/" + nullity::to_string(w) + " tol " + fmt(base * f);
      }
    }
  report(8, bad.empty(),
         std::to_string(checks) + " rescaling and tolerance-sweep checks over 4 points x 4 tensors" +
             (bad.empty() ? std::string(", every mu unchanged") : "; changed:" + bad));
}

// --- 9 -----------------------------------------------------------------------
void ac9() {
  auto once = [] {
    const char* argv[] = {"nullity-lab", "example", "1", "--seed", "42", "--format", "json"};
    std::ostringstream out, err;
    int code = run_cli(7, argv, out, err);
    return std::make_pair(code, out.str());
  };
  auto a = once(), b = once();
  report(9, a.first == 0 && a.second == b.second && !a.second.empty(),
         "two runs of `example 1 --seed 42 --format json`: " + std::to_string(a.second.size()) + " bytes, " +
             (a.second == b.second ? "identical" : "DIFFERENT"));
}

}  // namespace

int main() {
  auto guard = [](int id, auto f) {
    try {
      f();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  };
  guard(1, ac1);
  ExampleReport r1, r3;
  guard(2, [&] {
    r1 = run_example(1, kSeed);
    ac2(r1);
  });
  guard(3, ac3);
  guard(4, [&] {
    r3 = run_example(3, kSeed);
    ac4(r3);
  });
  guard(5, ac5);
  guard(6, ac6);
  guard(7, ac7);
  guard(8, ac8);
  guard(9, ac9);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
