#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/core/geometry.hpp"
#include "finsler/core/jet.hpp"
#include "finsler/core/serialize.hpp"
#include "finsler/oracle/fd.hpp"
#include "finsler/oracle/sampler.hpp"

using namespace finsler;
using dsl::parse_energy;
using dsl::VarId;

namespace {
const char* kEx1 = "x4*y1*(y2^3+y3^3+y4^3)^(1/3)";
const char* kEx2 = "exp(-x1)*(exp(-x1*x3)*y1^2*y3+x2*y2^3)^(2/3)";
const char* kEx3 = "x2*y1^2*exp(-y3/y4)+y2^2";

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

std::vector<ChartPoint> sample(const dsl::EnergyExpr& e, int count, std::uint64_t seed,
                               std::vector<oracle::Interval> box = {}) {
  oracle::SamplerConfig c;
  c.seed = seed;
  c.dim = e.dim();
  c.box = box.empty() ? std::vector<oracle::Interval>(2 * e.dim(), {0.5, 1.5}) : box;
  oracle::Sampler s(c, e);
  return s.take(count);
}

ChartPoint ex1_point() { return require_admissible(parse_energy(kEx1, 4), {0, 0, 0, 1}, {1, 1, 1, 1}); }
}  // namespace

TEST_SUITE("jet") {
  TEST_CASE("monomial bookkeeping") {
    auto s = jet_space(2, 3);
    CHECK(s->size(3) == 10);
    CHECK(s->size(0) == 1);
    CHECK(s->size(1) == 3);
    CHECK(s->index_of({1, 1}) >= 3);
    CHECK(s->shift(0, 1) == s->index_of({0, 1}));
    CHECK(s->shift(s->index_of({0, 3}), 0) == -1);
  }

  TEST_CASE("arithmetic and elementary functions match closed-form derivatives") {
    auto s = jet_space(2, 4);
    Jet x = Jet::variable(s, 0, 0.7), y = Jet::variable(s, 1, 1.3);
    Jet f = exp(x * y) + log(y) * pow(x, 1.5) - ipow(y, -2) / x;
    double xv = 0.7, yv = 1.3;
    CHECK(f.value() == doctest::Approx(std::exp(xv * yv) + std::log(yv) * std::pow(xv, 1.5) - 1 / (yv * yv * xv)));
    // d/dx
    double fx = yv * std::exp(xv * yv) + 1.5 * std::log(yv) * std::sqrt(xv) + 1 / (yv * yv * xv * xv);
    CHECK(f.derivative({0}) == doctest::Approx(fx).epsilon(1e-13));
    // d2/dxdy of exp(xy) = (1 + xy) exp(xy)
    Jet g = exp(x * y);
    CHECK(g.derivative({0, 1}) == doctest::Approx((1 + xv * yv) * std::exp(xv * yv)).epsilon(1e-13));
    // d4/dy4 of log(y) = -6/y^4
    CHECK(log(y).derivative({1, 1, 1, 1}) == doctest::Approx(-6 / std::pow(yv, 4)).epsilon(1e-12));
    CHECK(g.partial(0).order() == 3);
    CHECK(g.partial(0).value() == doctest::Approx(fx - 1.5 * std::log(yv) * std::sqrt(xv) - 1 / (yv * yv * xv * xv)));
  }

  TEST_CASE("reciprocal and solve") {
    auto s = jet_space(1, 5);
    Jet t = Jet::variable(s, 0, 2.0);
    Jet r = reciprocal(t);
    CHECK(r.derivative({0, 0, 0}) == doctest::Approx(-6.0 / 16.0));
    std::vector<Jet> a{t, Jet::constant(s, 1.0), Jet::constant(s, 1.0), t};
    auto inv = jet_inverse(a, 2);
    // (a inv)_00 = 1 to all orders
    Jet p = a[0] * inv[0] + a[1] * inv[2];
    CHECK(p.value() == doctest::Approx(1.0));
    for (std::size_t k = 1; k < p.coefficients().size(); ++k) CHECK(std::abs(p.coefficient(k)) < 1e-12);
  }

  TEST_CASE("truncation and composition") {
    auto s = jet_space(1, 4);
    Jet t = Jet::variable(s, 0, 0.5);
    Jet c = t.compose({std::sin(0.5), std::cos(0.5), -std::sin(0.5) / 2, -std::cos(0.5) / 6, std::sin(0.5) / 24});
    CHECK(c.derivative({0, 0, 0}) == doctest::Approx(-std::cos(0.5)).epsilon(1e-13));
    CHECK(c.truncated(2).order() == 2);
  }
}

TEST_SUITE("tensor") {
  TEST_CASE("layout and symmetry defects") {
    TensorField t("t", {{Frame::Vertical, Valence::Down, 2}, {Frame::Vertical, Valence::Down, 3}});
    CHECK(t.shape() == std::vector<int>{2, 3});
    t(1, 2) = 5;
    CHECK(t.data()[5] == 5);
    CHECK(t.at({1, 2}) == 5);
    TensorField s("s", {{Frame::Vertical, Valence::Down, 2}, {Frame::Vertical, Valence::Down, 2}});
    s(0, 1) = 1;
    s(1, 0) = 1;
    CHECK(s.symmetry_defect({0, 1, false}) == 0);
    CHECK(s.symmetry_defect({0, 1, true}) == doctest::Approx(2.0));
    int count = 0;
    for_each_index({2, 3, 2}, [&](const std::vector<int>&) { ++count; });
    CHECK(count == 12);
    for_each_index({2, 0}, [&](const std::vector<int>&) { ++count; });
    CHECK(count == 12);
  }
}

TEST_SUITE("admissibility") {
  TEST_CASE("rejections") {
    auto flat = parse_energy("y1^2+y2^2", 2);
    CHECK_FALSE(admit(flat, {0, 0}, {0, 0}).admissible);
    CHECK_THROWS_AS(require_admissible(flat, {0, 0}, {0, 0}), AdmissibilityError);
    CHECK_THROWS_AS(require_admissible(parse_energy("y1^2", 2), {0, 0}, {1, 1}), AdmissibilityError);  // g singular
    CHECK_THROWS_AS(require_admissible(parse_energy("-y1^2-y2^2", 2), {0, 0}, {1, 1}), AdmissibilityError);
    CHECK_THROWS_AS(require_admissible(parse_energy(kEx1, 4), {0, 0, 0, 0}, {1, 1, 1, 1}), AdmissibilityError);
    CHECK_THROWS(require_admissible(flat, {0}, {1, 1}));
    auto p = admit(parse_energy("ln(y1)*y2^2+y1^2", 2), {0, 0}, {-1, 1});
    CHECK_FALSE(p.admissible);
    CHECK_FALSE(p.reason.empty());
    CHECK(admit(flat, {0, 0}, {1, 0}).admissible);
  }
}

TEST_SUITE("geometry") {
  TEST_CASE("fundamental form") {
    auto e = parse_energy(kEx1, 4);
    auto om = fundamental_form(e, ex1_point());
    CHECK(rel(om(0, 7), -std::pow(3.0, -2.0 / 3.0)) < 1e-12);
    CHECK(om.max_symmetry_defect() < 1e-14);

    auto flat = parse_energy("y1^2+y2^2", 2);
    auto of = fundamental_form(flat, require_admissible(flat, {0.3, 0.1}, {1, 2}));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        CHECK(of(a, b) == 0);
        CHECK(of(2 + a, b) == (a == b ? 2.0 : 0.0));
      }
  }

  TEST_CASE("fundamental form against finite differences") {
    auto e = parse_energy(kEx2, 3);
    auto z = require_admissible(e, {0, 1, 0}, {1, 1, 1});
    auto om = fundamental_form(e, z);
    const int n = 3;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        // Omega(d/dy_b, d/dx_a) = E_{y_a y_b}, Omega(d/dx_b, d/dx_a) = E_{y_a x_b} - E_{y_b x_a}
        double gab = oracle::fd_partial(e, {VarId::y(a + 1), VarId::y(b + 1)}, z).value;
        double xx = oracle::fd_partial(e, {VarId::y(a + 1), VarId::x(b + 1)}, z).value -
                    oracle::fd_partial(e, {VarId::y(b + 1), VarId::x(a + 1)}, z).value;
        CHECK(rel(om(n + b, a), gab) < 1e-7);
        CHECK(std::abs(om(b, a) - xx) < 1e-7 * std::max(1.0, std::abs(xx)));
        CHECK(om(n + a, n + b) == 0);
      }
  }

  TEST_CASE("vertical metric") {
    auto flat = parse_energy("y1^2+y2^2", 2);
    auto gf = vertical_metric(flat, require_admissible(flat, {0, 0}, {1, 1}));
    CHECK(gf(0, 0) == 2);
    CHECK(gf(0, 1) == 0);
    auto e = parse_energy(kEx1, 4);
    auto z = ex1_point();
    auto g = vertical_metric(e, z);
    CHECK(std::abs(g(0, 0)) < 1e-15);
    CHECK(rel(g(0, 1), std::pow(3.0, -2.0 / 3.0)) < 1e-12);
    CHECK(rel(g(1, 2), oracle::fd_partial(e, {VarId::y(2), VarId::y(3)}, z).value) < 1e-7);
    auto om = fundamental_form(e, z);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) CHECK(g(a, b) == om(4 + a, b));
  }

  TEST_CASE("canonical spray") {
    auto e = parse_energy(kEx1, 4);
    auto s = canonical_spray(e, ex1_point());
    CHECK(std::abs(s(0)) < 1e-14);
    CHECK(rel(s(1), 0.75) < 1e-12);
    CHECK(rel(s(2), 0.75) < 1e-12);
    CHECK(std::abs(s(3)) < 1e-14);
    auto flat = parse_energy("y1^2+y2^2", 2);
    auto sf = canonical_spray(flat, require_admissible(flat, {0.4, 2}, {1, -1}));
    CHECK(sf.max_abs() == 0);

    auto e2 = parse_energy(kEx2, 3);
    auto z2 = require_admissible(e2, {0, 1, 0}, {1, 1, 1});
    auto s2 = canonical_spray(e2, z2);
    auto o = oracle::FdGeometry(e2).spray(z2.z());
    for (int i = 0; i < 3; ++i) CHECK(std::abs(s2(i) - o[i]) < 1e-7 * std::max(1.0, std::abs(o[i])));
  }

  TEST_CASE("Barthel connection") {
    auto e = parse_energy(kEx1, 4);
    auto g = barthel_connection(e, ex1_point());
    CHECK(rel(g(1, 1), 0.75) < 1e-12);
    CHECK(rel(g(3, 1), -0.75) < 1e-12);
    auto flat = parse_energy("y1^2+y2^2", 2);
    CHECK(barthel_connection(flat, require_admissible(flat, {0, 0}, {1, 1})).max_abs() == 0);

    // Euler relation y^k dN^i_j/dy^k = N^i_j by a central difference along y
    auto e2 = parse_energy(kEx2, 3);
    std::vector<oracle::Interval> box{{-0.5, 0.5}, {0.5, 1.5}, {-0.5, 0.5}, {0.5, 1.5}, {0.5, 1.5}, {0.5, 1.5}};
    for (const auto& z : sample(e2, 20, 11, box)) {
      const double h = 1e-4;
      auto up = z.y, dn = z.y;
      for (auto& v : up) v *= 1 + h;
      for (auto& v : dn) v *= 1 - h;
      auto N = barthel_connection(e2, z), Nu = barthel_connection(e2, require_admissible(e2, z.x, up)),
           Nd = barthel_connection(e2, require_admissible(e2, z.x, dn));
      double worst = 0;
      for (std::size_t k = 0; k < N.size(); ++k)
        worst = std::max(worst, std::abs((Nu.data()[k] - Nd.data()[k]) / (2 * h) - N.data()[k]));
      CHECK(worst < 1e-7 * std::max(1.0, N.max_abs()));
    }
  }

  TEST_CASE("Barthel curvature") {
    auto e = parse_energy(kEx1, 4);
    auto z = ex1_point();
    auto r = barthel_curvature(e, z);
    CHECK(rel(r(1, 1, 2), 9.0 / 16.0) < 1e-12);
    CHECK(r.symmetry_defect({1, 2, true}) < 1e-14);
    auto flat = parse_energy("y1^2+y2^2", 2);
    CHECK(barthel_curvature(flat, require_admissible(flat, {0, 0}, {1, 1})).max_abs() == 0);
    // R^2_24 against the bracket of h2, h4: stored R^i_jk is the vertical part of [h_j, h_k]
    auto br = oracle::fd_bracket(e, dsl::FieldSpec::frame(2, 4), dsl::FieldSpec::frame(4, 4), z);
    auto N = oracle::FdGeometry(e).barthel(z.z());
    double vert = br[4 + 1];
    for (int m = 0; m < 4; ++m) vert += N[1 * 4 + m] * br[m];
    CHECK(std::abs(r(1, 1, 3) - vert) < 1e-6);
    // the value with y3^3 in the numerator: -3 * 7 / 16 at this point
    CHECK(rel(r(1, 1, 3), -21.0 / 16.0) < 1e-12);
  }

  TEST_CASE("Cartan tensors") {
    auto flat = parse_energy("y1^2+y2^2", 2);
    auto cf = cartan_tensors(flat, require_admissible(flat, {0.2, 0}, {1, 3}));
    CHECK(cf.C.max_abs() == 0);
    CHECK(cf.Cp.max_abs() == 0);

    auto e = parse_energy(kEx1, 4);
    std::vector<oracle::Interval> box(8, {0.5, 1.5});
    for (const auto& z : sample(e, 5, 3, box)) {
      auto c = cartan_tensors(e, z);
      CHECK(c.C.max_symmetry_defect() < 1e-12);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double s = 0, sp = 0;
          for (int k = 0; k < 4; ++k) {
            s += z.y[k] * c.C(i, j, k);
            sp += z.y[k] * c.Cp(i, j, k);
          }
          CHECK(std::abs(s) < 1e-9);
          CHECK(std::abs(sp) < 1e-9);
        }
    }

    auto e3 = parse_energy(kEx3, 4);
    auto z3 = require_admissible(e3, {0, 1, 0, 0}, {1, 1, 1, 1});
    auto c3 = cartan_tensors(e3, z3);
    oracle::FdGeometry fg(e3);
    for (int k = 0; k < 4; ++k) {
      auto fn = [&](const std::vector<double>& w) { return fg.g(w); };
      auto up = z3.z(), dn = z3.z();
      const double h = 1e-5;
      up[4 + k] += h;
      dn[4 + k] -= h;
      auto gu = fn(up), gd = fn(dn);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double fd = 0.5 * (gu[i * 4 + j] - gd[i * 4 + j]) / (2 * h);
          CHECK(std::abs(c3.C(i, j, k) - fd) < 1e-7 * std::max(1.0, std::abs(fd)));
        }
    }
  }

  TEST_CASE("Cartan connection") {
    auto flat = parse_energy("y1^2+y2^2", 2);
    auto cf = cartan_connection(flat, require_admissible(flat, {0, 0}, {1, 1}));
    CHECK(cf.F.max_abs() == 0);
    CHECK(cf.C.max_abs() == 0);

    auto e = parse_energy(kEx1, 4);
    auto z = sample(e, 1, 5)[0];
    auto g = vertical_metric(e, z);
    for (int k = 0; k < 4; ++k) {
      auto dg = covariant_derivative(e, z, "g", {true, k});
      CHECK(dg.max_abs() < 1e-8 * g.max_abs());
    }

    auto e2 = parse_energy(kEx2, 3);
    auto c2 = cartan_connection(e2, require_admissible(e2, {0, 1, 0}, {1, 1, 1}));
    CHECK(c2.F.symmetry_defect({1, 2, false}) < 1e-10);
  }

  TEST_CASE("Cartan curvatures at the printed points") {
    auto e3 = parse_energy(kEx3, 4);
    auto q = cartan_curvatures(e3, require_admissible(e3, {0, 1, 0, 0}, {1, 1, 1, 1})).Q;
    CHECK(rel(q(2, 0, 0, 2), -0.5) < 1e-12);

    auto e2 = parse_energy(kEx2, 3);
    auto p = cartan_curvatures(e2, require_admissible(e2, {0, 1, 0}, {1, 1, 1})).P;
    CHECK(rel(p(0, 0, 0, 1), 3.0 / 64.0) < 1e-12);

    auto flat = parse_energy("y1^2+y2^2", 2);
    auto cf = cartan_curvatures(flat, require_admissible(flat, {0.5, 0.5}, {1, -2}));
    CHECK(cf.R.max_abs() == 0);
    CHECK(cf.P.max_abs() == 0);
    CHECK(cf.Q.max_abs() == 0);
  }

  TEST_CASE("Berwald curvatures") {
    auto flat = parse_energy("y1^2+y2^2", 2);
    auto bf = berwald_curvatures(flat, require_admissible(flat, {0, 0}, {1, 1}));
    CHECK(bf.R.max_abs() == 0);
    CHECK(bf.P.max_abs() == 0);

    auto e = parse_energy(kEx1, 4);
    for (const auto& z : sample(e, 4, 9)) {
      auto b = berwald_curvatures(e, z);
      auto rb = barthel_curvature(e, z);
      double worst = 0;
      for_each_index({4, 4, 4}, [&](const std::vector<int>& ix) {
        double s = 0;
        for (int i = 0; i < 4; ++i) s += z.y[i] * b.R(ix[0], i, ix[1], ix[2]);
        worst = std::max(worst, std::abs(s - rb(ix[0], ix[1], ix[2])));
      });
      CHECK(worst < 1e-7 * std::max(1.0, rb.max_abs()));
    }

    // linear image of the flat energy
    auto lin = parse_energy("(y1+2*y2)^2 + (y2-y3)^2 + (y1+y3)^2", 3);
    for (const auto& z : sample(lin, 3, 4)) CHECK(berwald_curvatures(lin, z).P.max_abs() < 1e-12);
  }

  TEST_CASE("covariant derivatives") {
    auto e = parse_energy(kEx1, 4);
    auto z = sample(e, 1, 21)[0];
    TensorField dc;
    for (int k = 0; k < 4; ++k) {
      auto t = covariant_derivative(e, z, "R", {false, k});
      if (k == 0) {
        dc = t;
        for (auto& v : dc.data()) v *= z.y[0];
      } else {
        for (std::size_t i = 0; i < t.size(); ++i) dc.data()[i] += z.y[k] * t.data()[i];
      }
    }
    CHECK(dc.max_abs() < 1e-8 * std::max(1.0, cartan_curvatures(e, z).R.max_abs()));
    auto flat = parse_energy("y1^2+y2^2", 2);
    CHECK(covariant_derivative(flat, require_admissible(flat, {0, 0}, {1, 1}), "C", {true, 0}).max_abs() == 0);
    CHECK_THROWS(covariant_derivative(flat, require_admissible(flat, {0, 0}, {1, 1}), "nope", {true, 0}));
  }

  TEST_CASE("angular metric") {
    auto half = parse_energy("(y1^2+y2^2)/2", 2);
    auto h = angular_metric(half, require_admissible(half, {0, 0}, {1, 0}));
    CHECK(std::abs(h(0, 0)) < 1e-15);
    CHECK(h(1, 1) == doctest::Approx(1.0));
    CHECK(std::abs(h(0, 1)) < 1e-15);

    auto e3 = parse_energy(kEx3, 4);
    for (const auto& z : sample(e3, 3, 8)) {
      auto hb = angular_metric(e3, z);
      for (int i = 0; i < 4; ++i) {
        double s = 0;
        for (int j = 0; j < 4; ++j) s += hb(i, j) * z.y[j];
        CHECK(std::abs(s) < 1e-10 * std::max(1.0, hb.max_abs()));
      }
    }
    auto z3 = require_admissible(e3, {0, 1, 0, 0}, {1, 1, 1, 1});
    auto hb = angular_metric(e3, z3);
    oracle::FdGeometry fg(e3);
    auto g = fg.g(z3.z());
    double two_e = 2 * fg.energy(z3.z());
    std::vector<double> ell(4, 0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) ell[i] += g[i * 4 + j] * z3.y[j] / std::sqrt(two_e);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(std::abs(hb(i, j) - (g[i * 4 + j] - ell[i] * ell[j])) < 1e-13);
  }

  TEST_CASE("bundle lookup and serialization") {
    auto e = parse_energy(kEx1, 4);
    auto b = compute_geometry(e, ex1_point());
    for (const char* n : {"barthel", "spray", "gamma", "R", "P", "Q", "Rb0", "Pb0", "g", "C", "Cp", "hbar"})
      CHECK_NOTHROW(b.by_name(n));
    CHECK_THROWS(b.by_name("nope"));
    auto j = to_json(b);
    CHECK(j["tensors"].contains("spray"));
    CHECK(j["tensors"]["spray"]["shape"] == std::vector<int>{4});
    CHECK(j["point"]["y"].size() == 4);
    CHECK(convention_ledger().contains("frame"));
    CHECK(std::string(kToolVersion) == "0.1.0");
    Pipeline p(e, ex1_point());
    CHECK(p.order() >= Pipeline::kMinOrder);
    CHECK_THROWS(Pipeline(e, ex1_point(), 2));
  }
}
