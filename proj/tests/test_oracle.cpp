#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "finsler/core/geometry.hpp"
#include "finsler/nullity/bracket.hpp"
#include "finsler/nullity/kernel.hpp"
#include "finsler/oracle/curvature_fd.hpp"
#include "finsler/oracle/fd.hpp"
#include "finsler/oracle/riemann.hpp"
#include "finsler/oracle/sampler.hpp"

using namespace finsler;
using dsl::parse_energy;
using dsl::VarId;

namespace {
const char* kEx1 = "x4*y1*(y2^3+y3^3+y4^3)^(1/3)";
const char* kEx2 = "exp(-x1)*(exp(-x1*x3)*y1^2*y3+x2*y2^3)^(2/3)";
const char* kEx3 = "x2*y1^2*exp(-y3/y4)+y2^2";
const char* kCurved = "y1^2+(1-x1^2)*y2^2";

oracle::SamplerConfig box_config(int dim, std::uint64_t seed, oracle::Interval iv = {0.5, 1.5}) {
  oracle::SamplerConfig c;
  c.seed = seed;
  c.dim = dim;
  c.box.assign(2 * dim, iv);
  return c;
}

double max_rel(const TensorField& a, const TensorField& b, double floor = 1e-12) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d / std::max({a.max_abs(), b.max_abs(), floor});
}
}  // namespace

TEST_SUITE("finite differences") {
  TEST_CASE("partials") {
    auto sq = parse_energy("y1^2+y2^2", 2);
    auto z = require_admissible(sq, {0.3, 0.2}, {1.7, -0.4});
    CHECK(std::abs(oracle::fd_partial(sq, {VarId::y(1), VarId::y(1)}, z).value - 2) < 1e-9);
    auto cube = parse_energy("y2^3+y1^2", 2);
    CHECK(std::abs(oracle::fd_partial(cube, {VarId::x(1)}, require_admissible(cube, {0, 0}, {1, 1})).value) < 1e-12);

    auto e = parse_energy(kEx1, 4);
    auto p = require_admissible(e, {0, 0, 0, 1}, {1, 1, 1, 1});
    double g12 = vertical_metric(e, p)(0, 1);
    auto est = oracle::fd_partial(e, {VarId::y(1), VarId::y(2)}, p);
    CHECK(std::abs(est.value - g12) / g12 < 1e-7);
    CHECK(est.error >= 0);
    CHECK(oracle::default_step(2, 100.0) > oracle::default_step(2, 1.0));
  }

  TEST_CASE("stencil leaving the domain") {
    auto e = parse_energy("x1^(1/2)*y1^2+y2^2+y1^2", 2);
    auto z = require_admissible(e, {1e-9, 1}, {1, 1});
    CHECK_THROWS_AS(oracle::fd_partial(e, {VarId::x(1)}, z, 1e-3), oracle::StencilError);
  }

  TEST_CASE("spray and Barthel connection agree with the pipeline") {
    auto e = parse_energy(kEx2, 3);
    oracle::FdGeometry fg(e);
    auto c = box_config(3, 5);
    c.box[0] = c.box[2] = {-0.5, 0.5};
    oracle::Sampler s(c, e);
    for (const auto& z : s.take(5)) {
      auto b = compute_geometry(e, z);
      auto sp = fg.spray(z.z());
      auto N = fg.barthel(z.z());
      for (int i = 0; i < 3; ++i) CHECK(std::abs(sp[i] - b.spray(i)) < 1e-9 * std::max(1.0, b.spray.max_abs()));
      for (int i = 0; i < 9; ++i) CHECK(std::abs(N[i] - b.gamma.data()[i]) < 1e-7 * std::max(1.0, b.gamma.max_abs()));
    }
  }
}

TEST_SUITE("brackets") {
  TEST_CASE("coordinate fields of the flat energy commute") {
    auto e = parse_energy("y1^2+y2^2", 2);
    auto br = oracle::fd_bracket(e, dsl::FieldSpec::frame(1, 2), dsl::FieldSpec::frame(2, 2),
                                 require_admissible(e, {0.1, 0.2}, {1, 2}));
    for (double v : br) CHECK(std::abs(v) < 1e-12);
  }

  TEST_CASE("kernel fields of the three-dimensional example") {
    auto e = parse_energy(kEx2, 3);
    auto z = require_admissible(e, {0, 1, 0}, {1, 1, 1});
    auto br = oracle::fd_bracket(e, dsl::FieldSpec::parse("1, y2/y1, 0", 3), dsl::FieldSpec::frame(3, 3), z);
    const double want[] = {0, 0, 0, -0.5, 0, 1};
    for (int k = 0; k < 6; ++k) CHECK(std::abs(br[k] - want[k]) < 1e-5);
  }

  TEST_CASE("agreement with the exact bracket on random triples") {
    const char* fields[][2] = {{"1, x2*y1, 0", "y3, 0, 1"}, {"y2/y1, 1, x1", "0, x3, y1*y2"}, {"1, 0, 0", "0, 1, 0"},
                               {"exp(x1), y3, 1", "1, 1, y2^2"}};
    oracle::Sampler s([] {
      auto c = box_config(3, 17);
      c.box[0] = c.box[2] = {-0.5, 0.5};
      return c;
    }(), parse_energy(kEx2, 3));
    auto e = parse_energy(kEx2, 3);
    int count = 0;
    for (int t = 0; t < 20; ++t) {
      auto z = s.next();
      auto a = dsl::FieldSpec::parse(fields[t % 4][0], 3), b = dsl::FieldSpec::parse(fields[t % 4][1], 3);
      auto fd = oracle::fd_bracket(e, a, b, z);
      auto ex = nullity::lie_bracket(e, a, b, z);
      double diff = 0, scale = 1e-8;
      for (int k = 0; k < 6; ++k) {
        diff = std::max(diff, std::abs(fd[k] - ex.coordinate[k]));
        scale = std::max(scale, std::abs(fd[k]));
      }
      CHECK(diff / scale < 1e-5);
      ++count;
    }
    CHECK(count == 20);
  }
}

TEST_SUITE("riemann") {
  TEST_CASE("identity metric is flat") {
    auto e = parse_energy("y1^2+y2^2+y3^2", 3);
    auto a = oracle::quadratic_coefficients(e);
    CHECK(oracle::riemann_oracle(a, 3, {0.1, 0.2, 0.3}).max_abs() == 0);
    CHECK(oracle::christoffel(a, 3, {0, 0, 0}).max_abs() == 0);
  }

  TEST_CASE("curved surrogate matches the Cartan hh-curvature") {
    auto e = parse_energy(kCurved, 2);
    auto a = oracle::quadratic_coefficients(e);
    oracle::Sampler s(box_config(2, 3, {-0.6, 0.6}), e);
    for (const auto& z : s.take(5)) {
      auto riem = oracle::riemann_oracle(a, 2, z.x);
      auto R = cartan_curvatures(e, z).R;
      TensorField neg = riem;
      for (auto& v : neg.data()) v = -v;
      CHECK(riem.max_abs() > 1e-3);
      CHECK(max_rel(R, neg) < 1e-6);
      auto kr = nullity::kernel_of(nullity::nullity_matrix(riem));
      CHECK(kr.mu == nullity::nullity_space(compute_geometry(e, z), nullity::Which::R).mu);
    }
  }

  TEST_CASE("scaling the metric keeps the nullity index") {
    auto e = parse_energy(kCurved, 2);
    auto e2 = parse_energy("2*(" + std::string(kCurved) + ")", 2);
    auto z = require_admissible(e, {0.3, 0.1}, {1, 0.5});
    auto z2 = require_admissible(e2, {0.3, 0.1}, {1, 0.5});
    CHECK(nullity::nullity_space(compute_geometry(e, z), nullity::Which::R).mu ==
          nullity::nullity_space(compute_geometry(e2, z2), nullity::Which::R).mu);
  }

  TEST_CASE("errors") {
    auto e = parse_energy("y1^2-y2^2", 2);
    CHECK_THROWS_AS(oracle::riemann_oracle(oracle::quadratic_coefficients(e), 2, {0, 0}), oracle::NotPositiveDefinite);
  }
}

TEST_SUITE("curvature oracle") {
  TEST_CASE("nested differences reproduce R, P, Q") {
    struct Case {
      const char* energy;
      int dim;
      std::vector<double> x, y;
    };
    const Case cases[] = {{kEx1, 4, {0, 0, 0, 1}, {1, 1, 1, 1}},
                          {kEx2, 3, {0, 1, 0}, {1, 1, 1}},
                          {kEx3, 4, {0, 1, 0, 0}, {1, 1, 1, 1}},
                          {"y1^2+y2^2+x1*y1*y2+(y1^4+y2^4)^(1/2)", 2, {0.3, 0.2}, {1.1, 0.7}}};
    for (const auto& c : cases) {
      auto e = parse_energy(c.energy, c.dim);
      auto z = require_admissible(e, c.x, c.y);
      auto cv = cartan_curvatures(e, z);
      // Q vanishes identically in dimension two; the floor keeps roundoff out of the ratio
      const double floor = 1e-3;
      CHECK(max_rel(oracle::fd_curvature(e, z, "R"), cv.R, floor) < 1e-6);
      CHECK(max_rel(oracle::fd_curvature(e, z, "P"), cv.P, floor) < 1e-6);
      CHECK(max_rel(oracle::fd_curvature(e, z, "Q"), cv.Q, floor) < 1e-6);
      if (c.dim == 2) CHECK(cv.Q.max_abs() < 1e-12);
    }
    auto e = parse_energy(kEx3, 4);
    CHECK_THROWS(oracle::fd_curvature(e, require_admissible(e, {0, 1, 0, 0}, {1, 1, 1, 1}), "X"));
  }
}

TEST_SUITE("sampler") {
  TEST_CASE("reproducible for a seed") {
    auto e = parse_energy(kEx3, 4);
    auto a = oracle::Sampler(box_config(4, 42), e).take(4);
    auto b = oracle::Sampler(box_config(4, 42), e).take(4);
    auto c = oracle::Sampler(box_config(4, 43), e).take(4);
    for (int i = 0; i < 4; ++i) {
      CHECK(a[i].x == b[i].x);
      CHECK(a[i].y == b[i].y);
      CHECK(a[i].admissible);
    }
    CHECK(a[0].y != c[0].y);
  }

  TEST_CASE("equality constraints land on the surface") {
    auto e = parse_energy(kEx1, 4);
    auto c = box_config(4, 7);
    c.box[3] = {0.5, 1.5};
    c.box[7] = {-2, -0.3};
    c.constraints.push_back(oracle::Constraint::parse("y2^3+y3^3+5*y4^3 = 0", 4));
    c.constraints.push_back(oracle::Constraint::parse("x4 != 0", 4));
    oracle::Sampler s(c, e);
    for (const auto& z : s.take(10)) {
      double r = z.y[1] * z.y[1] * z.y[1] + z.y[2] * z.y[2] * z.y[2] + 5 * z.y[3] * z.y[3] * z.y[3];
      CHECK(std::abs(r) < 1e-12);
    }
    // bisection path: even power
    auto c2 = box_config(2, 1);
    c2.constraints.push_back(oracle::Constraint::parse("y2^2 - y1 = 0", 2));
    oracle::Sampler s2(c2, parse_energy("y1^2+y2^2", 2));
    for (const auto& z : s2.take(3)) CHECK(std::abs(z.y[1] * z.y[1] - z.y[0]) < 1e-10);
  }

  TEST_CASE("inequalities and parse errors") {
    auto c = box_config(2, 2, {-1, 1});
    c.constraints.push_back(oracle::Constraint::parse("y1 > 0", 2));
    c.constraints.push_back(oracle::Constraint::parse("x1 <= 0", 2));
    oracle::Sampler s(c, parse_energy("y1^2+y2^2", 2));
    for (const auto& z : s.take(10)) {
      CHECK(z.y[0] > 0);
      CHECK(z.x[0] <= 0);
    }
    CHECK_THROWS(oracle::Constraint::parse("y1 + 2", 2));
    CHECK_THROWS(oracle::Constraint::parse("y5 = 0", 2));
    CHECK(oracle::last_variable(dsl::parse_expression("x1 + y2", 2), 2) == 3);
    CHECK(oracle::last_variable(dsl::parse_expression("3", 2), 2) == -1);
  }

  TEST_CASE("exhausted rejection budget") {
    auto c = box_config(2, 2);
    c.max_rejects = 50;
    c.constraints.push_back(oracle::Constraint::parse("y1 < 0", 2));
    oracle::Sampler s(c, parse_energy("y1^2+y2^2", 2));
    CHECK_THROWS_AS(s.next(), oracle::SamplerError);
  }
}
