#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "finsler/core/geometry.hpp"
#include "finsler/nullity/bracket.hpp"
#include "finsler/nullity/classify.hpp"
#include "finsler/nullity/identities.hpp"
#include "finsler/nullity/integrability.hpp"
#include "finsler/nullity/kernel.hpp"
#include "finsler/nullity/report.hpp"
#include "finsler/oracle/fd.hpp"
#include "finsler/oracle/sampler.hpp"

using namespace finsler;
using namespace finsler::nullity;
using dsl::FieldSpec;
using dsl::parse_energy;

namespace {
const char* kEx1 = "x4*y1*(y2^3+y3^3+y4^3)^(1/3)";
const char* kEx2 = "exp(-x1)*(exp(-x1*x3)*y1^2*y3+x2*y2^3)^(2/3)";
const char* kEx3 = "x2*y1^2*exp(-y3/y4)+y2^2";

std::vector<double> unit(int i, int n) {
  std::vector<double> v(n, 0);
  v[i] = 1;
  return v;
}

ChartPoint surface_point() {
  return require_admissible(parse_energy(kEx1, 4), {0, 0, 0, 1}, {1, 1, 1, -std::cbrt(0.4)});
}

std::vector<ChartPoint> sample(const dsl::EnergyExpr& e, int count, std::uint64_t seed,
                               std::vector<oracle::Interval> box = {}) {
  oracle::SamplerConfig c;
  c.seed = seed;
  c.dim = e.dim();
  c.box = box.empty() ? std::vector<oracle::Interval>(2 * e.dim(), {0.5, 1.5}) : box;
  return oracle::Sampler(c, e).take(count);
}

std::vector<oracle::Interval> near(const std::vector<double>& x, const std::vector<double>& y, double r) {
  std::vector<oracle::Interval> b;
  for (double v : x) b.push_back({v - r, v + r});
  for (double v : y) b.push_back({v - r, v + r});
  return b;
}
}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("generic and surface strata of the four-dimensional example") {
    auto e = parse_energy(kEx1, 4);
    auto g = compute_geometry(e, require_admissible(e, {0, 0, 0, 1}, {1, 1, 1, 1}));
    auto kb = nullity_space(g, Which::Barthel);
    CHECK(kb.mu == 1);
    CHECK(subspace_distance(kb.basis, {unit(0, 4)}) < 1e-8);

    auto s = compute_geometry(e, surface_point());
    auto sb = nullity_space(s, Which::Barthel), sr = nullity_space(s, Which::R);
    CHECK(sb.mu == 2);
    CHECK(subspace_distance(sb.basis, {unit(0, 4), unit(3, 4)}) < 1e-6);
    CHECK(sr.mu == 1);
    CHECK(subspace_distance(sr.basis, {unit(0, 4)}) < 1e-6);
    CHECK(containment_residual(sr.basis, sb.basis) < 1e-8);
    CHECK(containment_residual(sb.basis, sr.basis) > 0.5);
  }

  TEST_CASE("flat energy has maximal nullity") {
    auto e = parse_energy("y1^2+y2^2", 2);
    auto b = compute_geometry(e, require_admissible(e, {0, 0}, {1, 1}));
    for (auto w : {Which::Barthel, Which::R, Which::P, Which::Q}) {
      auto r = nullity_space(b, w);
      CHECK(r.mu == 2);
      CHECK_FALSE(r.warning.empty());
    }
  }

  TEST_CASE("spectrum and tolerance") {
    Eigen::MatrixXd a(3, 3);
    a << 1, 0, 0, 0, 1e-3, 0, 0, 0, 1e-10;
    CHECK(kernel_of(a, 1e-8).mu == 1);
    CHECK(kernel_of(a, 1e-2).mu == 2);
    CHECK(kernel_of(a * 1e3, 1e-8).mu == 1);
    auto r = kernel_of(a);
    CHECK(r.singular_values.size() == 3);
    CHECK(r.singular_values[0] >= r.singular_values[1]);
    CHECK(kernel_of(Eigen::MatrixXd::Zero(2, 3)).mu == 3);
  }

  TEST_CASE("membership residuals") {
    auto s = compute_geometry(parse_energy(kEx1, 4), surface_point());
    CHECK(nullity_field_membership(s, Which::R, unit(0, 4)) < 1e-9);
    CHECK(nullity_field_membership(s, Which::Barthel, unit(1, 4)) > 1e-3);
    CHECK_THROWS(nullity_field_membership(s, Which::R, {0, 0, 0, 0}));
    auto e2 = parse_energy(kEx3, 4);
    for (const auto& z : sample(e2, 3, 2)) CHECK(nullity_field_membership(compute_geometry(e2, z), Which::P, z.y) < 1e-9);
  }

  TEST_CASE("subspace helpers and names") {
    CHECK(containment_residual({}, {unit(0, 2)}) == 0);
    CHECK(containment_residual({unit(0, 2)}, {}) == 1);
    CHECK(subspace_distance({unit(0, 3)}, {unit(0, 3), unit(1, 3)}) == 1);
    CHECK(subspace_distance({{1, 1, 0}}, {{2, 2, 0}}) < 1e-15);
    CHECK(parse_which("barthel") == Which::Barthel);
    CHECK(parse_which("Rb") == Which::Barthel);
    CHECK(parse_which("Q") == Which::Q);
    CHECK_THROWS(parse_which("q"));
    CHECK(std::string(to_string(Which::P)) == "P");
  }
}

TEST_SUITE("bracket") {
  TEST_CASE("kernel fields of the three-dimensional example") {
    auto e = parse_energy(kEx2, 3);
    auto r = lie_bracket(e, FieldSpec::parse("1, y2/y1, 0", 3), FieldSpec::frame(3, 3),
                         require_admissible(e, {0, 1, 0}, {1, 1, 1}));
    for (double h : r.horizontal) CHECK(std::abs(h) < 1e-8);
    CHECK(std::abs(r.vertical[0] + 0.5) < 1e-12);
    CHECK(std::abs(r.vertical[1]) < 1e-12);
    CHECK(std::abs(r.vertical[2] - 1) < 1e-12);
    CHECK_FALSE(r.is_horizontal);
  }

  TEST_CASE("frame fields of the flat energy commute") {
    auto e = parse_energy("y1^2+y2^2", 2);
    auto r = lie_bracket(e, FieldSpec::frame(1, 2), FieldSpec::frame(2, 2), require_admissible(e, {0, 0}, {1, 1}));
    for (double v : r.coordinate) CHECK(v == 0);
    CHECK(r.is_horizontal);
  }

  TEST_CASE("kernel fields of the exponential example against finite differences") {
    auto e = parse_energy(kEx3, 4);
    auto z = require_admissible(e, {0, 1, 0, 0}, {1, 1, 1, 1});
    auto a = FieldSpec::frame(2, 4), b = FieldSpec::parse("y1/y4, 0, y3/y4, 1", 4);
    auto r = lie_bracket(e, a, b, z);
    auto fd = oracle::fd_bracket(e, a, b, z);
    auto split = split_bracket(fd, oracle::FdGeometry(e).barthel(z.z()), 4, 1e-8);
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(r.horizontal[k]) < 1e-8);
      CHECK(std::abs(r.vertical[k] - split.vertical[k]) < 1e-5);
    }
    CHECK_FALSE(r.is_horizontal);
  }

  TEST_CASE("coefficient domain violation") {
    auto e = parse_energy("y1^2+y2^2", 2);
    CHECK_THROWS_AS(lie_bracket(e, FieldSpec::parse("1/(y1-1), 0", 2), FieldSpec::frame(2, 2),
                                require_admissible(e, {0, 0}, {1, 1})),
                    dsl::DomainError);
  }
}

TEST_SUITE("integrability") {
  TEST_CASE("P-nullity distribution of the three-dimensional example") {
    auto e = parse_energy(kEx2, 3);
    auto pts = sample(e, 3, 4, near({0, 1, 0}, {1, 1, 1}, 0.1));
    auto rep = integrability_check(e, Which::P, pts);
    CHECK(rep.mu == 2);
    CHECK_FALSE(rep.integrable);
    auto fields = integrability_check(e, Which::P, pts,
                                      {{"X", FieldSpec::parse("1, y2/y1, 0", 3)}, {"Y", FieldSpec::frame(3, 3)}});
    CHECK_FALSE(fields.integrable);
    CHECK(fields.fields_in_distribution);
    CHECK(fields.frame_kind == "fields");
  }

  TEST_CASE("Q-nullity distribution of the exponential example") {
    auto e = parse_energy(kEx3, 4);
    auto pts = sample(e, 3, 6, near({0, 1, 0, 0}, {1, 1, 1, 1}, 0.1));
    auto rep = integrability_check(e, Which::Q, pts);
    CHECK(rep.mu == 2);
    CHECK_FALSE(rep.integrable);
  }

  TEST_CASE("flat space is integrable") {
    auto e = parse_energy("y1^2+y2^2+y3^2", 3);
    auto rep = integrability_check(e, Which::R, sample(e, 2, 1));
    CHECK(rep.mu == 3);
    CHECK(rep.integrable);
  }

  TEST_CASE("errors") {
    auto e = parse_energy(kEx1, 4);
    auto generic = require_admissible(e, {0, 0, 0, 1}, {1, 1, 1, 1});
    CHECK_THROWS_AS(integrability_check(e, Which::Barthel, {generic, surface_point()}), NullityVariesError);
    // the surface stratum is thin: the gauge stencil sees mu drop
    CHECK_THROWS_AS(integrability_check(e, Which::Barthel, {surface_point()}), FrameError);
    CHECK_THROWS_AS(integrability_check(e, Which::R, {generic}, {{"Z", FieldSpec::parse("0,0,0,0", 4)}}), FrameError);
  }
}

TEST_SUITE("classify") {
  TEST_CASE("flat energy has every property") {
    auto e = parse_energy("y1^2+y2^2", 2);
    auto r = classify_space(e, sample(e, 3, 1));
    for (const char* p : {"riemannian", "landsberg", "berwald", "h_isotropic", "s3_like"})
      CHECK(r.property(p).holds);
    CHECK(r.property("h_isotropic").fit.value_or(1) == 0);
    CHECK(r.property("s3_like").fit.value_or(1) == 0);
    CHECK_THROWS(r.property("nope"));
  }

  TEST_CASE("non-Riemannian examples") {
    auto e = parse_energy(kEx1, 4);
    CHECK_FALSE(classify_space(e, sample(e, 3, 2)).property("riemannian").holds);
    auto randers = parse_energy("((y1^2+y2^2+y3^2)^(1/2) + 0.1*y1)^2", 3);
    auto r = classify_space(randers, sample(randers, 10, 3));
    CHECK_FALSE(r.property("riemannian").holds);
    CHECK(r.property("berwald").sample_count == 10);
    // constant coefficients: locally Minkowski, so the Berwald hv-curvature vanishes
    CHECK(r.property("berwald").holds);
    auto varying = parse_energy("((y1^2+y2^2+y3^2)^(1/2) + 0.1*x1*y2)^2", 3);
    auto v = classify_space(varying, sample(varying, 10, 3));
    CHECK_FALSE(v.property("berwald").holds);
    CHECK_FALSE(v.property("landsberg").holds);
  }
}

TEST_SUITE("identities") {
  TEST_CASE("curvature contractions at random points of the four-dimensional example") {
    auto e = parse_energy(kEx1, 4);
    auto rep = verify_identities(e, sample(e, 50, 12));
    for (const char* n : {"r_on_spray", "p_on_spray", "p_spray_slots", "q_spray_slots"}) {
      CHECK_MESSAGE(rep.result(n).max_residual < 1e-6, n);
      CHECK(rep.result(n).points == 50);
    }
  }

  TEST_CASE("nullity inclusion on the surface") {
    auto rep = verify_identities(parse_energy(kEx1, 4), {surface_point()});
    CHECK(rep.result("nullity_inclusion").max_residual < 1e-8);
  }

  TEST_CASE("flat energy satisfies everything exactly") {
    auto e = parse_energy("y1^2+y2^2", 2);
    auto rep = verify_identities(e, sample(e, 3, 5), 1e-6, true);
    CHECK(rep.all_pass);
    for (const auto& r : rep.results) CHECK_MESSAGE(r.max_residual < 1e-12, r.name);
  }

  TEST_CASE("vanishing second Cartan tensor is judged on the connection scale") {
    auto e = parse_energy("y1^2+(1-x1^2)*y2^2", 2);
    auto rep = verify_identities(e, sample(e, 20, 42), 1e-6, true);
    CHECK(rep.all_pass);
    for (const char* n : {"cartan_spray", "p_on_spray", "np_kills_cp"}) CHECK_MESSAGE(rep.result(n).max_residual < 1e-12, n);
  }

  TEST_CASE("deep checks are skipped unless requested") {
    auto e = parse_energy("y1^2+y2^2", 2);
    auto rep = verify_identities(e, sample(e, 1, 5));
    CHECK(rep.result("bianchi_d").skipped);
    CHECK(identity_names(true).size() > identity_names(false).size());
    CHECK_THROWS(rep.result("nope"));
  }
}

TEST_SUITE("reports") {
  TEST_CASE("json and csv") {
    auto e = parse_energy(kEx1, 4);
    auto r = nullity_space(compute_geometry(e, surface_point()), Which::R);
    auto j = to_json(r);
    CHECK(j["mu"] == 1);
    CHECK(j["which"] == "R");
    auto csv = spectra_csv({r});
    CHECK(csv.rfind("point,which,index,singular_value,relative,tolerance,mu\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4);
  }

  TEST_CASE("csv point column follows the chart point, not the report") {
    auto e = parse_energy(kEx1, 4);
    auto b = compute_geometry(e, surface_point());
    auto csv = spectra_csv({nullity_space(b, Which::R), nullity_space(b, Which::P)});
    CHECK(csv.find("\n1,") == std::string::npos);
    CHECK(csv.find("\n0,P,0,") != std::string::npos);
  }
}
