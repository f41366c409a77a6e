#include "finsler/cli/examples.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "finsler/core/geometry.hpp"
#include "finsler/core/serialize.hpp"
#include "finsler/nullity/bracket.hpp"
#include "finsler/nullity/integrability.hpp"
#include "finsler/nullity/report.hpp"
#include "finsler/oracle/curvature_fd.hpp"
#include "finsler/oracle/fd.hpp"
#include "parallel.hpp"

namespace finsler::cli {

using nlohmann::ordered_json;
using nullity::Which;

namespace {

std::string expand(std::string s, const std::map<std::string, std::string>& abbrev) {
  for (const auto& [k, v] : abbrev) {
    std::size_t p;
    while ((p = s.find(k)) != std::string::npos) s.replace(p, k.size(), "(" + v + ")");
  }
  return s;
}

std::vector<PrintedTable> tables_1() {
  PrintedTable spray{"spray", "spray", 1, "printed S^i = G^i", "", "", {}};
  spray.entries = {{"S^2", {2}, "3*y2*y4/(4*x4)"},
                   {"S^3", {3}, "3*y3*y4/(4*x4)"},
                   {"S^4", {4}, "-(y2^3+y3^3-2*y4^3)/(4*x4*y4)"}};
  PrintedTable gamma{"gamma", "gamma", 1, "printed Gamma^i_j = N^i_j", "", "", {}};
  gamma.entries = {{"Gamma^2_2", {2, 2}, "3*y4/(4*x4)"},
                   {"Gamma^2_4", {2, 4}, "3*y2/(4*x4)"},
                   {"Gamma^3_3", {3, 3}, "3*y4/(4*x4)"},
                   {"Gamma^3_4", {3, 4}, "3*y3/(4*x4)"},
                   {"Gamma^4_2", {4, 2}, "-3*y2^2/(4*x4*y4)"},
                   {"Gamma^4_3", {4, 3}, "-3*y3^2/(4*x4*y4)"},
                   {"Gamma^4_4", {4, 4}, "(y2^3+y3^2+4*y4^3)/(4*x4*y4^2)"}};
  PrintedTable barthel{"barthel", "barthel", 1, "printed R^i_jk = barthel_curv R^i_jk", "", "", {}};
  barthel.entries = {{"Rb^2_23", {2, 2, 3}, "9*y3^2/(16*x4^2*y4)"},
                     {"Rb^2_24", {2, 2, 4}, "-3*(y2^3+y3^2+5*y4^3)/(16*x4^2*y4^2)"},
                     {"Rb^3_23", {3, 2, 3}, "-9*y2^2/(16*x4^2*y4)"},
                     {"Rb^3_34", {3, 3, 4}, "-3*(y2^3+y3^2+5*y4^3)/(16*x4^2*y4^2)"},
                     {"Rb^4_24", {4, 2, 4}, "3*y2^2*(y2^3+y3^2+5*y4^3)/(16*x4^2*y4^4)"},
                     {"Rb^4_34", {4, 3, 4}, "3*y3^2*(y2^3+y3^2+5*y4^3)/(16*x4^2*y4^4)"}};
  PrintedTable r{"R", "R", -1, "printed R^h_ijk = -curv_R^h_ijk, on y2^3+y3^3+5y4^3 = 0", "", "", {}};
  r.entries = {
      {"R^2_123", {2, 1, 2, 3}, "-9*y3^2/(32*x4^2*y1*y4)"},
      {"R^3_123", {3, 1, 2, 3}, "9*y2^2/(32*x4^2*y1*y4)"},
      {"R^1_223", {1, 2, 2, 3}, "-9*y1*y2*y3^2/(64*x4^2*y4^4)"},
      {"R^2_223", {2, 2, 2, 3}, "-9*y2^2*y3^2/(128*x4^2*y4^4)"},
      {"R^3_223", {3, 2, 2, 3}, "-9*y2*(4*y2^3+6*y3^3)/(256*x4^2*y4^4)"},
      {"R^4_223", {4, 2, 2, 3}, "-45*y2*y3^2/(128*x4^2*y4^3)"},
      {"R^3_224", {3, 2, 2, 4}, "-108*y2*y3/(256*x4^2*y4^2)"},
      {"R^4_224", {4, 2, 2, 4}, "-3*y2*(y3^3*(2*y3^3-30*y4^3)-y2^3*(2*y2^3+14*y4^3)-20*y4^6)/(256*x4^2*y4^7)"},
      {"R^3_234", {3, 2, 3, 4}, "27*y2^2/(64*x4^2*y4^2)"},
      {"R^4_234", {4, 2, 3, 4}, "27*y2^2*y3^2/(64*x4^2*y4^4)"},
      {"R^1_323", {1, 3, 2, 3}, "9*y1*y2^2*y3/(64*x4^2*y4^4)"},
      {"R^2_323", {2, 3, 2, 3}, "9*y3*(y2^3-8*y4^3)/(128*x4^2*y4^4)"},
      {"R^3_323", {3, 3, 2, 3}, "9*y2^2*y3^2/(128*x4^2*y4^4)"},
      {"R^4_323", {4, 3, 2, 3}, "45*y2^2*y3/(128*x4^2*y4^3)"},
      {"R^2_324", {2, 3, 2, 4}, "27*y3^2*y4^3/(64*x4^2*y4^5)"},
      {"R^4_324", {4, 3, 2, 4}, "-27*y2^2*y3^2/(64*x4^2*y4^4)"},
      {"R^2_334", {2, 3, 3, 4}, "-27*y2*y3*y4^3/(64*x4^2*y4^5)"},
      {"R^4_334", {4, 3, 3, 4}, "3*y3*(y3^3*(-3*y2^3+4*y4^3)+5*y4^3*(4*y4^3+5*y2^3)-3*y2^6)/(256*x4^2*y4^7)"},
      {"R^3_423", {3, 4, 2, 3}, "-9*y2^2/(32*x4^2*y4^2)"},
      {"R^3_424", {3, 4, 2, 4}, "27*y2^2*y3/(64*x4^2*y4^3)"},
      {"R^2_424", {2, 4, 2, 4}, "-3*(y3^3*(4*y2^3+38*y4^3)+2*y2^3*(2*y2^3+11*y4^3)+10*y2^6)/(256*x4^2*y4^6)"},
      {"R^2_432", {2, 4, 3, 2}, "-9*y3^2/(32*x4^2*y4^2)"},
      {"R^2_434", {2, 4, 3, 4}, "27*y2*y3^2/(64*x4^2*y4^3)"},
      {"R^3_434", {3, 4, 3, 4}, "-34*(y3^6+22*y3^3*y4^3+y2^3*y3^3+23*y2^3*y4^3-3*y2^6+10*y4^6)/(256*x4^2*y4^6)"}};
  return {spray, gamma, barthel, r};
}

std::vector<PrintedTable> tables_2() {
  const std::map<std::string, std::string> ab = {
      {"s1", "exp(-x1*x3)*y1^2*y3+x2*y2^3"},
      {"s2", "7*exp(-x1*x3)*y1^2*y3+12*x2*y2^3"},
      {"s3", "exp(x1*x3)*(5*exp(-x1*x3)*y1^2*y3+3*x2*y2^3)"}};
  PrintedTable p{"P", "P", 1, "printed P^h_ijk = curv_P^h_ijk", "", "", {}};
  const std::vector<PrintedEntry> raw = {
      {"P^1_111", {1, 1, 1, 1}, "-3*x2*y2^3/(32*y1*s1)"},
      {"P^2_111", {2, 1, 1, 1}, "-y2*s2/(32*y1^2*s1)"},
      {"P^3_111", {3, 1, 1, 1}, "-9*x2*y2^3*y3/(32*y1^2*s1)"},
      {"P^1_112", {1, 1, 1, 2}, "3*x2*y2^2/(32*s1)"},
      {"P^1_121", {1, 1, 2, 1}, "3*x2*y2^2/(32*s1)"},
      {"P^2_112", {2, 1, 1, 2}, "s2/(32*y1*s1)"},
      {"P^2_121", {2, 1, 2, 1}, "s2/(32*y1*s1)"},
      {"P^3_112", {3, 1, 1, 2}, "9*x2*y2^2*y3/(32*y1*s1)"},
      {"P^3_121", {3, 1, 2, 1}, "9*x2*y2^2*y3/(32*y1*s1)"},
      {"P^1_122", {1, 1, 2, 2}, "-3*x2*y1*y2/(32*s1)"},
      {"P^2_122", {2, 1, 2, 2}, "-s2/(32*y2*s1)"},
      {"P^3_122", {3, 1, 2, 2}, "-x2*y2*y3/(32*s1)"},
      {"P^1_211", {1, 2, 1, 1}, "3*x2*y2^2/(32*s1)"},
      {"P^2_211", {2, 2, 1, 1}, "x2*y2^3/(16*y1*s1)"},
      {"P^3_211", {3, 2, 1, 1}, "3*x2*y2^2*s3/(16*y1^3*s1)"},
      {"P^1_221", {1, 2, 2, 1}, "-3*x2*y1*y2/(32*s1)"},
      {"P^1_212", {1, 2, 1, 2}, "-3*x2*y1*y2/(32*s1)"},
      {"P^2_221", {2, 2, 2, 1}, "-3*x2*y2^2/(16*s1)"},
      {"P^2_212", {2, 2, 1, 2}, "-3*x2*y2^2/(16*s1)"},
      {"P^3_221", {3, 2, 2, 1}, "-3*x2*y2/(16*y1^2*s1)"},
      {"P^3_212", {3, 2, 1, 2}, "-3*x2*y2/(16*y1^2*s1)"},
      {"P^1_222", {1, 2, 2, 2}, "3*x2*y1^2/(32*s1)"},
      {"P^2_222", {2, 2, 2, 2}, "3*x2*y1*y2/(16*s1)"},
      {"P^3_222", {3, 2, 2, 2}, "3*x2*s3/(16*s1)"},
      {"P^2_311", {2, 3, 1, 1}, "y1*y2*exp(-x1*x3)/(32*s1)"},
      {"P^3_311", {3, 3, 1, 1}, "-3*x2*y2^3/(32*y1*s1)"},
      {"P^2_312", {2, 3, 1, 2}, "-x2*y1^2*exp(-x1*x3)/(32*y1^3*s1)"},
      {"P^2_321", {2, 3, 2, 1}, "-x2*y1^2*exp(-x1*x3)/(32*y1^3*s1)"},
      {"P^3_312", {3, 3, 1, 2}, "3*x2*y2^2/(32*s1)"},
      {"P^3_321", {3, 3, 2, 1}, "3*x2*y2^2/(32*s1)"},
      {"P^2_322", {2, 3, 2, 2}, "y1^3*exp(-x1*x3)/(32*y2*s1)"},
      {"P^3_322", {3, 3, 2, 2}, "-3*x2*y1*y2/(32*s1)"}};
  for (auto e : raw) {
    e.formula = expand(e.formula, ab);
    p.entries.push_back(e);
  }
  PrintedTable br{"bracket", "bracket", 1, "printed coefficient of d/dy_i in [X, Y] = vertical component i",
                  "1,y2/y1,0", "0,0,1", {}};
  br.entries = {{"[X,Y]^1", {1}, "-y1/2"}, {"[X,Y]^3", {3}, "y3"}};
  return {p, br};
}

std::vector<PrintedTable> tables_3() {
  PrintedTable q{"Q", "Q", 1, "printed Q^h_ijk = curv_Q^h_ijk", "", "", {}};
  q.entries = {{"Q^3_113", {3, 1, 1, 3}, "-y3/(2*y1^2*y4)"},
               {"Q^4_113", {4, 1, 1, 3}, "-1/(2*y1^2)"},
               {"Q^3_114", {3, 1, 1, 4}, "y3^2/(2*y1^2*y4^2)"},
               {"Q^4_114", {4, 1, 1, 4}, "y3/(2*y1^2*y4)"},
               {"Q^3_134", {3, 1, 3, 4}, "-y3/(2*y1*y4^2)"},
               {"Q^4_134", {4, 1, 3, 4}, "-1/(2*y1*y4)"},
               {"Q^3_313", {3, 3, 1, 3}, "-1/(2*y1*y4)"},
               {"Q^1_314", {1, 3, 1, 4}, "y3/(4*y4^3)"},
               {"Q^1_331", {1, 3, 3, 1}, "-1/(4*y4^2)"},
               {"Q^1_334", {1, 3, 3, 4}, "-y1/(4*y4^3)"},
               {"Q^3_334", {3, 3, 3, 4}, "-1/(2*y1^2)"},
               {"Q^3_341", {3, 3, 4, 1}, "-y3/(2*y1^2*y4)"},
               {"Q^1_413", {1, 4, 1, 3}, "y3/(4*y4^3)"},
               {"Q^3_413", {3, 4, 1, 3}, "y3/(y1*y4^2)"},
               {"Q^1_414", {1, 4, 1, 4}, "-y3^2/(4*y4^4)"},
               {"Q^3_414", {3, 4, 1, 4}, "-y3/(y1*y4^2)"},
               {"Q^4_414", {4, 4, 1, 4}, "-y3/(2*y1*y4^2)"},
               {"Q^4_413", {4, 4, 1, 3}, "1/(2*y1^2*y4)"},
               {"Q^4_423", {4, 4, 2, 3}, "1/(2*y1*y4)"},
               {"Q^1_434", {1, 4, 3, 4}, "y1*y3/(4*y4^4)"},
               {"Q^3_434", {3, 4, 3, 4}, "y3/y4^3"}};
  PrintedTable br{"bracket", "bracket", 1, "printed coefficient of d/dy_i in [X, Y] = vertical component i",
                  "0,1,0,0", "y1/y4,0,y3/y4,1", {}};
  br.entries = {{"[X,Y]^1", {1}, "-y1*y2/(2*x2^2*y4)"},
                {"[X,Y]^2", {2}, "y1^2*(5*y3-2*y4)/(4*x2*y4^2)*exp(-y3/y4)"},
                {"[X,Y]^4", {4}, "y4/(2*x2^2)"}};
  return {q, br};
}

oracle::SamplerConfig box_config(int dim, std::vector<oracle::Interval> box) {
  oracle::SamplerConfig c;
  c.dim = dim;
  c.box = std::move(box);
  return c;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::vector<double> vertical_oracle(const dsl::EnergyExpr& e, const dsl::FieldSpec& a, const dsl::FieldSpec& b,
                                    const ChartPoint& z) {
  oracle::FdGeometry geo(e);
  auto coord = oracle::fd_bracket(e, a, b, z);
  return nullity::split_bracket(coord, geo.barthel(z.z()), e.dim(), 1e-8).vertical;
}

// stored value and oracle value of one component at a point
struct PointValues {
  std::vector<double> stored, oracle;  // aligned with table entries
};

std::size_t flat(const std::vector<int>& shape, const std::vector<int>& idx) {
  std::size_t o = 0;
  for (std::size_t s = 0; s < shape.size(); ++s) o = o * shape[s] + idx[s];
  return o;
}

PointValues evaluate_table(const dsl::EnergyExpr& e, const PrintedTable& t, const ChartPoint& z) {
  const int n = e.dim();
  PointValues pv;
  std::vector<double> stored, orc;
  std::vector<int> shape;
  if (t.tensor == "bracket") {
    auto a = dsl::FieldSpec::parse(t.field_a, n), b = dsl::FieldSpec::parse(t.field_b, n);
    auto br = nullity::lie_bracket(e, a, b, z);
    stored = br.vertical;
    orc = vertical_oracle(e, a, b, z);
    shape = {n};
  } else {
    auto bundle = compute_geometry(e, z);
    const TensorField& s = bundle.by_name(t.tensor);
    stored = s.data();
    shape = s.shape();
    if (t.tensor == "spray") {
      orc = oracle::FdGeometry(e).spray(z.z());
    } else if (t.tensor == "gamma") {
      orc = oracle::FdGeometry(e).barthel(z.z());
    } else if (t.tensor == "barthel") {
      orc.assign(stored.size(), 0.0);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          if (j == k) continue;
          auto v = vertical_oracle(e, dsl::FieldSpec::frame(j + 1, n), dsl::FieldSpec::frame(k + 1, n), z);
          for (int i = 0; i < n; ++i) orc[(i * n + j) * n + k] = v[i];
        }
    } else {
      orc = oracle::fd_curvature(e, z, t.tensor).data();
    }
  }
  for (const auto& en : t.entries) {
    std::vector<int> idx;
    for (int i : en.index) idx.push_back(i - 1);
    if (idx.size() != shape.size()) throw std::logic_error("printed entry " + en.label + " has the wrong rank");
    auto f = flat(shape, idx);
    pv.stored.push_back(stored[f]);
    pv.oracle.push_back(orc[f]);
  }
  return pv;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

double rel_error(double a, double b, double floor) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::infinity();
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

oracle::SamplerConfig example1_surface(std::uint64_t seed) {
  auto c = box_config(4, {{-1, 1}, {-1, 1}, {-1, 1}, {0.5, 2}, {0.5, 2}, {0.5, 2}, {0.5, 2}, {-2, -0.3}});
  c.seed = seed;
  c.constraints.push_back(oracle::Constraint::parse("y2^3+y3^3+5*y4^3 = 0", 4));
  return c;
}

ExampleSetup example_setup(int id) {
  ExampleSetup s;
  s.id = id;
  if (id == 1) {
    s.title = "N_Rb is not contained in N_R";
    s.energy = "x4*y1*(y2^3+y3^3+y4^3)^(1/3)";
    s.dim = 4;
    s.domain = "x4 != 0; y_i != 0";
    s.canonical.x = {0, 0, 0, 1};
    s.canonical.y = {1, 1, 1, 1};
    s.generic = box_config(4, {{-1, 1}, {-1, 1}, {-1, 1}, {0.5, 2}, {0.5, 2}, {0.5, 2}, {0.5, 2}, {0.5, 2}});
    s.tables = tables_1();
    s.which = Which::Barthel;
    s.kernel_fields = {"1,0,0,0"};
  } else if (id == 2) {
    s.title = "N_P is not integrable";
    s.energy = "exp(-x1)*(exp(-x1*x3)*y1^2*y3+x2*y2^3)^(2/3)";
    s.dim = 3;
    s.domain = "x2 != 0; y1, y2 != 0";
    s.canonical.x = {0, 1, 0};
    s.canonical.y = {1, 1, 1};
    s.generic = box_config(3, {{-0.5, 0.5}, {0.5, 1.5}, {-0.5, 0.5}, {0.5, 1.5}, {0.5, 1.5}, {0.5, 1.5}});
    s.tables = tables_2();
    s.which = Which::P;
    s.kernel_fields = {"1,y2/y1,0", "0,0,1"};
    s.bracket_a = "1,y2/y1,0";
    s.bracket_b = "0,0,1";
  } else if (id == 3) {
    s.title = "N_Q is not integrable";
    s.energy = "x2*y1^2*exp(-y3/y4)+y2^2";
    s.dim = 4;
    s.domain = "x2 != 0; y1, y3, y4 != 0";
    s.canonical.x = {0, 1, 0, 0};
    s.canonical.y = {1, 1, 1, 1};
    s.generic = box_config(4, {{-1, 1}, {0.5, 1.5}, {-1, 1}, {-1, 1}, {0.5, 1.5}, {0.5, 1.5}, {0.5, 1.5}, {0.5, 1.5}});
    s.tables = tables_3();
    s.which = Which::Q;
    s.kernel_fields = {"0,1,0,0", "y1/y4,0,y3/y4,1"};
    s.bracket_a = "0,1,0,0";
    s.bracket_b = "y1/y4,0,y3/y4,1";
  } else {
    throw std::invalid_argument("example id must be 1, 2 or 3");
  }
  return s;
}

TableLedger compare_table(const dsl::EnergyExpr& e, const PrintedTable& t, const std::vector<ChartPoint>& points,
                          double tol) {
  if (points.empty()) throw std::invalid_argument("compare_table needs at least one point");
  TableLedger L;
  L.table = t;
  L.tol = tol;
  L.points = points;
  auto values = detail::parallel_map(points, [&](const ChartPoint& z) { return evaluate_table(e, t, z); });
  const int n = e.dim();
  // entries vanishing at a point are compared against the table's magnitude there
  std::vector<double> scale(points.size(), 0.0);
  for (std::size_t p = 0; p < points.size(); ++p)
    for (double v : values[p].stored) scale[p] = std::max(scale[p], std::abs(v));
  for (std::size_t k = 0; k < t.entries.size(); ++k) {
    EntryCheck c;
    c.entry = t.entries[k];
    auto f = dsl::parse_expression(t.entries[k].formula, n);
    c.match = true;
    for (std::size_t p = 0; p < points.size(); ++p) {
      double printed;
      try {
        printed = dsl::evaluate(f, points[p].z(), n);
      } catch (const dsl::DomainError&) {
        printed = nan();
      }
      double computed = t.sign * values[p].stored[k], orc = t.sign * values[p].oracle[k];
      c.printed.push_back(printed);
      c.computed.push_back(computed);
      c.oracle.push_back(orc);
      double err = rel_error(printed, computed, std::max(1e-12, 1e-6 * scale[p]));
      if (err > c.rel_error) {
        c.rel_error = err;
        c.worst_point = static_cast<int>(p);
      }
      c.oracle_error = std::max(c.oracle_error, rel_error(computed, orc, 1e-6));
      bool ok = err <= tol;
      if (p == 0) c.match_canonical = ok;
      c.match = c.match && ok;
    }
    if (c.oracle_error > L.oracle_tol) L.oracle_consistent = false;
    L.matched += c.match;
    L.matched_canonical += c.match_canonical;
    L.entries.push_back(std::move(c));
  }
  return L;
}

ordered_json to_json(const TableLedger& t) {
  ordered_json j;
  j["table"] = t.table.name;
  j["convention"] = t.table.convention;
  if (t.table.tensor == "bracket") j["fields"] = {t.table.field_a, t.table.field_b};
  j["tolerance"] = t.tol;
  j["oracle_tolerance"] = t.oracle_tol;
  ordered_json pts = ordered_json::array();
  for (const auto& p : t.points) pts.push_back(finsler::to_json(p));
  j["points"] = pts;
  j["printed_entries"] = t.entries.size();
  j["matched"] = t.matched;
  j["matched_at_first_point"] = t.matched_canonical;
  j["oracle_consistent"] = t.oracle_consistent;
  ordered_json es = ordered_json::array();
  for (const auto& c : t.entries) {
    ordered_json x;
    x["entry"] = c.entry.label;
    x["index"] = c.entry.index;
    x["formula"] = c.entry.formula;
    x["printed"] = c.printed;
    x["computed"] = c.computed;
    x["oracle"] = c.oracle;
    x["rel_error"] = std::isfinite(c.rel_error) ? ordered_json(c.rel_error) : ordered_json(nullptr);
    x["oracle_error"] = c.oracle_error;
    x["worst_point"] = c.worst_point;
    x["match"] = c.match;
    x["match_at_first_point"] = c.match_canonical;
    es.push_back(x);
  }
  j["entries"] = es;
  return j;
}

namespace {

struct KernelStats {
  std::vector<nullity::NullityReport> reports;
  std::vector<double> distances;  // to the expected span, -1 when no expectation
};

KernelStats kernels(const dsl::EnergyExpr& e, Which w, const std::vector<ChartPoint>& pts,
                    const std::vector<std::string>& expected, double ktol) {
  KernelStats k;
  const int n = e.dim();
  std::vector<dsl::FieldSpec> fs;
  for (const auto& s : expected) fs.push_back(dsl::FieldSpec::parse(s, n));
  auto res = detail::parallel_map(pts, [&](const ChartPoint& z) {
    auto r = nullity::nullity_space(compute_geometry(e, z), w, ktol);
    double d = -1;
    if (!fs.empty()) {
      std::vector<std::vector<double>> span;
      for (const auto& f : fs) span.push_back(f.evaluate(z.z()));
      d = nullity::subspace_distance(r.basis, span);
    }
    return std::make_pair(r, d);
  });
  for (auto& [r, d] : res) {
    k.reports.push_back(r);
    k.distances.push_back(d);
  }
  return k;
}

ordered_json kernel_json(const KernelStats& k) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < k.reports.size(); ++i) {
    auto j = nullity::to_json(k.reports[i]);
    j["distance_to_expected"] = k.distances[i] < 0 ? ordered_json(nullptr) : ordered_json(k.distances[i]);
    arr.push_back(j);
  }
  return arr;
}

bool all_mu(const KernelStats& k, int mu) {
  for (const auto& r : k.reports)
    if (r.mu != mu) return false;
  return true;
}

double worst(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, x);
  return m;
}

std::string mu_list(const KernelStats& k) {
  std::string s;
  for (const auto& r : k.reports) s += (s.empty() ? "" : ",") + std::to_string(r.mu);
  return s;
}

}  // namespace

ExampleReport run_example(int id, std::uint64_t seed, double tol, double kernel_tol, int count) {
  if (count < 1) throw std::invalid_argument("count must be positive");
  ExampleSetup s = example_setup(id);
  ExampleReport rep;
  rep.id = id;
  auto e = dsl::parse_energy(s.energy, s.dim);
  ChartPoint canonical = require_admissible(e, s.canonical.x, s.canonical.y);
  auto gcfg = s.generic;
  gcfg.seed = seed;
  auto generic = oracle::Sampler(gcfg, e).take(count);
  std::ostringstream tx;
  tx << "Example " << id << ": " << s.title << "\n";
  tx << "  E = " << s.energy << "   (n = " << s.dim << ", " << s.domain << ")\n";

  std::vector<ChartPoint> table_pts = {canonical};
  for (int i = 0; i < std::min(4, count); ++i) table_pts.push_back(generic[i]);
  std::vector<ChartPoint> surface, surface_table;
  if (id == 1) {
    surface = oracle::Sampler(example1_surface(seed), e).take(count);
    surface_table = {require_admissible(e, {0, 0, 0, 1}, {1, 1, 1, -std::cbrt(0.4)})};
    for (int i = 0; i < std::min(4, count); ++i) surface_table.push_back(surface[i]);
  }
  for (const auto& t : s.tables)
    rep.tables.push_back(compare_table(e, t, t.name == "R" && id == 1 ? surface_table : table_pts, tol));

  auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    rep.checks.push_back({name, pass, detail});
    rep.pass = rep.pass && pass;
  };
  for (const auto& L : rep.tables)
    check("oracle_agreement_" + L.table.name, L.oracle_consistent,
          "pipeline vs independent finite-difference oracle on every printed component");

  ordered_json body;
  body["example"] = id;
  body["title"] = s.title;
  body["energy"] = s.energy;
  body["dim"] = s.dim;
  body["domain"] = s.domain;
  body["seed"] = seed;
  body["tolerance"] = tol;
  body["kernel_tolerance"] = kernel_tol;

  std::vector<ChartPoint> kpts = {canonical};
  kpts.insert(kpts.end(), generic.begin(), generic.end());

  if (id == 1) {
    auto gb = kernels(e, Which::Barthel, kpts, {"1,0,0,0"}, kernel_tol);
    auto gr = kernels(e, Which::R, kpts, {}, kernel_tol);
    auto sb = kernels(e, Which::Barthel, surface, {"1,0,0,0", "0,0,0,1"}, kernel_tol);
    auto sr = kernels(e, Which::R, surface, {"1,0,0,0"}, kernel_tol);
    check("generic_mu_barthel", all_mu(gb, 1), "mu_Rb = 1 off the surface: " + mu_list(gb));
    check("generic_basis_barthel", worst(gb.distances) < 1e-6, "principal angle to {h1}: " + fmt(worst(gb.distances)));
    check("surface_mu_barthel", all_mu(sb, 2), "mu_Rb = 2 on the surface: " + mu_list(sb));
    check("surface_basis_barthel", worst(sb.distances) < 1e-6,
          "principal angle to {h1, h4}: " + fmt(worst(sb.distances)));
    check("surface_mu_R", all_mu(sr, 1), "mu_R = 1 on the surface: " + mu_list(sr));
    check("surface_basis_R", worst(sr.distances) < 1e-6, "principal angle to {h1}: " + fmt(worst(sr.distances)));
    double incl = 0, proper = 1;
    for (std::size_t i = 0; i < surface.size(); ++i) {
      incl = std::max(incl, nullity::containment_residual(sr.reports[i].basis, sb.reports[i].basis));
      proper = std::min(proper, nullity::containment_residual(sb.reports[i].basis, sr.reports[i].basis));
    }
    check("inclusion_R_in_Rb", incl < 1e-6, "N_R inside N_Rb, worst sine " + fmt(incl));
    bool strict = proper > 0.5;
    check("proper_inclusion", strict, "N_Rb leaves N_R on the surface, smallest sine " + fmt(proper));
    if (strict) rep.conclusions.push_back("N_𝕽 ⊄ N_R");
    ordered_json strata;
    strata["generic"] = {{"constraint", nullptr},
                         {"mu_barthel", kernel_json(gb)},
                         {"mu_R", kernel_json(gr)}};
    strata["surface"] = {{"constraint", "y2^3+y3^3+5*y4^3 = 0"},
                         {"mu_barthel", kernel_json(sb)},
                         {"mu_R", kernel_json(sr)}};
    body["strata"] = strata;
    tx << "  generic stratum: mu_Rb = " << mu_list(gb) << "; mu_R = " << mu_list(gr) << "\n";
    tx << "  surface y2^3+y3^3+5y4^3 = 0: mu_Rb = " << mu_list(sb) << "; mu_R = " << mu_list(sr) << "\n";
  } else {
    const int n = s.dim;
    auto ks = kernels(e, s.which, kpts, s.kernel_fields, kernel_tol);
    std::string wn = nullity::to_string(s.which);
    check("mu_" + wn, all_mu(ks, 2), "mu_" + wn + " = 2: " + mu_list(ks));
    check("basis_" + wn, worst(ks.distances) < 1e-6, "principal angle to the printed span: " + fmt(worst(ks.distances)));
    auto A = dsl::FieldSpec::parse(s.bracket_a, n), B = dsl::FieldSpec::parse(s.bracket_b, n);
    auto brs = detail::parallel_map(kpts, [&](const ChartPoint& z) { return nullity::lie_bracket(e, A, B, z); });
    double hmax = 0, vmin = std::numeric_limits<double>::infinity();
    ordered_json barr = ordered_json::array();
    for (std::size_t i = 0; i < brs.size(); ++i) {
      double h = 0, v = 0;
      for (double c : brs[i].horizontal) h = std::max(h, std::abs(c));
      for (double c : brs[i].vertical) v = std::max(v, std::abs(c));
      hmax = std::max(hmax, h);
      vmin = std::min(vmin, v);
      auto j = nullity::to_json(brs[i]);
      j["point"] = finsler::to_json(kpts[i]);
      barr.push_back(j);
    }
    check("bracket_horizontal_zero", hmax < 1e-8, "max |horizontal part| " + fmt(hmax));
    check("bracket_vertical_nonzero", vmin > 1e-6, "min |vertical part| " + fmt(vmin));
    auto ir = nullity::integrability_check(e, s.which, kpts, {{"X", A}, {"Y", B}}, kernel_tol);
    bool ni = !ir.integrable;
    check("not_integrable", ni, ir.verdict);
    if (ni) rep.conclusions.push_back("N_" + wn + " not integrable");
    body["nullity"] = kernel_json(ks);
    body["brackets"] = barr;
    body["integrability"] = nullity::to_json(ir);
    tx << "  mu_" << wn << " = " << mu_list(ks) << " (" << kpts.size() << " points)\n";
    tx << "  [X, Y] with X = (" << s.bracket_a << "), Y = (" << s.bracket_b << "): horizontal max "
       << fmt(hmax) << ", vertical min " << fmt(vmin) << "\n";
    tx << "  vertical part at the first point:";
    for (double c : brs[0].vertical) tx << " " << fmt(c);
    tx << "\n";
  }

  ordered_json tabs = ordered_json::array(), errata = ordered_json::array();
  tx << "  printed tables (match = agreement at all " << table_pts.size() << " ledger points, rel tol " << fmt(tol)
     << "):\n";
  for (const auto& L : rep.tables) {
    tabs.push_back(to_json(L));
    tx << "    " << L.table.name << ": " << L.matched << "/" << L.entries.size() << " match ("
       << L.matched_canonical << "/" << L.entries.size() << " at the first point), oracle "
       << (L.oracle_consistent ? "agrees" : "DISAGREES") << "\n";
    for (const auto& c : L.entries) {
      if (c.match) continue;
      ordered_json x;
      x["table"] = L.table.name;
      x["entry"] = c.entry.label;
      x["formula"] = c.entry.formula;
      const int w = c.worst_point;
      x["point_index"] = w;
      x["point"] = finsler::to_json(L.points[w]);
      x["printed"] = c.printed[w];
      x["computed"] = c.computed[w];
      x["oracle"] = c.oracle[w];
      x["match_at_first_point"] = c.match_canonical;
      errata.push_back(x);
      tx << "      erratum " << c.entry.label << " at point " << w << ": printed " << fmt(c.printed[w]) << ", computed "
         << fmt(c.computed[w]) << ", oracle " << fmt(c.oracle[w]) << (c.match_canonical ? " (first point agrees)" : "")
         << "\n";
    }
  }
  ordered_json checks = ordered_json::array();
  for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  body["tables"] = tabs;
  body["checks"] = checks;
  body["errata"] = errata;
  body["conclusions"] = rep.conclusions;
  body["pass"] = rep.pass;
  rep.body = body;

  tx << "  checks:\n";
  for (const auto& c : rep.checks) tx << "    [" << (c.pass ? "pass" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
  for (const auto& c : rep.conclusions) tx << "  conclusion: " << c << "\n";
  rep.text = tx.str();
  return rep;
}

}  // namespace finsler::cli
