#include <cstdio>
#include <sstream>

#include "finsler/core/serialize.hpp"
#include "finsler/nullity/report.hpp"

namespace finsler::nullity {

using nlohmann::ordered_json;

namespace {

ordered_json optional_metric(double v) { return v < 0 ? ordered_json(nullptr) : ordered_json(v); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ordered_json to_json(const NullityReport& r) {
  ordered_json j;
  j["which"] = to_string(r.which);
  j["point"] = finsler::to_json(r.point);
  j["matrix_shape"] = {r.rows, r.cols};
  j["singular_values"] = r.singular_values;
  j["tolerance"] = r.tolerance;
  j["mu"] = r.mu;
  j["basis"] = r.basis;
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

ordered_json to_json(const BracketResult& r) {
  ordered_json j;
  j["horizontal"] = r.horizontal;
  j["vertical"] = r.vertical;
  j["coordinate"] = r.coordinate;
  j["is_horizontal"] = r.is_horizontal;
  j["tolerance"] = r.tolerance;
  return j;
}

ordered_json to_json(const IntegrabilityReport& r) {
  ordered_json j;
  j["which"] = to_string(r.which);
  j["kernel_tolerance"] = r.kernel_tol;
  j["bracket_tolerance"] = r.bracket_tol;
  j["mu"] = r.mu;
  j["frame"] = r.frame_kind;
  if (!r.field_names.empty()) j["fields"] = r.field_names;
  ordered_json pts = ordered_json::array();
  for (const auto& p : r.points) {
    ordered_json q;
    q["point"] = finsler::to_json(p.point);
    q["mu"] = p.mu;
    q["frame"] = p.frame;
    ordered_json pairs = ordered_json::array();
    for (const auto& pb : p.pairs) {
      ordered_json x;
      x["a"] = pb.a;
      x["b"] = pb.b;
      x["bracket"] = to_json(pb.bracket);
      x["vertical_norm"] = pb.vertical_norm;
      x["out_of_kernel"] = pb.out_of_kernel;
      pairs.push_back(x);
    }
    q["brackets"] = pairs;
    q["max_vertical"] = p.max_vertical;
    q["max_out_of_kernel"] = p.max_out_of_kernel;
    q["field_membership"] = p.field_membership;
    q["closed"] = p.closed;
    ordered_json c;
    c["barthel_on_kernel"] = optional_metric(p.barthel_on_kernel);
    c["derivative_identity"] = optional_metric(p.derivative_identity);
    c["symmetry_defect"] = optional_metric(p.symmetry_defect);
    c["vertical_flip_membership"] = optional_metric(p.vertical_flip);
    c["holds"] = p.criterion_holds;
    q["criterion"] = c;
    pts.push_back(q);
  }
  j["points"] = pts;
  j["integrable"] = r.integrable;
  j["criterion_consistent"] = r.criterion_consistent;
  j["fields_in_distribution"] = r.fields_in_distribution;
  j["verdict"] = r.verdict;
  return j;
}

ordered_json to_json(const ClassificationReport& r) {
  ordered_json j;
  j["tolerance"] = r.tolerance;
  ordered_json props = ordered_json::array();
  for (const auto& p : r.properties) {
    ordered_json q;
    q["name"] = p.name;
    q["residual"] = p.residual;
    q["holds"] = p.holds;
    q["sample_count"] = p.sample_count;
    if (p.fit) {
      q["fit"] = *p.fit;
      q["fits"] = p.fits;
    }
    props.push_back(q);
  }
  j["properties"] = props;
  j["inconsistencies"] = r.inconsistencies;
  return j;
}

ordered_json to_json(const SuiteReport& r) {
  ordered_json j;
  j["tolerance"] = r.tolerance;
  j["kernel_tolerance"] = r.kernel_tol;
  j["deep"] = r.deep;
  j["points"] = r.points;
  ordered_json res = ordered_json::array();
  for (const auto& x : r.results) {
    ordered_json q;
    q["name"] = x.name;
    q["statement"] = x.statement;
    if (x.skipped) {
      q["status"] = "skipped";
    } else if (x.observation) {
      q["status"] = "observation";
    } else {
      q["status"] = x.pass ? "pass" : "fail";
    }
    q["max_residual"] = x.max_residual;
    q["threshold"] = x.threshold;
    q["worst_point"] = x.worst_point;
    if (!x.note.empty()) q["note"] = x.note;
    res.push_back(q);
  }
  j["results"] = res;
  j["all_pass"] = r.all_pass;
  return j;
}

std::string spectra_csv(const std::vector<NullityReport>& reports) {
  std::ostringstream os;
  os << "point,which,index,singular_value,relative,tolerance,mu\n";
  std::vector<const ChartPoint*> seen;
  for (const auto& r : reports) {
    std::size_t p = 0;
    while (p < seen.size() && !(seen[p]->x == r.point.x && seen[p]->y == r.point.y)) ++p;
    if (p == seen.size()) seen.push_back(&r.point);
    double smax = r.singular_values.empty() ? 0.0 : r.singular_values[0];
    for (std::size_t i = 0; i < r.singular_values.size(); ++i) {
      double s = r.singular_values[i];
      os << p << ',' << to_string(r.which) << ',' << i << ',' << num(s) << ',' << num(smax > 0 ? s / smax : 0.0)
         << ',' << num(r.tolerance) << ',' << r.mu << '\n';
    }
  }
  return os.str();
}

}  // namespace finsler::nullity
