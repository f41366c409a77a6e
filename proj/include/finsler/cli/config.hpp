#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finsler/core/pipeline.hpp"
#include "finsler/dsl/expr.hpp"
#include "finsler/oracle/sampler.hpp"

namespace finsler::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run needs. Text fields stay unparsed until resolve().
struct RunConfig {
  std::string command;  // analyze, nullity, bracket, classify, verify, example
  int example_id = 0;

  std::string energy;
  int dim = 0;
  std::vector<std::string> points;  // "x1,..,xn;y1,..,yn"
  int samples = 0;                  // sampled points added when > 0 (or when no points are given)
  std::vector<std::string> box;     // "lo,hi", one per coordinate or a single one for all
  std::vector<std::string> constraints;
  int max_rejects = 10000;

  double tol = 1e-6;
  double kernel_tol = 1e-8;
  std::uint64_t seed = 42;
  std::vector<std::string> checks;  // identities, deep-checks, nullity:R|P|Q|barthel, bracket, classify
  bool deep = false;
  std::vector<std::string> fields;  // "name=e1,..,en"

  std::string format = "text";
  std::string out;
};

/// Flat "key = value" lines; '#' starts a comment; list keys (point, field, check(s), box, constraint) repeat.
/// Scalar keys overwrite the corresponding member of base.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Checks split on commas, validated and de-duplicated in first-seen order.
std::vector<std::string> normalize_checks(const std::vector<std::string>& raw);

/// "x1,..,xn;y1,..,yn" with exactly n entries on each side.
std::pair<std::vector<double>, std::vector<double>> parse_point(const std::string& text, int dim);

struct NamedField {
  std::string name;
  dsl::FieldSpec spec;
};
NamedField parse_field(const std::string& text, int dim);

/// Parsed and validated configuration.
struct Resolved {
  RunConfig raw;
  dsl::EnergyExpr energy;
  std::vector<ChartPoint> points;  // explicit points first, then sampled ones
  std::vector<NamedField> fields;
  std::vector<std::string> checks;
  std::optional<oracle::SamplerConfig> sampler;
};

/// Throws ConfigError for malformed input and AdmissibilityError for rejected explicit points.
Resolved resolve(const RunConfig& cfg);

}  // namespace finsler::cli
