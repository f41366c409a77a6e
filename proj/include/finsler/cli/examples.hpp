#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "finsler/core/pipeline.hpp"
#include "finsler/nullity/kernel.hpp"
#include "finsler/oracle/sampler.hpp"

namespace finsler::cli {

/// One printed component: printed value = sign * stored component at index (1-based, printed order).
struct PrintedEntry {
  std::string label;
  std::vector<int> index;
  std::string formula;
};

/// tensor: spray, gamma, barthel, R, P, Q, or bracket (vertical components of [field_a, field_b]).
struct PrintedTable {
  std::string name;
  std::string tensor;
  double sign = 1;
  std::string convention;
  std::string field_a, field_b;
  std::vector<PrintedEntry> entries;
};

struct EntryCheck {
  PrintedEntry entry;
  std::vector<double> printed, computed, oracle;  // one value per ledger point
  double rel_error = 0;     // printed vs computed, worst point
  double oracle_error = 0;  // computed vs oracle, worst point
  int worst_point = 0;      // ledger point with the largest rel_error
  bool match = false;            // at every ledger point
  bool match_canonical = false;  // at the first ledger point
};

struct TableLedger {
  PrintedTable table;
  double tol = 1e-6;
  double oracle_tol = 1e-6;
  std::vector<ChartPoint> points;
  std::vector<EntryCheck> entries;
  int matched = 0, matched_canonical = 0;
  bool oracle_consistent = true;
};

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ExampleSetup {
  int id = 0;
  std::string title;
  std::string energy;
  int dim = 0;
  std::string domain;
  ChartPoint canonical;
  oracle::SamplerConfig generic;  // seed filled in by the caller
  std::vector<PrintedTable> tables;
  nullity::Which which = nullity::Which::R;
  std::vector<std::string> kernel_fields;  // expected kernel spanned by these h-frame fields
  std::string bracket_a, bracket_b;        // kernel fields whose bracket is printed
};

ExampleSetup example_setup(int id);

/// Surface stratum y2^3 + y3^3 + 5 y4^3 = 0 of the first example.
oracle::SamplerConfig example1_surface(std::uint64_t seed);

/// Relative error |a - b| / max(|a|, |b|, floor).
double rel_error(double a, double b, double floor = 1e-12);

TableLedger compare_table(const dsl::EnergyExpr& e, const PrintedTable& t, const std::vector<ChartPoint>& points,
                          double tol = 1e-6);

struct ExampleReport {
  int id = 0;
  std::vector<TableLedger> tables;
  std::vector<Check> checks;
  std::vector<std::string> conclusions;
  nlohmann::ordered_json body;  // deterministic
  std::string text;
  bool pass = true;
};

/// Kernel-point count defaults to 10 per stratum.
ExampleReport run_example(int id, std::uint64_t seed, double tol = 1e-6, double kernel_tol = nullity::kDefaultKernelTol,
                          int count = 10);

nlohmann::ordered_json to_json(const TableLedger& t);

}  // namespace finsler::cli
