#pragma once

#include <string>
#include <vector>

#include "finsler/core/pipeline.hpp"
#include "finsler/nullity/kernel.hpp"

namespace finsler::nullity {

struct IdentityResult {
  std::string name;
  std::string statement;
  double max_residual = 0;
  double threshold = 0;   // pass iff max_residual < threshold
  int worst_point = -1;
  int points = 0;
  bool pass = true;
  bool skipped = false;
  bool observation = false;  // reported, never fails the suite
  std::string note;
};

struct SuiteReport {
  double tolerance = 1e-6;
  double kernel_tol = kDefaultKernelTol;
  bool deep = false;
  int points = 0;
  std::vector<IdentityResult> results;
  bool all_pass = true;

  const IdentityResult& result(const std::string& name) const;
};

/// Residual of an identity lhs = rhs at a point: max |lhs - rhs| over components divided by
/// max(largest single term, 1e-8). The suite keeps the maximum over points.
/// Deep checks add the identities that need first covariant derivatives of curvature.
SuiteReport verify_identities(const dsl::EnergyExpr& e, const std::vector<ChartPoint>& points, double tol = 1e-6,
                              bool deep = false, double kernel_tol = kDefaultKernelTol);

/// Names in report order for the given depth.
std::vector<std::string> identity_names(bool deep);

}  // namespace finsler::nullity
