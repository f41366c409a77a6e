#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finsler/core/pipeline.hpp"

namespace finsler::nullity {

struct PropertyResult {
  std::string name;
  double residual = 0;  // max relative deviation over the sample
  bool holds = false;
  int sample_count = 0;
  std::optional<double> fit;  // best-fit scalar at the worst point (k0 or r)
  std::vector<double> fits;   // per point
};

struct ClassificationReport {
  double tolerance = 1e-6;
  std::vector<PropertyResult> properties;  // riemannian, landsberg, berwald, h_isotropic, s3_like
  /// Observations where a fit is exact with a nonzero scalar although the nullity theorems force it to vanish.
  std::vector<std::string> inconsistencies;

  const PropertyResult& property(const std::string& name) const;
};

/// Relative residuals: tensor max-abs over the scale of E's third y-derivatives (riemannian, landsberg),
/// the Berwald hv-curvature over the Berwald coefficients' scale, fits over the fitted tensor's max-abs.
ClassificationReport classify_space(const dsl::EnergyExpr& e, const std::vector<ChartPoint>& sample,
                                    double tol = 1e-6);

}  // namespace finsler::nullity
