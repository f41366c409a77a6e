#pragma once

#include <vector>

#include "finsler/core/pipeline.hpp"
#include "finsler/dsl/expr.hpp"

namespace finsler::nullity {

/// [A, B] at a point split by the Barthel projectors: raw = horizontal^i h_i + vertical^m d/dy_m.
struct BracketResult {
  std::vector<double> horizontal;  // n, h-frame components
  std::vector<double> vertical;    // n, d/dy components
  std::vector<double> coordinate;  // 2n, raw coordinate bracket
  bool is_horizontal = false;
  double tolerance = 0;
};

/// A = A^i h_i, B = B^j h_j with exact derivatives of the coordinate representations.
BracketResult lie_bracket(const dsl::EnergyExpr& e, const dsl::FieldSpec& a, const dsl::FieldSpec& b,
                          const ChartPoint& z, double tol = 1e-8);
BracketResult lie_bracket(const Pipeline& p, const dsl::FieldSpec& a, const dsl::FieldSpec& b, double tol = 1e-8);

/// Splits a raw coordinate vector into h-frame and d/dy parts using N^m_i at the point.
BracketResult split_bracket(const std::vector<double>& coordinate, const std::vector<double>& barthel, int n,
                            double tol);

}  // namespace finsler::nullity
