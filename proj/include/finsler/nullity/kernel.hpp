#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/core/geometry.hpp"

namespace finsler::nullity {

enum class Which { Barthel, R, P, Q };

/// "barthel", "R", "P", "Q"
const char* to_string(Which w);
/// Accepts barthel / Rb / R / P / Q (case-sensitive for the single letters).
Which parse_which(const std::string& s);

constexpr double kDefaultKernelTol = 1e-8;
constexpr double kAbsoluteFloor = 1e-12;

struct NullityReport {
  Which which = Which::R;
  ChartPoint point;
  int rows = 0, cols = 0;
  std::vector<double> singular_values;  // descending
  double tolerance = kDefaultKernelTol;
  int mu = 0;
  std::vector<std::vector<double>> basis;  // orthonormal, mu vectors of n components
  std::string warning;
};

/// Curvature flattened over the j slot: rows (h,i,k) for R, P, Q and (i,k) for the Barthel curvature.
Eigen::MatrixXd nullity_matrix(const GeometryBundle& b, Which w);
Eigen::MatrixXd nullity_matrix(const TensorField& t);

NullityReport kernel_of(const Eigen::MatrixXd& a, double tol = kDefaultKernelTol);
NullityReport nullity_space(const GeometryBundle& b, Which w, double tol = kDefaultKernelTol);

/// ||A v|| / (||A|| ||v||) with the spectral norm; 0 when A vanishes. Throws on v = 0.
double membership_residual(const Eigen::MatrixXd& a, const std::vector<double>& v);
double nullity_field_membership(const GeometryBundle& b, Which w, const std::vector<double>& v);

/// Sine of the largest principal angle of span(inner) against span(outer);
/// 1 when outer is empty and inner is not, 0 when inner is empty.
double containment_residual(const std::vector<std::vector<double>>& inner,
                            const std::vector<std::vector<double>>& outer);
/// max of both containments; 1 when the dimensions differ.
double subspace_distance(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);

}  // namespace finsler::nullity
