#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finsler/nullity/bracket.hpp"
#include "finsler/nullity/kernel.hpp"

namespace finsler::nullity {

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NullityVariesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PairBracket {
  int a = 0, b = 0;
  BracketResult bracket;
  double vertical_norm = 0;
  double out_of_kernel = 0;  // membership residual of the horizontal part, 0 if it vanishes
};

struct PointIntegrability {
  ChartPoint point;
  int mu = 0;
  std::vector<std::vector<double>> frame;  // h-frame components of the fields at the point
  std::vector<PairBracket> pairs;
  double max_vertical = 0;
  double max_out_of_kernel = 0;
  double field_membership = 0;  // worst residual of the frame fields themselves
  bool closed = true;           // every bracket lies in the distribution

  // conditions of the integrability criteria, evaluated on kernel pairs
  double barthel_on_kernel = -1;   // |Rb(X,Y)| relative, P and Q
  double derivative_identity = -1; // D_JZ R against the Cartan-tensor terms, P only
  double symmetry_defect = -1;     // A(X,Y,Z) - A(Y,X,Z), Q only
  double vertical_flip = -1;       // F[JX,JY] membership in N_Q, Q only
  bool criterion_holds = true;
};

struct IntegrabilityReport {
  Which which = Which::R;
  double kernel_tol = kDefaultKernelTol;
  double bracket_tol = 1e-6;
  int mu = 0;
  std::string frame_kind;  // "gauge" or "fields"
  std::vector<std::string> field_names;
  std::vector<PointIntegrability> points;
  bool integrable = true;
  bool criterion_consistent = true;  // criterion verdict agrees with the bracket verdict
  bool fields_in_distribution = true;
  std::string verdict;
};

/// Numeric local frame: the reference kernel basis projected onto nearby kernels and re-orthonormalized.
/// Brackets come from central differences with one Richardson step.
IntegrabilityReport integrability_check(const dsl::EnergyExpr& e, Which w, const std::vector<ChartPoint>& points,
                                        double kernel_tol = kDefaultKernelTol, double bracket_tol = 1e-6);

/// Same report for user-supplied horizontal fields (exact brackets).
IntegrabilityReport integrability_check(const dsl::EnergyExpr& e, Which w, const std::vector<ChartPoint>& points,
                                        const std::vector<std::pair<std::string, dsl::FieldSpec>>& fields,
                                        double kernel_tol = kDefaultKernelTol, double bracket_tol = 1e-6);

/// Gauge frame at z given the reference basis (n x mu, orthonormal columns).
std::vector<std::vector<double>> gauge_frame(const dsl::EnergyExpr& e, Which w, const std::vector<double>& z,
                                             const std::vector<std::vector<double>>& reference, double kernel_tol);

}  // namespace finsler::nullity
