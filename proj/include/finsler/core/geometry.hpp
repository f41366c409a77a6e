#pragma once

#include <string>
#include <vector>

#include "finsler/core/pipeline.hpp"
#include "finsler/core/tensor.hpp"

namespace finsler {

/// Everything derived from E at one admissible point.
/// Curvature layouts: R^h_ijk with j, k the argument slots and i the acted-on slot,
/// so the nullity equation reads X^j T^h_ijk = 0.
struct GeometryBundle {
  int n = 0;
  ChartPoint point;
  double energy = 0;
  double cond_omega = 0, cond_g = 0;

  TensorField omega;         // coordinate 2n x 2n
  TensorField g, g_inv;      // vertical
  TensorField g_full;        // coordinate 2n x 2n extended metric
  TensorField spray;         // G^i
  TensorField spray_field;   // S in coordinates, 2n
  TensorField gamma;         // N^i_j
  TensorField berwald_coeff; // G^i_jk
  TensorField proj_h, proj_v, J, F_op;  // coordinate 2n x 2n, column A = image of d_A
  TensorField barthel_curv;  // R^i_jk
  TensorField cartan_C, cartan_C_up;    // C_ijk, C^i_jk
  TensorField cartan_Cp, cartan_Cp_up;  // C'_ijk, C'^i_jk
  TensorField conn_h, conn_v;           // F^i_jk, C^i_jk
  TensorField curv_R, curv_P, curv_Q;
  TensorField berwald_R, berwald_P;
  TensorField hbar, ell;
  double hbar_trace_vertical = 0;   // g^ij hbar_ij
  double hbar_trace_extended = 0;   // trace against the extended metric

  const TensorField& by_name(const std::string& name) const;
};

GeometryBundle bundle_from(const Pipeline& p);
GeometryBundle compute_geometry(const dsl::EnergyExpr& e, const ChartPoint& z);

/// Point with admissibility checked; throws AdmissibilityError when rejected.
ChartPoint require_admissible(const dsl::EnergyExpr& e, const std::vector<double>& x, const std::vector<double>& y);

TensorField fundamental_form(const dsl::EnergyExpr& e, const ChartPoint& z);
TensorField vertical_metric(const dsl::EnergyExpr& e, const ChartPoint& z);
TensorField canonical_spray(const dsl::EnergyExpr& e, const ChartPoint& z);
TensorField barthel_connection(const dsl::EnergyExpr& e, const ChartPoint& z);
TensorField barthel_curvature(const dsl::EnergyExpr& e, const ChartPoint& z);

struct CartanTensors {
  TensorField C, C_up, Cp, Cp_up;
};
CartanTensors cartan_tensors(const dsl::EnergyExpr& e, const ChartPoint& z);

struct CartanConnection {
  TensorField F, C;
};
CartanConnection cartan_connection(const dsl::EnergyExpr& e, const ChartPoint& z);

struct Curvatures {
  TensorField R, P, Q;
};
Curvatures cartan_curvatures(const dsl::EnergyExpr& e, const ChartPoint& z);

struct BerwaldCurvatures {
  TensorField R, P;
};
BerwaldCurvatures berwald_curvatures(const dsl::EnergyExpr& e, const ChartPoint& z);

struct Direction {
  bool horizontal = true;
  int index = 0;  // 0-based
  int frame_index(int n) const { return horizontal ? index : n + index; }
};

/// Supported names: g, C, C_up, Cp, Cp_up, barthel, R, P, Q, hbar.
TensorField covariant_derivative(const dsl::EnergyExpr& e, const ChartPoint& z, const std::string& tensor,
                                 Direction d);

TensorField angular_metric(const dsl::EnergyExpr& e, const ChartPoint& z);

/// Point values of a jet tensor as a TensorField on the given frame.
TensorField values_of(const JetTensor& t, Frame frame = Frame::Vertical);

}  // namespace finsler
