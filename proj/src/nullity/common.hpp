#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "finsler/core/geometry.hpp"

namespace finsler::nullity::detail {

inline TensorField val(const Pipeline& p, const std::string& name) { return values_of(p.tensor(name)); }

/// D_{e_A} of a named pipeline tensor at the point
inline TensorField cov(const Pipeline& p, const std::string& name, int a,
                       ConnectionKind k = ConnectionKind::Cartan) {
  return values_of(covariant(p, p.tensor(name), a, k));
}

inline TensorField negated(TensorField t) {
  for (auto& x : t.data()) x = -x;
  return t;
}

/// Curvature operators K(e_A, e_B) in the sign of the defining formula: R(X,Y) = K(hX,hY), P(X,Y) = K(hX,JY),
/// Q(X,Y) = K(JX,JY); layout [m][i][j][k] with j, k the arguments.
struct Operators {
  int n = 0;
  TensorField R, P, Q, R0, P0;
  TensorField Rb;      // components of the vertical vector Rb(X,Y) = -v[hX,hY]
  TensorField C, Cp;   // C^m_jk, C'^m_jk
  std::vector<double> y;
};

inline Operators operators(const Pipeline& p) {
  Operators o;
  o.n = p.n();
  o.R = negated(val(p, "R"));
  o.P = negated(val(p, "P"));
  o.Q = val(p, "Q");
  o.R0 = negated(val(p, "Rb0"));
  o.P0 = negated(val(p, "Pb0"));
  o.Rb = negated(val(p, "barthel"));
  o.C = val(p, "C_up");
  o.Cp = val(p, "Cp_up");
  o.y = p.point().y;
  return o;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace finsler::nullity::detail
