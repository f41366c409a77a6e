#include "finsler/core/serialize.hpp"

namespace finsler {

using nlohmann::ordered_json;

ordered_json convention_ledger() {
  ordered_json j;
  j["coordinates"] = "z = (x1..xn, y1..yn); 2n-vectors and matrices use this order";
  j["frame"] = "h_i = d/dx_i - N^m_i d/dy_m, v_i = d/dy_i";
  j["omega"] = "omega[A][B] = Omega(d_A, d_B); Omega(d/dy_a, d/dx_b) = g_ab";
  j["spray"] = "S = y^i d/dx_i - 2 G^i d/dy_i solves i_S Omega = -dE; 'spray' lists G^i";
  j["sigma"] = 1;
  j["gamma"] = "N^i_j = sigma * dG^i/dy^j";
  j["berwald_coeff"] = "G^i_jk = dN^i_j/dy^k";
  j["barthel_curv"] = "R^i_jk = h_k(N^i_j) - h_j(N^i_k), the v-component of [h_j, h_k]";
  j["cartan_C"] = "C_ijk = (1/2) dg_ij/dy^k, C^i_jk = g^il C_ljk";
  j["cartan_Cp"] = "g_mj C'^m_ki = (1/2)(L_{h_k} g)(v_i, v_j); C'_jki = g_jm C'^m_ki";
  j["conn_h"] = "D_{h_k} v_i = F^m_ik v_m";
  j["conn_v"] = "D_{v_k} v_i = C^m_ik v_m";
  j["curvature_operator"] = "K(A,B) = [D_A, D_B] - D_[A,B]";
  j["curv_R"] = "R^h_ijk = -[K(h_j, h_k) v_i]^h";
  j["curv_P"] = "P^h_ijk = -[K(h_j, v_k) v_i]^h";
  j["curv_Q"] = "Q^h_ijk = +[K(v_j, v_k) v_i]^h";
  j["berwald"] = "berwald_R, berwald_P use the curv_R, curv_P signs with the Berwald connection";
  j["nullity"] = "X^j T^h_ijk = 0 (j is the kernel slot); for barthel_curv X^j R^i_jk = 0";
  j["index_layout"] = "row-major nested arrays, slots in the order written";
  return j;
}

namespace {

ordered_json nested(const TensorField& t, std::size_t slot, std::size_t& pos) {
  if (slot == t.rank()) return t.data()[pos++];
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < t.slots()[slot].dim; ++i) arr.push_back(nested(t, slot + 1, pos));
  return arr;
}

}  // namespace

ordered_json to_json(const TensorField& t) {
  ordered_json j;
  j["name"] = t.name();
  j["shape"] = t.shape();
  ordered_json frames = ordered_json::array(), val = ordered_json::array();
  for (const auto& s : t.slots()) {
    frames.push_back(to_string(s.frame));
    val.push_back(to_string(s.valence));
  }
  j["frames"] = frames;
  j["valence"] = val;
  ordered_json sym = ordered_json::array();
  for (const auto& s : t.symmetries()) sym.push_back({{"slots", {s.a, s.b}}, {"anti", s.anti}});
  j["symmetries"] = sym;
  std::size_t pos = 0;
  j["components"] = t.rank() == 0 ? ordered_json(t.data().empty() ? 0.0 : t.data()[0]) : nested(t, 0, pos);
  return j;
}

ordered_json to_json(const ChartPoint& p) {
  ordered_json j;
  j["x"] = p.x;
  j["y"] = p.y;
  j["admissible"] = p.admissible;
  if (!p.reason.empty()) j["reason"] = p.reason;
  return j;
}

ordered_json to_json(const GeometryBundle& b) {
  ordered_json j;
  j["tool_version"] = kToolVersion;
  j["convention_ledger"] = convention_ledger();
  j["n"] = b.n;
  j["point"] = to_json(b.point);
  j["energy"] = b.energy;
  j["cond_omega"] = b.cond_omega;
  j["cond_g"] = b.cond_g;
  ordered_json t;
  for (const TensorField* f :
       {&b.omega, &b.g, &b.g_inv, &b.g_full, &b.spray, &b.spray_field, &b.gamma, &b.berwald_coeff, &b.proj_h,
        &b.proj_v, &b.J, &b.F_op, &b.barthel_curv, &b.cartan_C, &b.cartan_C_up, &b.cartan_Cp, &b.cartan_Cp_up,
        &b.conn_h, &b.conn_v, &b.curv_R, &b.curv_P, &b.curv_Q, &b.berwald_R, &b.berwald_P, &b.hbar, &b.ell})
    t[f->name()] = to_json(*f);
  j["tensors"] = t;
  j["hbar_trace_vertical"] = b.hbar_trace_vertical;
  j["hbar_trace_extended"] = b.hbar_trace_extended;
  return j;
}

}  // namespace finsler
