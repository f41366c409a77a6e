#include "finsler/core/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace finsler {

const char* to_string(Frame f) {
  switch (f) {
    case Frame::Horizontal: return "horizontal";
    case Frame::Vertical: return "vertical";
    case Frame::Coordinate: return "coordinate";
  }
  return "?";
}

const char* to_string(Valence v) { return v == Valence::Up ? "up" : "down"; }

TensorField::TensorField(std::string name, std::vector<Slot> slots) : name_(std::move(name)), slots_(std::move(slots)) {
  std::size_t total = 1;
  strides_.assign(slots_.size(), 1);
  for (int k = static_cast<int>(slots_.size()) - 1; k >= 0; --k) {
    strides_[k] = total;
    total *= static_cast<std::size_t>(slots_[k].dim);
  }
  data_.assign(total, 0.0);
}

std::vector<int> TensorField::shape() const {
  std::vector<int> s;
  for (const auto& sl : slots_) s.push_back(sl.dim);
  return s;
}

std::size_t TensorField::offset(const int* idx) const {
  std::size_t o = 0;
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= slots_[k].dim) throw std::out_of_range("tensor index out of range in " + name_);
    o += strides_[k] * static_cast<std::size_t>(idx[k]);
  }
  return o;
}

TensorField& TensorField::declare(SymmetryPair s) {
  if (s.a < 0 || s.b < 0 || s.a >= static_cast<int>(rank()) || s.b >= static_cast<int>(rank()) ||
      slots_[s.a].dim != slots_[s.b].dim)
    throw std::invalid_argument("bad symmetry declaration for " + name_);
  sym_.push_back(s);
  return *this;
}

double TensorField::symmetry_defect(const SymmetryPair& s) const {
  double scale = max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for_each_index(shape(), [&](const std::vector<int>& idx) {
    auto sw = idx;
    std::swap(sw[s.a], sw[s.b]);
    double a = data_[offset(idx.data())], b = data_[offset(sw.data())];
    worst = std::max(worst, std::abs(s.anti ? a + b : a - b));
  });
  return worst / scale;
}

double TensorField::max_symmetry_defect() const {
  double w = 0.0;
  for (const auto& s : sym_) w = std::max(w, symmetry_defect(s));
  return w;
}

double TensorField::norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double TensorField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace finsler
