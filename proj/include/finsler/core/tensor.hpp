#pragma once

#include <array>
#include <initializer_list>
#include <string>
#include <vector>

namespace finsler {

enum class Frame { Horizontal, Vertical, Coordinate };
enum class Valence { Up, Down };

struct Slot {
  Frame frame = Frame::Vertical;
  Valence valence = Valence::Down;
  int dim = 0;
};

struct SymmetryPair {
  int a = 0, b = 1;
  bool anti = false;
};

const char* to_string(Frame f);
const char* to_string(Valence v);

/// Dense component array at a point, row-major over slots.
class TensorField {
 public:
  TensorField() = default;
  TensorField(std::string name, std::vector<Slot> slots);

  const std::string& name() const { return name_; }
  std::size_t rank() const { return slots_.size(); }
  const std::vector<Slot>& slots() const { return slots_; }
  std::vector<int> shape() const;
  std::size_t size() const { return data_.size(); }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::size_t offset(const int* idx) const;
  template <class... I>
  double& operator()(I... i) {
    const int idx[] = {static_cast<int>(i)...};
    return data_[offset(idx)];
  }
  template <class... I>
  double operator()(I... i) const {
    const int idx[] = {static_cast<int>(i)...};
    return data_[offset(idx)];
  }
  double at(const std::vector<int>& idx) const { return data_[offset(idx.data())]; }

  TensorField& declare(SymmetryPair s);
  const std::vector<SymmetryPair>& symmetries() const { return sym_; }
  /// max |T - (+/-)T^swap| / max|T|, 0 for the zero tensor
  double symmetry_defect(const SymmetryPair& s) const;
  double max_symmetry_defect() const;

  double norm() const;
  double max_abs() const;

 private:
  std::string name_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> strides_;
  std::vector<double> data_;
  std::vector<SymmetryPair> sym_;
};

/// Calls f(idx) for every multi-index of the given shape, last index fastest.
template <class F>
void for_each_index(const std::vector<int>& shape, F&& f) {
  std::vector<int> idx(shape.size(), 0);
  for (int s : shape)
    if (s == 0) return;
  while (true) {
    f(idx);
    int k = static_cast<int>(shape.size()) - 1;
    while (k >= 0 && ++idx[k] == shape[k]) idx[k--] = 0;
    if (k < 0) return;
  }
}

}  // namespace finsler
