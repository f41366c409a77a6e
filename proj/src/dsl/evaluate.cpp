#include <cmath>

#include "finsler/dsl/eval.hpp"

namespace finsler::dsl {

double evaluate(const NodePtr& e, const std::vector<double>& z, int dim) {
  if (static_cast<int>(z.size()) != 2 * dim)
    throw std::invalid_argument("point has " + std::to_string(z.size()) + " coordinates, expected " +
                                std::to_string(2 * dim));
  double v = evaluate_as<double>(
      *e, [&](int i) { return z[i]; }, [](double c) { return c; }, dim);
  if (!std::isfinite(v)) throw DomainError("non-finite value", print(e));
  return v;
}

}  // namespace finsler::dsl
