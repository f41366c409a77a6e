#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/core/pipeline.hpp"
#include "finsler/dsl/expr.hpp"

namespace finsler::oracle {

enum class Relation { Eq, Ne, Gt, Lt, Ge, Le };

/// lhs - rhs compared against zero.
struct Constraint {
  dsl::NodePtr f;
  Relation rel = Relation::Eq;
  std::string text;

  /// "y2^3+y3^3+5*y4^3 = 0", "x4 != 0", "y1 > 0", ...
  static Constraint parse(const std::string& text, int dim);
};

struct Interval {
  double lo = 0, hi = 0;
};

struct SamplerConfig {
  std::uint64_t seed = 0;
  int dim = 0;
  /// one interval per coordinate, ordered x1..xn, y1..yn
  std::vector<Interval> box;
  std::vector<Constraint> constraints;
  int max_rejects = 10000;
};

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Draws points uniformly from the box. Each equality constraint is solved for the highest-index
/// coordinate it involves: in closed form when the constraint is c0 + c*v^p with odd p, else by bisection
/// on that coordinate's interval. Points failing any constraint or admissibility are rejected.
class Sampler {
 public:
  Sampler(SamplerConfig cfg, std::optional<dsl::EnergyExpr> energy = std::nullopt, std::uint64_t worker = 0);
  ChartPoint next();
  std::vector<ChartPoint> take(int count);
  int rejects() const { return rejects_; }

 private:
  SamplerConfig cfg_;
  std::optional<dsl::EnergyExpr> energy_;
  std::mt19937_64 rng_;
  int rejects_ = 0;
  bool satisfies(const std::vector<double>& z, const Constraint& c) const;
  bool solve_equality(std::vector<double>& z, const Constraint& c) const;
};

/// Highest flat index appearing in f, or -1.
int last_variable(const dsl::NodePtr& f, int dim);

}  // namespace finsler::oracle
