#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "finsler/dsl/eval.hpp"

namespace finsler {

/// Monomial bookkeeping for truncated Taylor series in nvars variables up to a total degree.
/// Monomials are graded: all of degree 0, then degree 1, and so on.
class JetSpace {
 public:
  struct Term {
    std::uint32_t a, b, c;  // coeff[c] += x[a] * y[b]
  };

  JetSpace(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size(int degree) const { return offsets_[degree + 1]; }
  int degree(std::size_t idx) const { return deg_[idx]; }
  const std::vector<std::uint8_t>& exponents(std::size_t idx) const { return mono_[idx]; }
  /// index of monomial idx + e_var, or -1 past the order
  int shift(std::size_t idx, int var) const { return shift_[idx * nvars_ + var]; }
  int index_of(const std::vector<std::uint8_t>& alpha) const;
  /// product terms whose result has degree <= d, in a prefix of the table
  std::size_t terms_upto(int d) const { return term_end_[d]; }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  int nvars_, order_;
  std::vector<std::vector<std::uint8_t>> mono_;
  std::vector<int> deg_;
  std::vector<std::size_t> offsets_;
  std::vector<int> shift_;
  std::vector<Term> terms_;
  std::vector<std::size_t> term_end_;
  std::unordered_map<std::uint64_t, int> index_;
};

/// Shared cached space; thread-safe.
std::shared_ptr<const JetSpace> jet_space(int nvars, int order);

/// Truncated Taylor expansion c_alpha = d^alpha f / alpha! valid up to order().
class Jet {
 public:
  Jet() = default;
  Jet(std::shared_ptr<const JetSpace> space, int order);

  static Jet constant(const std::shared_ptr<const JetSpace>& s, double v, int order = -1);
  static Jet variable(const std::shared_ptr<const JetSpace>& s, int var, double v);

  double value() const { return c_.empty() ? 0.0 : c_[0]; }
  int order() const { return order_; }
  const std::shared_ptr<const JetSpace>& space() const { return space_; }
  const std::vector<double>& coefficients() const { return c_; }
  double coefficient(std::size_t idx) const { return c_[idx]; }

  /// d f / d var, valid to order()-1
  Jet partial(int var) const;
  /// partial derivative value at the expansion point; alpha as a list of variables
  double derivative(const std::vector<int>& vars) const;
  Jet truncated(int order) const;
  /// f(a) for a univariate series given by taylor[k] = f^(k)(a0)/k!
  Jet compose(const std::vector<double>& taylor) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator-(Jet a);

  friend Jet exp(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet pow(const Jet& a, double r);
  friend Jet ipow(const Jet& a, long long k);
  friend Jet reciprocal(const Jet& a);
  friend void fma_into(Jet& acc, const Jet& a, const Jet& b);

 private:
  std::shared_ptr<const JetSpace> space_;
  int order_ = 0;
  std::vector<double> c_;
};

/// Adds a * b into acc, truncating acc to the smallest order involved.
void fma_into(Jet& acc, const Jet& a, const Jet& b);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet pow(const Jet& a, double r);
Jet ipow(const Jet& a, long long k);
Jet reciprocal(const Jet& a);

/// Solve A X = B for square n x n jets (row-major) with partial pivoting on the constant parts.
std::vector<Jet> jet_solve(std::vector<Jet> a, std::vector<Jet> b, int n, int nrhs);
std::vector<Jet> jet_inverse(const std::vector<Jet>& a, int n);

}  // namespace finsler

namespace finsler::dsl {

template <>
struct ScalarTraits<finsler::Jet> {
  static double value(const finsler::Jet& t) { return t.value(); }
  static finsler::Jet exp(const finsler::Jet& t) { return finsler::exp(t); }
  static finsler::Jet log(const finsler::Jet& t) { return finsler::log(t); }
  static finsler::Jet pow(const finsler::Jet& t, double r) { return finsler::pow(t, r); }
  static finsler::Jet ipow(const finsler::Jet& t, long long k) { return finsler::ipow(t, k); }
};

}  // namespace finsler::dsl
