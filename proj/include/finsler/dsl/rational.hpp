#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace finsler::dsl {

/// Exact rational p/q with q > 0 and gcd(p, q) = 1.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t p) : p_(p) {}  // NOLINT(implicit)
  Rational(std::int64_t p, std::int64_t q);

  std::int64_t num() const { return p_; }
  std::int64_t den() const { return q_; }
  bool is_integer() const { return q_ == 1; }
  bool is_zero() const { return p_ == 0; }
  double to_double() const { return static_cast<double>(p_) / static_cast<double>(q_); }
  std::string str() const;

  // checked arithmetic: nullopt on int64 overflow
  static std::optional<Rational> add(const Rational& a, const Rational& b);
  static std::optional<Rational> sub(const Rational& a, const Rational& b);
  static std::optional<Rational> mul(const Rational& a, const Rational& b);
  static std::optional<Rational> div(const Rational& a, const Rational& b);
  static std::optional<Rational> ipow(const Rational& a, std::int64_t e);

  friend bool operator==(const Rational& a, const Rational& b) { return a.p_ == b.p_ && a.q_ == b.q_; }
  friend bool operator<(const Rational& a, const Rational& b);

 private:
  std::int64_t p_ = 0;
  std::int64_t q_ = 1;
};

/// A constant: exact rational, or an IEEE double when exactness was lost.
struct Number {
  bool exact = true;
  Rational q;
  double v = 0.0;

  static Number rational(Rational r) { return Number{true, r, r.to_double()}; }
  static Number real(double d) { return Number{false, Rational{}, d}; }
  double value() const { return exact ? q.to_double() : v; }
  bool is_zero() const { return exact ? q.is_zero() : v == 0.0; }
  bool is_one() const { return exact ? q == Rational(1) : v == 1.0; }
  bool is_integer() const { return exact && q.is_integer(); }
  bool negative() const { return value() < 0.0; }

  friend bool operator==(const Number& a, const Number& b) {
    return a.exact == b.exact && (a.exact ? a.q == b.q : a.v == b.v);
  }
};

Number operator+(const Number& a, const Number& b);
Number operator-(const Number& a, const Number& b);
Number operator*(const Number& a, const Number& b);
/// b must be nonzero.
Number operator/(const Number& a, const Number& b);
Number operator-(const Number& a);

}  // namespace finsler::dsl
