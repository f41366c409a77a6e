#include "finsler/dsl/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace finsler::dsl {

namespace {

std::optional<Rational> make(__int128 p, __int128 q) {
  if (q == 0) return std::nullopt;
  if (q < 0) {
    p = -p;
    q = -q;
  }
  __int128 a = p < 0 ? -p : p, b = q;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    p /= a;
    q /= a;
  }
  const __int128 lim = INT64_MAX;
  if (p > lim || p < -lim || q > lim) return std::nullopt;
  return Rational(static_cast<std::int64_t>(p), static_cast<std::int64_t>(q));
}

}  // namespace

Rational::Rational(std::int64_t p, std::int64_t q) {
  if (q == 0) throw std::domain_error("rational with zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  std::int64_t g = std::gcd(p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  p_ = p;
  q_ = q;
}

std::string Rational::str() const {
  if (q_ == 1) return std::to_string(p_);
  return std::to_string(p_) + "/" + std::to_string(q_);
}

std::optional<Rational> Rational::add(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.p_) * b.q_ + static_cast<__int128>(b.p_) * a.q_,
              static_cast<__int128>(a.q_) * b.q_);
}

std::optional<Rational> Rational::sub(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.p_) * b.q_ - static_cast<__int128>(b.p_) * a.q_,
              static_cast<__int128>(a.q_) * b.q_);
}

std::optional<Rational> Rational::mul(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.p_) * b.p_, static_cast<__int128>(a.q_) * b.q_);
}

std::optional<Rational> Rational::div(const Rational& a, const Rational& b) {
  if (b.p_ == 0) return std::nullopt;
  return make(static_cast<__int128>(a.p_) * b.q_, static_cast<__int128>(a.q_) * b.p_);
}

std::optional<Rational> Rational::ipow(const Rational& a, std::int64_t e) {
  if (e < 0) {
    auto inv = div(Rational(1), a);
    if (!inv) return std::nullopt;
    return ipow(*inv, -e);
  }
  std::optional<Rational> r = Rational(1);
  Rational base = a;
  while (e > 0) {
    if (e & 1) {
      r = mul(*r, base);
      if (!r) return std::nullopt;
    }
    e >>= 1;
    if (e > 0) {
      auto b2 = mul(base, base);
      if (!b2) return std::nullopt;
      base = *b2;
    }
  }
  return r;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.p_) * b.q_ < static_cast<__int128>(b.p_) * a.q_;
}

namespace {

template <class F>
Number combine(const Number& a, const Number& b, F exact_op, double r) {
  if (a.exact && b.exact) {
    if (auto q = exact_op(a.q, b.q)) return Number::rational(*q);
  }
  return Number::real(r);
}

}  // namespace

Number operator+(const Number& a, const Number& b) {
  return combine(a, b, Rational::add, a.value() + b.value());
}
Number operator-(const Number& a, const Number& b) {
  return combine(a, b, Rational::sub, a.value() - b.value());
}
Number operator*(const Number& a, const Number& b) {
  return combine(a, b, Rational::mul, a.value() * b.value());
}
Number operator/(const Number& a, const Number& b) {
  return combine(a, b, Rational::div, a.value() / b.value());
}
Number operator-(const Number& a) {
  if (a.exact) return Number::rational(Rational(-a.q.num(), a.q.den()));
  return Number::real(-a.v);
}

}  // namespace finsler::dsl
