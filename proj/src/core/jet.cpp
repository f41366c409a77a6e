#include "finsler/core/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace finsler {

namespace {

std::uint64_t encode(const std::vector<std::uint8_t>& a, int base) {
  std::uint64_t k = 0;
  for (auto e : a) k = k * static_cast<std::uint64_t>(base) + e;
  return k;
}

void enumerate(int nvars, int degree, int var, std::vector<std::uint8_t>& cur,
               std::vector<std::vector<std::uint8_t>>& out) {
  if (var == nvars - 1) {
    cur[var] = static_cast<std::uint8_t>(degree);
    out.push_back(cur);
    cur[var] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[var] = static_cast<std::uint8_t>(e);
    enumerate(nvars, degree - e, var + 1, cur, out);
  }
  cur[var] = 0;
}

}  // namespace

JetSpace::JetSpace(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || order < 0 || order > 12) throw std::invalid_argument("bad jet space");
  offsets_.push_back(0);
  std::vector<std::uint8_t> cur(nvars, 0);
  for (int d = 0; d <= order; ++d) {
    enumerate(nvars, d, 0, cur, mono_);
    offsets_.push_back(mono_.size());
  }
  for (const auto& m : mono_) {
    int s = 0;
    for (auto e : m) s += e;
    deg_.push_back(s);
  }
  std::unordered_map<std::uint64_t, int> index;
  for (std::size_t i = 0; i < mono_.size(); ++i) index[encode(mono_[i], order + 1)] = static_cast<int>(i);

  shift_.assign(mono_.size() * nvars, -1);
  for (std::size_t i = 0; i < mono_.size(); ++i) {
    if (deg_[i] == order) continue;
    for (int v = 0; v < nvars; ++v) {
      auto m = mono_[i];
      ++m[v];
      shift_[i * nvars + v] = index.at(encode(m, order + 1));
    }
  }

  std::vector<std::uint8_t> sum(nvars);
  for (std::size_t a = 0; a < mono_.size(); ++a) {
    for (std::size_t b = 0; b < offsets_[order - deg_[a] + 1]; ++b) {
      for (int v = 0; v < nvars; ++v) sum[v] = mono_[a][v] + mono_[b][v];
      terms_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                        static_cast<std::uint32_t>(index.at(encode(sum, order + 1)))});
    }
  }
  std::stable_sort(terms_.begin(), terms_.end(),
                   [&](const Term& x, const Term& y) { return deg_[x.c] < deg_[y.c]; });
  term_end_.assign(order + 1, 0);
  for (int d = 0; d <= order; ++d)
    term_end_[d] = static_cast<std::size_t>(
        std::partition_point(terms_.begin(), terms_.end(), [&](const Term& t) { return deg_[t.c] <= d; }) -
        terms_.begin());

  index_ = std::move(index);
}

int JetSpace::index_of(const std::vector<std::uint8_t>& alpha) const {
  int s = 0;
  for (auto e : alpha) s += e;
  if (s > order_ || static_cast<int>(alpha.size()) != nvars_) return -1;
  auto it = index_.find(encode(alpha, order_ + 1));
  return it == index_.end() ? -1 : it->second;
}

std::shared_ptr<const JetSpace> jet_space(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = std::make_shared<const JetSpace>(nvars, order);
  return slot;
}

Jet::Jet(std::shared_ptr<const JetSpace> space, int order)
    : space_(std::move(space)), order_(order), c_(space_->size(order), 0.0) {
  if (order < 0 || order > space_->order()) throw std::invalid_argument("jet order out of range");
}

Jet Jet::constant(const std::shared_ptr<const JetSpace>& s, double v, int order) {
  Jet j(s, order < 0 ? s->order() : order);
  j.c_[0] = v;
  return j;
}

Jet Jet::variable(const std::shared_ptr<const JetSpace>& s, int var, double v) {
  Jet j(s, s->order());
  j.c_[0] = v;
  if (s->order() >= 1) j.c_[1 + var] = 1.0;
  return j;
}

Jet Jet::partial(int var) const {
  if (order_ == 0) throw std::logic_error("cannot differentiate an order-0 jet");
  Jet r(space_, order_ - 1);
  for (std::size_t i = 0; i < r.c_.size(); ++i) {
    int s = space_->shift(i, var);
    r.c_[i] = (space_->exponents(i)[var] + 1) * c_[s];
  }
  return r;
}

double Jet::derivative(const std::vector<int>& vars) const {
  std::vector<std::uint8_t> alpha(space_->nvars(), 0);
  for (int v : vars) ++alpha[v];
  if (static_cast<int>(vars.size()) > order_) throw std::logic_error("derivative beyond jet order");
  int idx = space_->index_of(alpha);
  double f = 1.0;
  for (auto e : alpha)
    for (int k = 2; k <= e; ++k) f *= k;
  return c_[idx] * f;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r = *this;
  r.order_ = order;
  r.c_.resize(space_->size(order));
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet operator-(Jet a) {
  for (auto& v : a.c_) v = -v;
  return a;
}

void fma_into(Jet& acc, const Jet& a, const Jet& b) {
  int ord = std::min({acc.order_, a.order_, b.order_});
  if (ord < acc.order_) acc = acc.truncated(ord);
  const auto& terms = acc.space_->terms();
  std::size_t end = acc.space_->terms_upto(ord);
  double* c = acc.c_.data();
  const double* x = a.c_.data();
  const double* y = b.c_.data();
  for (std::size_t t = 0; t < end; ++t) c[terms[t].c] += x[terms[t].a] * y[terms[t].b];
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.space_, std::min(a.order_, b.order_));
  fma_into(r, a, b);
  return r;
}

Jet Jet::compose(const std::vector<double>& taylor) const {
  Jet d = *this;
  d.c_[0] = 0.0;
  Jet r = Jet::constant(space_, taylor[order_], order_);
  for (int k = order_ - 1; k >= 0; --k) {
    r = r * d;
    r.c_[0] += taylor[k];
  }
  return r;
}

Jet exp(const Jet& a) {
  std::vector<double> t(a.order_ + 1);
  double e = std::exp(a.value()), f = 1.0;
  for (int k = 0; k <= a.order_; ++k) {
    if (k > 0) f *= k;
    t[k] = e / f;
  }
  return a.compose(t);
}

Jet log(const Jet& a) {
  double a0 = a.value();
  std::vector<double> t(a.order_ + 1);
  t[0] = std::log(a0);
  for (int k = 1; k <= a.order_; ++k) t[k] = ((k % 2) ? 1.0 : -1.0) / (k * std::pow(a0, k));
  return a.compose(t);
}

Jet pow(const Jet& a, double r) {
  double a0 = a.value();
  std::vector<double> t(a.order_ + 1);
  double binom = 1.0;
  for (int k = 0; k <= a.order_; ++k) {
    if (k > 0) binom *= (r - (k - 1)) / k;
    t[k] = binom * std::pow(a0, r - k);
  }
  return a.compose(t);
}

Jet reciprocal(const Jet& a) {
  double a0 = a.value();
  std::vector<double> t(a.order_ + 1);
  double p = 1.0 / a0;
  for (int k = 0; k <= a.order_; ++k) {
    t[k] = ((k % 2) ? -p : p);
    p /= a0;
  }
  return a.compose(t);
}

Jet ipow(const Jet& a, long long k) {
  if (k < 0) return reciprocal(ipow(a, -k));
  Jet r = Jet::constant(a.space_, 1.0, a.order_);
  Jet base = a;
  while (k > 0) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

std::vector<Jet> jet_solve(std::vector<Jet> a, std::vector<Jet> b, int n, int nrhs) {
  auto A = [&](int i, int j) -> Jet& { return a[i * n + j]; };
  auto B = [&](int i, int j) -> Jet& { return b[i * nrhs + j]; };
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k).value()) > std::abs(A(piv, k).value())) piv = i;
    if (A(piv, k).value() == 0.0) throw std::runtime_error("singular matrix in jet solve");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      for (int j = 0; j < nrhs; ++j) std::swap(B(k, j), B(piv, j));
    }
    Jet inv = reciprocal(A(k, k));
    for (int i = k + 1; i < n; ++i) {
      Jet f = A(i, k) * inv;
      for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
      for (int j = 0; j < nrhs; ++j) B(i, j) -= f * B(k, j);
    }
  }
  std::vector<Jet> x(b.size());
  for (int k = n - 1; k >= 0; --k) {
    Jet inv = reciprocal(A(k, k));
    for (int j = 0; j < nrhs; ++j) {
      Jet s = B(k, j);
      for (int m = k + 1; m < n; ++m) s -= A(k, m) * x[m * nrhs + j];
      x[k * nrhs + j] = s * inv;
    }
  }
  return x;
}

std::vector<Jet> jet_inverse(const std::vector<Jet>& a, int n) {
  const auto& sp = a.at(0).space();
  int ord = a[0].order();
  for (const auto& e : a) ord = std::min(ord, e.order());
  std::vector<Jet> id;
  id.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) id.push_back(Jet::constant(sp, i == j ? 1.0 : 0.0, ord));
  return jet_solve(a, std::move(id), n, n);
}

}  // namespace finsler
