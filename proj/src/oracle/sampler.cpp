#include "finsler/oracle/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace finsler::oracle {

namespace {

constexpr double kEqTol = 1e-12;
constexpr double kNeTol = 1e-9;

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

void collect(const dsl::NodePtr& f, int dim, int& best) {
  if (f->op == dsl::Op::Variable) best = std::max(best, f->var.flat(dim));
  for (const auto& a : f->args) collect(a, dim, best);
}

double eval_at(const dsl::NodePtr& f, const std::vector<double>& z, int dim) { return dsl::evaluate(f, z, dim); }

}  // namespace

int last_variable(const dsl::NodePtr& f, int dim) {
  int best = -1;
  collect(f, dim, best);
  return best;
}

Constraint Constraint::parse(const std::string& text, int dim) {
  static const std::pair<const char*, Relation> ops[] = {{"!=", Relation::Ne}, {">=", Relation::Ge},
                                                         {"<=", Relation::Le}, {"=", Relation::Eq},
                                                         {">", Relation::Gt},  {"<", Relation::Lt}};
  for (const auto& [tok, rel] : ops) {
    auto pos = text.find(tok);
    if (pos == std::string::npos) continue;
    std::string lhs = trim(text.substr(0, pos)), rhs = trim(text.substr(pos + std::string(tok).size()));
    if (lhs.empty() || rhs.empty()) throw std::invalid_argument("malformed constraint '" + text + "'");
    Constraint c;
    c.f = dsl::sub(dsl::parse_expression(lhs, dim), dsl::parse_expression(rhs, dim));
    c.rel = rel;
    c.text = trim(text);
    return c;
  }
  throw std::invalid_argument("constraint needs one of = != < > <= >=: '" + text + "'");
}

Sampler::Sampler(SamplerConfig cfg, std::optional<dsl::EnergyExpr> energy, std::uint64_t worker)
    : cfg_(std::move(cfg)), energy_(std::move(energy)) {
  if (cfg_.dim < 1) throw std::invalid_argument("sampler dimension must be positive");
  if (static_cast<int>(cfg_.box.size()) != 2 * cfg_.dim)
    throw std::invalid_argument("sampler box needs one interval per coordinate");
  for (const auto& iv : cfg_.box)
    if (!(iv.lo <= iv.hi)) throw std::invalid_argument("sampler interval with lo > hi");
  std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed & 0xffffffffu), static_cast<std::uint32_t>(cfg_.seed >> 32),
                    static_cast<std::uint32_t>(worker & 0xffffffffu), static_cast<std::uint32_t>(worker >> 32)};
  rng_.seed(seq);
}

bool Sampler::satisfies(const std::vector<double>& z, const Constraint& c) const {
  double v = eval_at(c.f, z, cfg_.dim);
  switch (c.rel) {
    case Relation::Eq: return std::abs(v) <= kEqTol;
    case Relation::Ne: return std::abs(v) > kNeTol;
    case Relation::Gt: return v > 0;
    case Relation::Lt: return v < 0;
    case Relation::Ge: return v >= 0;
    case Relation::Le: return v <= 0;
  }
  return false;
}

bool Sampler::solve_equality(std::vector<double>& z, const Constraint& c) const {
  const int dim = cfg_.dim;
  int v = last_variable(c.f, dim);
  if (v < 0) return satisfies(z, c);
  auto f = [&](double t) {
    z[v] = t;
    return eval_at(c.f, z, dim);
  };
  // closed form: f(t) = f(0) + c t^p, p odd
  try {
    double f0 = f(0.0), f1 = f(1.0);
    double coef = f1 - f0;
    if (coef != 0.0) {
      for (int p : {1, 3, 5}) {
        bool ok = true;
        for (double t : {0.7, -1.3, 2.1}) {
          double pred = f0 + coef * std::pow(t, p);
          if (std::abs(f(t) - pred) > 1e-12 * std::max({1.0, std::abs(pred), std::abs(f0)})) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        double w = -f0 / coef;
        z[v] = std::copysign(std::pow(std::abs(w), 1.0 / p), w);
        return std::abs(eval_at(c.f, z, dim)) <= kEqTol * std::max(1.0, std::abs(f0));
      }
    }
  } catch (const dsl::DomainError&) {
  }
  // bisection on the coordinate's interval
  double lo = cfg_.box[v].lo, hi = cfg_.box[v].hi;
  double flo, fhi;
  try {
    flo = f(lo);
    fhi = f(hi);
  } catch (const dsl::DomainError&) {
    return false;
  }
  if (flo == 0.0) {
    z[v] = lo;
    return true;
  }
  if ((flo < 0) == (fhi < 0)) return false;
  for (int it = 0; it < 200 && hi - lo > kEqTol * std::max(1.0, std::abs(lo)); ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  z[v] = 0.5 * (lo + hi);
  return std::abs(eval_at(c.f, z, dim)) <= 1e-10;
}

ChartPoint Sampler::next() {
  const int dim = cfg_.dim;
  while (true) {
    std::vector<double> z(2 * dim);
    for (int i = 0; i < 2 * dim; ++i) {
      std::uniform_real_distribution<double> u(cfg_.box[i].lo, cfg_.box[i].hi);
      z[i] = cfg_.box[i].lo == cfg_.box[i].hi ? cfg_.box[i].lo : u(rng_);
    }
    bool ok = true;
    try {
      for (const auto& c : cfg_.constraints)
        if (c.rel == Relation::Eq && !solve_equality(z, c)) ok = false;
      for (const auto& c : cfg_.constraints)
        if (ok && c.rel != Relation::Eq && !satisfies(z, c)) ok = false;
    } catch (const dsl::DomainError&) {
      ok = false;
    }
    if (ok) {
      ChartPoint p;
      std::vector<double> x(z.begin(), z.begin() + dim), y(z.begin() + dim, z.end());
      if (energy_) {
        p = admit(*energy_, x, y);
      } else {
        p.x = x;
        p.y = y;
        p.admissible = std::any_of(y.begin(), y.end(), [](double t) { return t != 0.0; });
      }
      if (p.admissible) return p;
    }
    if (++rejects_ > cfg_.max_rejects)
      throw SamplerError("sampler exceeded " + std::to_string(cfg_.max_rejects) + " rejections");
  }
}

std::vector<ChartPoint> Sampler::take(int count) {
  std::vector<ChartPoint> out;
  for (int i = 0; i < count; ++i) out.push_back(next());
  return out;
}

}  // namespace finsler::oracle
