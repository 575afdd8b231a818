#include "instab/cartan.hpp"

#include <cmath>
#include <numeric>

namespace instab::cartan {

RealVector to_real(const ExactVector& a) {
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& c : a.coords()) out.push_back(to_double(c));
  // Rounding can break exact tracelessness by an ulp; the tolerance absorbs it.
  return RealVector(std::move(out));
}

Weight Weight::from_raw(const std::vector<std::int64_t>& raw) {
  if (raw.empty()) throw DimensionError("weight of a zero-dimensional torus");
  Rational mean = 0;
  for (auto r : raw) mean += r;
  mean /= static_cast<std::int64_t>(raw.size());
  std::vector<Rational> coords;
  coords.reserve(raw.size());
  for (auto r : raw) coords.push_back(Rational(r) - mean);
  return Weight(ExactVector(std::move(coords)));
}

Rational Weight::pair(const std::vector<std::int64_t>& exps) const {
  if (exps.size() != size()) throw DimensionError("Weight::pair: dimension mismatch");
  Rational acc = 0;
  for (std::size_t i = 0; i < exps.size(); ++i) acc += coords_[i] * exps[i];
  return acc;
}

double Weight::pair(const RealVector& a) const {
  if (a.size() != size()) throw DimensionError("Weight::pair: dimension mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += to_double(coords_[i]) * a[i];
  return acc;
}

Weight Weight::operator+(const Weight& other) const {
  if (other.size() != size()) throw DimensionError("Weight sum: dimension mismatch");
  std::vector<Rational> c(size());
  for (std::size_t i = 0; i < size(); ++i) c[i] = coords_[i] + other.coords_[i];
  return Weight(ExactVector(std::move(c)));
}

Weight Weight::operator-() const {
  std::vector<Rational> c(size());
  for (std::size_t i = 0; i < size(); ++i) c[i] = -coords_[i];
  return Weight(ExactVector(std::move(c)));
}

Cocharacter::Cocharacter(std::vector<std::int64_t> exps) : exps_(std::move(exps)) {
  std::int64_t sum = 0, g = 0;
  for (auto e : exps_) {
    sum += e;
    g = std::gcd(g, e < 0 ? -e : e);
  }
  if (sum != 0) throw DomainError("Cocharacter exponents must sum to zero");
  primitive_ = g == 1;
}

Cocharacter Cocharacter::primitive_along(const ExactVector& direction) {
  if (direction.is_zero()) throw DomainError("primitive_along: zero direction");
  BigInt lcm = 1;
  for (const auto& c : direction.coords()) {
    const BigInt d = boost::multiprecision::denominator(c);
    lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
  }
  std::vector<BigInt> ints;
  BigInt g = 0;
  for (const auto& c : direction.coords()) {
    BigInt v = boost::multiprecision::numerator(c) * (lcm / boost::multiprecision::denominator(c));
    g = boost::multiprecision::gcd(g, boost::multiprecision::abs(v));
    ints.push_back(v);
  }
  std::vector<std::int64_t> exps;
  for (auto& v : ints) exps.push_back(to_int64(Rational(v / g)));
  return Cocharacter(std::move(exps));
}

bool Cocharacter::is_zero() const {
  for (auto e : exps_)
    if (e != 0) return false;
  return true;
}

std::int64_t Cocharacter::norm_squared() const {
  std::int64_t acc = 0;
  for (auto e : exps_) acc += e * e;
  return acc;
}

double Cocharacter::norm() const { return std::sqrt(static_cast<double>(norm_squared())); }

ExactVector Cocharacter::exact() const {
  std::vector<Rational> c;
  c.reserve(exps_.size());
  for (auto e : exps_) c.emplace_back(e);
  return ExactVector(std::move(c));
}

Cocharacter Cocharacter::scaled(std::int64_t k) const {
  std::vector<std::int64_t> e = exps_;
  for (auto& x : e) x *= k;
  return Cocharacter(std::move(e));
}

SimpleSystem::SimpleSystem(std::vector<int> permutation) : perm_(std::move(permutation)) {
  std::vector<bool> seen(perm_.size(), false);
  for (int p : perm_) {
    if (p < 0 || p >= static_cast<int>(perm_.size()) || seen[p])
      throw DomainError("SimpleSystem: not a permutation");
    seen[p] = true;
  }
}

SimpleSystem SimpleSystem::identity(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  return SimpleSystem(std::move(p));
}

ExactVector SimpleSystem::simple_root(int i) const {
  if (i < 0 || i + 1 >= n()) throw DomainError("simple_root: index out of range");
  std::vector<Rational> c(n(), Rational(0));
  c[perm_[i]] = 1;
  c[perm_[i + 1]] = -1;
  return ExactVector(std::move(c));
}

std::vector<ExactVector> SimpleSystem::simple_roots() const {
  std::vector<ExactVector> out;
  for (int i = 0; i + 1 < n(); ++i) out.push_back(simple_root(i));
  return out;
}

bool SimpleSystem::in_closed_chamber(const ExactVector& a) const {
  if (a.size() != perm_.size()) throw DimensionError("in_closed_chamber: dimension mismatch");
  for (int i = 0; i + 1 < n(); ++i)
    if (a[perm_[i]] < a[perm_[i + 1]]) return false;
  return true;
}

bool SimpleSystem::in_closed_chamber(const RealVector& a, double tol) const {
  if (a.size() != perm_.size()) throw DimensionError("in_closed_chamber: dimension mismatch");
  for (int i = 0; i + 1 < n(); ++i)
    if (a[perm_[i]] < a[perm_[i + 1]] - tol) return false;
  return true;
}

std::vector<Weight> fundamental_weights(int n, const SimpleSystem& order) {
  if (n < 2) throw DomainError("fundamental_weights: n must be at least 2");
  if (order.n() != n) throw DimensionError("fundamental_weights: order has wrong size");
  std::vector<Weight> out;
  for (int j = 1; j < n; ++j) {
    std::vector<std::int64_t> raw(n, 0);
    for (int i = 0; i < j; ++i) raw[order[i]] = 1;
    out.push_back(Weight::from_raw(raw));
  }
  return out;
}

}  // namespace instab::cartan
