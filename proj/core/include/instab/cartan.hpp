#pragma once

// Root data of sl_n: the diagonal Cartan subalgebra with the trace form,
// simple systems given by coordinate orderings, fundamental weights and the
// decomposition of a direction's character into fundamental weights.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "instab/errors.hpp"
#include "instab/rational.hpp"

namespace instab::cartan {

namespace detail {
template <class T>
bool is_traceless(const std::vector<T>& coords) {
  if constexpr (std::is_same_v<T, Rational>) {
    Rational sum = 0;
    for (const auto& c : coords) sum += c;
    return sum == 0;
  } else {
    double sum = 0.0, scale = 1.0;
    for (double c : coords) {
      sum += c;
      scale += c < 0 ? -c : c;
    }
    return (sum < 0 ? -sum : sum) <= 1e-12 * scale;
  }
}
}  // namespace detail

/// Traceless diagonal direction in the flat. T is double or Rational.
template <class T>
class CartanVector {
 public:
  CartanVector() = default;
  explicit CartanVector(std::vector<T> coords) : coords_(std::move(coords)) {
    if (!detail::is_traceless(coords_))
      throw DomainError("CartanVector coordinates must sum to zero");
  }

  static CartanVector zero(int n) { return CartanVector(std::vector<T>(n, T(0))); }

  std::size_t size() const noexcept { return coords_.size(); }
  const T& operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<T>& coords() const noexcept { return coords_; }

  bool is_zero() const {
    for (const auto& c : coords_)
      if (c != T(0)) return false;
    return true;
  }

  friend bool operator==(const CartanVector&, const CartanVector&) = default;

 private:
  std::vector<T> coords_;
};

using RealVector = CartanVector<double>;
using ExactVector = CartanVector<Rational>;

RealVector to_real(const ExactVector& a);

/// Trace form sum_i a_i b_i. Positive definite on traceless vectors and a
/// positive multiple (2n) of the Killing form.
template <class T>
T form_inner(const CartanVector<T>& a, const CartanVector<T>& b) {
  if (a.size() != b.size())
    throw DimensionError("form_inner: dimension mismatch " +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  T acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// A character of the diagonal torus, stored as its canonical sum-zero
/// representative (the functional is defined modulo the trace).
class Weight {
 public:
  Weight() = default;
  explicit Weight(ExactVector coords) : coords_(std::move(coords)) {}

  /// Canonical representative of the character x -> sum_i raw_i x_i.
  static Weight from_raw(const std::vector<std::int64_t>& raw);

  std::size_t size() const noexcept { return coords_.size(); }
  const ExactVector& coords() const noexcept { return coords_; }
  RealVector real() const { return to_real(coords_); }

  /// Pairing with an integer cocharacter (an integer, since the
  /// cocharacter is traceless).
  Rational pair(const std::vector<std::int64_t>& exps) const;
  double pair(const RealVector& a) const;

  Weight operator+(const Weight& other) const;
  Weight operator-() const;

  friend bool operator==(const Weight&, const Weight&) = default;
  friend bool operator<(const Weight& a, const Weight& b) {
    return a.coords_.coords() < b.coords_.coords();
  }

 private:
  ExactVector coords_;
};

/// Integer one-parameter subgroup t -> diag(t^e_1, ..., t^e_n).
class Cocharacter {
 public:
  Cocharacter() = default;
  explicit Cocharacter(std::vector<std::int64_t> exps);

  /// Smallest positive integer multiple of a rational direction.
  static Cocharacter primitive_along(const ExactVector& direction);

  std::size_t size() const noexcept { return exps_.size(); }
  const std::vector<std::int64_t>& exps() const noexcept { return exps_; }
  bool is_zero() const;
  bool primitive() const noexcept { return primitive_; }
  /// Trace-form norm squared; always a non-negative integer.
  std::int64_t norm_squared() const;
  double norm() const;
  ExactVector exact() const;

  Cocharacter scaled(std::int64_t k) const;

  friend bool operator==(const Cocharacter& a, const Cocharacter& b) {
    return a.exps_ == b.exps_;
  }

 private:
  std::vector<std::int64_t> exps_;
  bool primitive_ = false;
};

/// Simple system alpha_i = e_{sigma(i)} - e_{sigma(i+1)} given by an
/// ordering sigma of the coordinates, stored 0-based.
class SimpleSystem {
 public:
  SimpleSystem() = default;
  explicit SimpleSystem(std::vector<int> permutation);
  static SimpleSystem identity(int n);

  int n() const noexcept { return static_cast<int>(perm_.size()); }
  const std::vector<int>& permutation() const noexcept { return perm_; }
  int operator[](std::size_t i) const { return perm_[i]; }

  ExactVector simple_root(int i) const;
  std::vector<ExactVector> simple_roots() const;

  /// alpha_i(a) >= 0 for every simple root (exactly, or within tol).
  bool in_closed_chamber(const ExactVector& a) const;
  bool in_closed_chamber(const RealVector& a, double tol = 1e-12) const;

  friend bool operator==(const SimpleSystem&, const SimpleSystem&) = default;

 private:
  std::vector<int> perm_;
};

/// chi_1..chi_{n-1} dual to the simple roots:
/// 2<alpha_i, chi_j>/<alpha_i, alpha_i> = delta_ij. For sl_n every m_i = 1.
std::vector<Weight> fundamental_weights(int n, const SimpleSystem& order);

/// Coefficients a_j with chi_a = sum_j a_j chi_j, where chi_a(b) =
/// <a,b>/<a,a>. Uses the duality with the simple roots:
/// a_j = <alpha_j, a>/<a, a>.
template <class T>
std::vector<T> chi_decompose(const CartanVector<T>& a, const SimpleSystem& order) {
  if (a.size() != static_cast<std::size_t>(order.n()))
    throw DimensionError("chi_decompose: direction and order sizes differ");
  if (a.is_zero()) throw DomainError("chi_decompose: zero direction");
  const T norm2 = form_inner(a, a);
  std::vector<T> out;
  out.reserve(a.size() - 1);
  for (int j = 0; j + 1 < order.n(); ++j) {
    const T pairing = a[order[j]] - a[order[j + 1]];
    out.push_back(pairing / norm2);
  }
  return out;
}

/// Ordering of the coordinates by non-increasing value, ties kept in
/// ascending index order.
template <class T>
SimpleSystem dominant_order(const CartanVector<T>& a) {
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int i, int j) { return a[i] > a[j]; });
  return SimpleSystem(std::move(perm));
}

}  // namespace instab::cartan
