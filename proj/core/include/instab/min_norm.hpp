#pragma once

#include <vector>

#include "instab/cartan.hpp"
#include "instab/rational.hpp"

namespace instab::instability {

enum class Mode { Exact, Float };

/// Closest point to the origin in conv(points) with its convex coefficients.
/// gap = min_i <u, p_i> - <u, u>, which is >= 0 at the optimum.
template <class T>
struct MinNormCert {
  cartan::CartanVector<T> u;
  std::vector<T> coeffs;  // one per input point, non-negative, summing to 1
  T gap;
  int iterations = 0;
};

using ExactMinNorm = MinNormCert<Rational>;
using RealMinNorm = MinNormCert<double>;

/// Wolfe's algorithm. Exact arithmetic terminates with gap >= 0 exactly and
/// sum_i coeffs_i p_i == u.
ExactMinNorm min_norm_point(const std::vector<cartan::ExactVector>& points);

/// Floating-point Wolfe with tolerance tol (relative to max |p_i|^2).
RealMinNorm min_norm_point(const std::vector<cartan::RealVector>& points,
                           double tol = 1e-12);

/// Rational input in either mode: Exact solves in rationals and converts the
/// result, Float converts the points first.
RealMinNorm min_norm_point(const std::vector<cartan::ExactVector>& points, Mode mode);

/// Exact test: does conv(points) contain target?
bool hull_contains(const std::vector<cartan::ExactVector>& points,
                   const cartan::ExactVector& target);

}  // namespace instab::instability
