#include "instab/min_norm.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "instab/errors.hpp"

namespace instab::instability {

namespace {

template <class T>
T abs_value(const T& x) {
  return x < T(0) ? T(-x) : x;
}

// Solves a small dense system by Gaussian elimination. Pivoting picks the
// largest entry (the first nonzero one is enough for rationals, but largest
// is harmless). Returns false when the matrix is singular to working
// precision.
template <class T>
bool solve_dense(std::vector<std::vector<T>> a, std::vector<T> b, std::vector<T>& x,
                 const T& pivot_tol) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs_value(a[r][c]) > abs_value(a[piv][c])) piv = r;
    if (abs_value(a[piv][c]) <= pivot_tol) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == T(0)) continue;
      const T f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, T(0));
  for (std::size_t i = n; i-- > 0;) {
    T acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[i][k] * x[k];
    x[i] = acc / a[i][i];
  }
  return true;
}

template <class T>
struct Wolfe {
  const std::vector<std::vector<T>>& p;
  T tol;         // absolute tolerance on inner products (0 for exact)
  T pivot_tol;

  T dot(const std::vector<T>& a, const std::vector<T>& b) const {
    T acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  }

  std::vector<T> combine(const std::vector<int>& s, const std::vector<T>& w) const {
    std::vector<T> x(p[0].size(), T(0));
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t c = 0; c < x.size(); ++c) x[c] += w[i] * p[s[i]][c];
    return x;
  }

  // Affine minimiser of aff{p_s}: [G 1; 1^T 0] [mu; rho] = [0; 1].
  bool affine_min(const std::vector<int>& s, std::vector<T>& mu) const {
    const std::size_t k = s.size();
    std::vector<std::vector<T>> a(k + 1, std::vector<T>(k + 1, T(0)));
    std::vector<T> b(k + 1, T(0));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) a[i][j] = dot(p[s[i]], p[s[j]]);
      a[i][k] = 1;
      a[k][i] = 1;
    }
    b[k] = 1;
    std::vector<T> sol;
    if (!solve_dense(a, b, sol, pivot_tol)) return false;
    mu.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(k));
    return true;
  }

  MinNormCert<T> run() {
    const std::size_t m = p.size();
    std::size_t first = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (dot(p[i], p[i]) < dot(p[first], p[first])) first = i;
    std::vector<int> s{static_cast<int>(first)};
    std::vector<T> lambda{T(1)};
    std::vector<T> x = p[first];
    int iterations = 0;
    while (true) {
      if (++iterations > 100000) throw Error("min_norm_point: no convergence");
      const T xx = dot(x, x);
      if (xx <= tol) break;
      std::size_t best = 0;
      T best_val = dot(x, p[0]);
      for (std::size_t i = 1; i < m; ++i) {
        const T v = dot(x, p[i]);
        if (v < best_val) {
          best_val = v;
          best = i;
        }
      }
      if (best_val >= xx - tol) break;
      if (std::find(s.begin(), s.end(), static_cast<int>(best)) != s.end()) break;
      s.push_back(static_cast<int>(best));
      lambda.push_back(T(0));
      // Minor cycles.
      while (true) {
        std::vector<T> mu;
        if (!affine_min(s, mu)) {
          // Numerically dependent support: drop the point just added.
          s.pop_back();
          lambda.pop_back();
          goto done;
        }
        bool interior = true;
        for (const auto& c : mu)
          if (!(c > tol)) interior = false;
        if (interior) {
          lambda = mu;
          x = combine(s, lambda);
          break;
        }
        T theta = 1;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (!(mu[i] > tol)) {
            const T denom = lambda[i] - mu[i];
            if (denom > T(0)) theta = std::min(theta, T(lambda[i] / denom));
          }
        for (std::size_t i = 0; i < s.size(); ++i) lambda[i] += theta * (mu[i] - lambda[i]);
        std::vector<int> s2;
        std::vector<T> l2;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (lambda[i] > tol) {
            s2.push_back(s[i]);
            l2.push_back(lambda[i]);
          }
        if (s2.empty()) {
          // Cannot happen in exact arithmetic; keep the best vertex.
          s2.push_back(s[0]);
          l2.push_back(T(1));
        }
        s = std::move(s2);
        lambda = std::move(l2);
        T sum = 0;
        for (const auto& l : lambda) sum += l;
        for (auto& l : lambda) l /= sum;
        x = combine(s, lambda);
      }
    }
  done:
    MinNormCert<T> out;
    std::vector<T> coeffs(m, T(0));
    for (std::size_t i = 0; i < s.size(); ++i) coeffs[s[i]] += lambda[i];
    x = combine(s, lambda);
    if constexpr (std::is_same_v<T, double>) {
      // Restore exact tracelessness lost to rounding.
      T mean = 0;
      for (const auto& c : x) mean += c;
      mean /= static_cast<double>(x.size());
      for (auto& c : x) c -= mean;
    }
    out.u = cartan::CartanVector<T>(x);
    out.coeffs = std::move(coeffs);
    const T uu = dot(x, x);
    T gap = dot(x, p[0]) - uu;
    for (std::size_t i = 1; i < m; ++i) gap = std::min(gap, T(dot(x, p[i]) - uu));
    out.gap = gap;
    out.iterations = iterations;
    return out;
  }
};

template <class T>
std::vector<std::vector<T>> unpack(const std::vector<cartan::CartanVector<T>>& points) {
  if (points.empty()) throw DomainError("min_norm_point: empty point set");
  std::vector<std::vector<T>> out;
  for (const auto& q : points) {
    if (q.size() != points[0].size()) throw DimensionError("min_norm_point: points of different sizes");
    out.push_back(q.coords());
  }
  return out;
}

}  // namespace

ExactMinNorm min_norm_point(const std::vector<cartan::ExactVector>& points) {
  const auto p = unpack(points);
  return Wolfe<Rational>{p, Rational(0), Rational(0)}.run();
}

RealMinNorm min_norm_point(const std::vector<cartan::RealVector>& points, double tol) {
  const auto p = unpack(points);
  double scale = 0;
  for (const auto& q : p) {
    double s = 0;
    for (double c : q) s += c * c;
    scale = std::max(scale, s);
  }
  if (scale == 0) scale = 1;
  return Wolfe<double>{p, tol * scale, 1e-14 * scale}.run();
}

RealMinNorm min_norm_point(const std::vector<cartan::ExactVector>& points, Mode mode) {
  if (mode == Mode::Float) {
    std::vector<cartan::RealVector> real;
    for (const auto& q : points) real.push_back(cartan::to_real(q));
    return min_norm_point(real);
  }
  const ExactMinNorm e = min_norm_point(points);
  RealMinNorm out;
  out.u = cartan::to_real(e.u);
  for (const auto& c : e.coeffs) out.coeffs.push_back(to_double(c));
  out.gap = to_double(e.gap);
  out.iterations = e.iterations;
  return out;
}

bool hull_contains(const std::vector<cartan::ExactVector>& points,
                   const cartan::ExactVector& target) {
  if (points.empty()) return false;
  std::vector<cartan::ExactVector> shifted;
  for (const auto& q : points) {
    if (q.size() != target.size()) throw DimensionError("hull_contains: size mismatch");
    std::vector<Rational> c(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) c[i] = q[i] - target[i];
    shifted.emplace_back(std::move(c));
  }
  return min_norm_point(shifted).u.is_zero();
}

}  // namespace instab::instability
