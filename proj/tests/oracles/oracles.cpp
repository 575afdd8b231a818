#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

double min_norm_sq(const std::vector<std::vector<double>>& points) {
  return min_norm_point(points).squaredNorm();
}

Vec min_norm_point(const std::vector<std::vector<double>>& points) {
  const int m = static_cast<int>(points.size());
  const int n = static_cast<int>(points.at(0).size());
  double best = std::numeric_limits<double>::infinity();
  Vec best_x;
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    if (!pick.empty()) {
      const int s = static_cast<int>(pick.size());
      Mat kkt = Mat::Zero(s + 1, s + 1);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          double dot = 0;
          for (int c = 0; c < n; ++c) dot += points[pick[i]][c] * points[pick[j]][c];
          kkt(i, j) = dot;
        }
        kkt(i, s) = kkt(s, i) = 1;
      }
      Vec rhs = Vec::Zero(s + 1);
      rhs[s] = 1;
      Eigen::FullPivLU<Mat> lu(kkt);
      lu.setThreshold(1e-10);
      if (lu.isInvertible()) {
        const Vec sol = lu.solve(rhs);
        if (sol.head(s).minCoeff() >= -1e-12) {
          Vec x = Vec::Zero(n);
          for (int i = 0; i < s; ++i)
            for (int c = 0; c < n; ++c) x[c] += sol[i] * points[pick[i]][c];
          if (x.squaredNorm() < best) {
            best = x.squaredNorm();
            best_x = x;
          }
        }
      }
    }
    if (static_cast<int>(pick.size()) == n) return;
    for (int i = start; i < m; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best_x;
}

std::vector<std::vector<std::int64_t>> primitive_cocharacters(int n, int bound) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> cur(n);
  std::function<void(int, std::int64_t)> rec = [&](int i, std::int64_t sum) {
    if (i == n - 1) {
      const std::int64_t last = -sum;
      if (last < -bound || last > bound) return;
      cur[i] = last;
      std::int64_t g = 0;
      for (auto e : cur) g = std::gcd(g, e < 0 ? -e : e);
      if (g == 1) out.push_back(cur);
      return;
    }
    for (std::int64_t e = -bound; e <= bound; ++e) {
      cur[i] = e;
      rec(i + 1, sum + e);
    }
  };
  rec(0, 0);
  return out;
}

std::vector<std::int64_t> torus_exponents(const instab::reps::Representation& rep,
                                          const std::vector<std::int64_t>& tau) {
  const int n = rep.n();
  Mat d = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = std::ldexp(1.0, static_cast<int>(tau[i]));
  const Mat r = rep.matrix(instab::reps::GroupElement(d));
  std::vector<std::int64_t> out(rep.dim());
  for (int b = 0; b < rep.dim(); ++b) {
    for (int c = 0; c < rep.dim(); ++c)
      if (c != b && std::fabs(r(b, c)) > 1e-9 * std::fabs(r(b, b)))
        throw std::runtime_error("torus does not act diagonally");
    const double e = std::log2(r(b, b));
    out[b] = std::llround(e);
    if (std::fabs(e - static_cast<double>(out[b])) > 1e-6) throw std::runtime_error("non-integral exponent");
  }
  return out;
}

std::int64_t valuation(const instab::reps::Representation& rep, const std::vector<Rational>& v,
                       const std::vector<std::int64_t>& tau) {
  const auto e = torus_exponents(rep, tau);
  std::optional<std::int64_t> m;
  for (int b = 0; b < rep.dim(); ++b)
    if (v[b] != 0) m = m ? std::min(*m, e[b]) : e[b];
  if (!m) throw std::runtime_error("zero vector");
  return *m;
}

std::vector<std::vector<Rational>> fundamental_weights(int n, const std::vector<int>& perm) {
  std::vector<std::vector<Rational>> out;
  for (int j = 1; j < n; ++j) {
    std::vector<Rational> w(n, Rational(-j, n));
    for (int i = 0; i < j; ++i) w[perm[i]] += 1;
    out.push_back(w);
  }
  return out;
}

std::vector<Rational> chi_coefficients(const std::vector<Rational>& a, const std::vector<int>& perm) {
  const int n = static_cast<int>(a.size());
  const auto chi = fundamental_weights(n, perm);
  Rational norm2 = 0;
  for (const auto& x : a) norm2 += x * x;
  // Augmented n x n system: rows are coordinates, columns the n-1 weights.
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n - 1; ++j) m[r][j] = chi[j][r];
    m[r][n - 1] = a[r] / norm2;
  }
  int row = 0;
  std::vector<int> pivot_col;
  for (int col = 0; col < n - 1 && row < n; ++col) {
    int p = row;
    while (p < n && m[p][col] == 0) ++p;
    if (p == n) continue;
    std::swap(m[p], m[row]);
    for (int r = 0; r < n; ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rational f = m[r][col] / m[row][col];
      for (int c = col; c < n; ++c) m[r][c] -= f * m[row][c];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (int r = row; r < n; ++r)
    if (m[r][n - 1] != 0) throw std::runtime_error("inconsistent system");
  std::vector<Rational> out(n - 1);
  for (int r = 0; r < row; ++r) out[pivot_col[r]] = m[r][n - 1] / m[r][pivot_col[r]];
  return out;
}

double adjoint_nilradical_det(const std::vector<double>& a, const Mat& h) {
  const int n = static_cast<int>(a.size());
  std::vector<std::pair<int, int>> basis;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a[i] > a[j] + 1e-12) basis.emplace_back(i, j);
  const int m = static_cast<int>(basis.size());
  if (m == 0) return 1.0;
  const Mat hinv = h.inverse();
  Mat ad(m, m);
  for (int c = 0; c < m; ++c) {
    Mat e = Mat::Zero(n, n);
    e(basis[c].first, basis[c].second) = 1;
    const Mat img = h * e * hinv;
    for (int r = 0; r < m; ++r) ad(r, c) = img(basis[r].first, basis[r].second);
  }
  return std::fabs(ad.determinant());
}

namespace {

void tuples_of(const instab::reps::Representation& rep, int n, int k, bool wedge,
               std::vector<std::vector<int>>& out) {
  // Rebuild the lexicographic index tuples of the basis.
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(wedge ? i + 1 : i);
      cur.pop_back();
    }
  };
  rec(0);
  if (static_cast<int>(out.size()) != rep.dim()) throw std::runtime_error("basis size mismatch");
}

int perm_sign(const std::vector<int>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

}  // namespace

Vec tensor_embedding(const instab::reps::Representation& rep, int n, int k, bool wedge,
                     const Vec& coords) {
  std::vector<std::vector<int>> tuples;
  tuples_of(rep, n, k, wedge, tuples);
  int total = 1;
  for (int i = 0; i < k; ++i) total *= n;
  Vec out = Vec::Zero(total);
  for (int b = 0; b < rep.dim(); ++b) {
    if (coords[b] == 0) continue;
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<int>> seen;
    do {
      std::vector<int> idx(k);
      for (int i = 0; i < k; ++i) idx[i] = tuples[b][order[i]];
      if (!wedge) {
        if (std::find(seen.begin(), seen.end(), idx) != seen.end()) continue;
        seen.push_back(idx);
      }
      int flat = 0;
      for (int i = 0; i < k; ++i) flat = flat * n + idx[i];
      out[flat] += coords[b] * (wedge ? perm_sign(order) : 1);
    } while (std::next_permutation(order.begin(), order.end()));
  }
  return out;
}

Mat tensor_power(const Mat& g, int k) {
  Mat out = Mat::Ones(1, 1);
  for (int i = 0; i < k; ++i) {
    Mat next(out.rows() * g.rows(), out.cols() * g.cols());
    for (int r = 0; r < out.rows(); ++r)
      for (int c = 0; c < out.cols(); ++c) next.block(r * g.rows(), c * g.cols(), g.rows(), g.cols()) = out(r, c) * g;
    out = next;
  }
  return out;
}

namespace {

double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

double scan_circle(const std::function<double(double)>& f, int samples) {
  const double two_pi = 2 * std::acos(-1.0);
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  std::vector<double> vals(samples);
  for (int i = 0; i < samples; ++i) {
    vals[i] = f(two_pi * i / samples);
    if (vals[i] < best_v) {
      best_v = vals[i];
      best = i;
    }
  }
  const double h = two_pi / samples;
  return std::min(best_v, golden_min(f, (best - 1) * h, (best + 1) * h));
}

}  // namespace

double flat_rate_grid(const std::vector<std::vector<double>>& weights) {
  const int n = static_cast<int>(weights.at(0).size());
  auto top = [&](const std::vector<double>& x) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& w : weights) {
      double d = 0;
      for (int i = 0; i < n; ++i) d += w[i] * x[i];
      m = std::max(m, d);
    }
    return m;
  };
  double lowest;
  if (n == 2) {
    const double r = 1 / std::sqrt(2.0);
    lowest = std::min(top({r, -r}), top({-r, r}));
  } else if (n == 3) {
    // Orthonormal basis of the traceless plane.
    const double a = 1 / std::sqrt(2.0), b = 1 / std::sqrt(6.0);
    lowest = scan_circle(
        [&](double th) {
          const double c = std::cos(th), s = std::sin(th);
          return top({c * a + s * b, -c * a + s * b, -2 * s * b});
        },
        100000);
  } else {
    throw std::runtime_error("flat_rate_grid: n must be 2 or 3");
  }
  return std::max(0.0, -lowest);
}

double sphere_min_n2(const instab::reps::Representation& rep, const Vec& v, double s) {
  const Vec g = rep.gram_real();
  return scan_circle(
      [&](double th) {
        Mat p(2, 2);
        p << std::cos(th), std::sin(th), std::sin(th), -std::cos(th);
        p /= std::sqrt(2.0);
        const Mat e = (s * p).exp();
        const Vec w = rep.matrix(instab::reps::GroupElement::trusted(e)) * v;
        return 0.5 * std::log((g.array() * w.array().square()).sum());
      },
      20000);
}

}  // namespace oracle
