#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "instab/errors.hpp"
#include "instab/instability.hpp"
#include "instab/symspace.hpp"

namespace instab::instability {

using reps::GroupElement;
using reps::Representation;
using reps::RepVector;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_identity(const Mat& k) { return k.isIdentity(0.0); }

// ---------------------------------------------------------------- BFGS

using Objective = std::function<double(const Vec&, Vec*)>;

struct MinResult {
  Vec y;
  double value;
  int iterations;
};

// BFGS with backtracking line search for objectives invariant under
// positive scaling of y; y is kept at unit norm.
MinResult minimize_on_sphere(const Objective& fn, Vec y, int max_iterations) {
  y.normalize();
  Vec g;
  double f = fn(y, &g);
  const Eigen::Index d = y.size();
  Mat h = Mat::Identity(d, d);
  bool fresh = true;
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (g.norm() <= 1e-13 * (1.0 + std::fabs(f))) break;
    Vec dir = -h * g;
    if (g.dot(dir) >= 0) {
      h.setIdentity();
      fresh = true;
      dir = -g;
    }
    // Tangent steps larger than the radius only reparametrise the sphere.
    double step = 1.0;
    if (fresh || dir.norm() > 0.5) step = std::min(1.0, 0.5 / dir.norm());
    const double slope = g.dot(dir);
    Vec y_new, g_new;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      y_new = y + step * dir;
      f_new = fn(y_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh) break;
      h.setIdentity();
      fresh = true;
      continue;
    }
    // Renormalise: F(c y) = F(y), so the gradient scales by 1/c and the
    // inverse Hessian by c^2.
    const double c = 1.0 / y_new.norm();
    y_new *= c;
    g_new /= c;
    const Vec sk = y_new - y;
    const Vec yk = g_new - g;
    const double sy = sk.dot(yk);
    const double df = f - f_new;
    y = y_new;
    g = g_new;
    f = f_new;
    if (sy > 1e-14 * sk.norm() * yk.norm()) {
      if (fresh) h = (sy / yk.squaredNorm()) * Mat::Identity(d, d);
      const double rho = 1.0 / sy;
      const Mat i = Mat::Identity(d, d);
      h = (i - rho * sk * yk.transpose()) * h * (i - rho * yk * sk.transpose()) +
          rho * sk * sk.transpose();
      fresh = false;
    }
    if (df <= 1e-16 * (1.0 + std::fabs(f)) && sk.norm() < 1e-12) break;
  }
  return {y, f, it};
}

// ---------------------------------------------------------------- objective

// f_v on the sphere of radius s, p = P(y)/|y| over an orthonormal basis of
// the symmetric traceless matrices. With p = Q diag(w) Q^T and z = rho(Q^T) v,
//   f_v(pi(exp(s p))) = 1/2 log sum_b gram_b exp(2 s <lambda_b, w>) z_b^2,
// evaluated with a shifted log-sum-exp. The gradient uses the divided
// differences of exp in the eigenbasis of p and the infinitesimal action.
class SphereObjective {
 public:
  SphereObjective(const Representation& rep, const RepVector& v)
      : rep_(rep), v_(v.coords()), n_(rep.n()), basis_(linalg::symmetric_traceless_basis(rep.n())) {
    weights_.resize(rep.dim(), n_);
    for (int b = 0; b < rep.dim(); ++b)
      for (int i = 0; i < n_; ++i) weights_(b, i) = to_double(rep.basis_weights()[b].coords()[i]);
    lie_.reserve(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Mat e = Mat::Zero(n_, n_);
        e(i, j) = 1;
        lie_.push_back(reps::lie_action(rep, e));
      }
  }

  int coords() const { return static_cast<int>(basis_.size()); }
  const std::vector<Mat>& basis() const { return basis_; }

  Mat direction(const Vec& y) const {
    Mat p = linalg::symmetric_from_coords(n_, y);
    return p / linalg::trace_norm(p);
  }

  double operator()(double s, const Vec& y, Vec* grad) const {
    const double r = y.norm();
    const Mat p = direction(y);
    const auto eig = linalg::symmetric_eigen(p);
    const Mat& q = eig.vectors;
    const Vec& w = eig.values;
    const Vec z = rep_.matrix(GroupElement::trusted(q.transpose())) * v_;
    const Vec pair = weights_ * w;  // <lambda_b, w>
    const Vec& gram = rep_.gram_real();
    const int dim = rep_.dim();
    Vec ell(dim);
    double top = kNegInf;
    for (int b = 0; b < dim; ++b) {
      ell[b] = z[b] == 0 ? kNegInf : 2 * s * pair[b] + std::log(gram[b] * z[b] * z[b]);
      top = std::max(top, ell[b]);
    }
    if (!std::isfinite(top)) throw DomainError("shrink objective: zero vector");
    double sum = 0;
    for (int b = 0; b < dim; ++b) sum += std::exp(ell[b] - top);
    const double value = 0.5 * (top + std::log(sum));
    if (!grad) return value;

    // zeta_b = exp(s <lambda_b, w> - top/2) z_b, so sum_b gram_b zeta_b^2 = sum.
    Vec zeta(dim);
    for (int b = 0; b < dim; ++b)
      zeta[b] = z[b] == 0 ? 0.0 : std::exp(s * pair[b] - 0.5 * top) * z[b];
    const Vec gz = gram.cwiseProduct(zeta);
    Mat c(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) c(i, j) = gz.dot(lie_[i * n_ + j] * zeta);
    // Psi_ij = sinh(x_ij)/x_ij with x_ij = s (w_i - w_j).
    Mat psi(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const double x = s * (w[i] - w[j]);
        psi(i, j) = std::fabs(x) < 1e-8 ? 1.0 : std::sinh(x) / x;
      }
    Mat gamma = q * psi.cwiseProduct(c) * q.transpose() / (2 * sum);
    gamma = 0.5 * (gamma + gamma.transpose());
    const Mat grad_p = 2 * s * gamma;  // dF = tr(grad_p dp)
    grad->resize(coords());
    const double gp_p = linalg::trace_inner(grad_p, p);
    for (int i = 0; i < coords(); ++i) {
      const double bi = linalg::trace_inner(grad_p, basis_[i]);
      (*grad)[i] = (bi - gp_p * y[i] / r) / r;
    }
    return value;
  }

 private:
  const Representation& rep_;
  Vec v_;
  int n_;
  std::vector<Mat> basis_;
  Mat weights_;
  std::vector<Mat> lie_;
};

// Same objective restricted to the flat pi(A k): p = k^T diag(w) k with w
// ranging over the traceless diagonal (Helmert coordinates).
class FlatObjective {
 public:
  FlatObjective(const Representation& rep, const RepVector& v, const Mat& k)
      : rep_(rep), n_(rep.n()), k_(k) {
    z_ = rep.matrix(GroupElement::trusted(k)) * v.coords();
    weights_.resize(rep.dim(), n_);
    for (int b = 0; b < rep.dim(); ++b)
      for (int i = 0; i < n_; ++i) weights_(b, i) = to_double(rep.basis_weights()[b].coords()[i]);
    helmert_ = Mat::Zero(n_, n_ - 1);
    for (int m = 1; m < n_; ++m) {
      const double c = 1.0 / std::sqrt(static_cast<double>(m) * (m + 1));
      for (int i = 0; i < m; ++i) helmert_(i, m - 1) = c;
      helmert_(m, m - 1) = -m * c;
    }
  }

  int coords() const { return n_ - 1; }
  Vec diagonal(const Vec& y) const { return helmert_ * y / y.norm(); }
  Vec coords_of(const Vec& w) const { return helmert_.transpose() * w; }
  Mat direction(const Vec& y) const {
    return k_.transpose() * diagonal(y).asDiagonal() * k_;
  }

  double operator()(double s, const Vec& y, Vec* grad) const {
    const double r = y.norm();
    const Vec w = diagonal(y);
    const Vec pair = weights_ * w;
    const Vec& gram = rep_.gram_real();
    const int dim = rep_.dim();
    Vec ell(dim);
    double top = kNegInf;
    for (int b = 0; b < dim; ++b) {
      ell[b] = z_[b] == 0 ? kNegInf : 2 * s * pair[b] + std::log(gram[b] * z_[b] * z_[b]);
      top = std::max(top, ell[b]);
    }
    if (!std::isfinite(top)) throw DomainError("shrink objective: zero vector");
    Vec prob(dim);
    for (int b = 0; b < dim; ++b) prob[b] = std::exp(ell[b] - top);
    const double sum = prob.sum();
    const double value = 0.5 * (top + std::log(sum));
    if (!grad) return value;
    prob /= sum;
    const Vec grad_w = s * (weights_.transpose() * prob);  // dF/dw
    const Vec gy = helmert_.transpose() * grad_w;
    *grad = (gy - gy.dot(y / r) * y / r) / r;
    return value;
  }

 private:
  const Representation& rep_;
  int n_;
  Mat k_;
  Vec z_;
  Mat weights_;
  Mat helmert_;
};

// Least-squares fit of m(s) = -a s + C + c1/s + c2/s^2 over the last five
// radii (fewer terms when the grid is short).
void fit_rate(const std::vector<ShrinkTracePoint>& trace, double& rate, double& intercept) {
  const std::size_t m = trace.size();
  if (m == 1) {
    rate = -trace[0].value / trace[0].s;
    intercept = 0;
    return;
  }
  const std::size_t use = std::min<std::size_t>(m, 5);
  const int cols = static_cast<int>(std::min<std::size_t>(use, 4));
  Mat a(static_cast<Eigen::Index>(use), cols);
  Vec b(static_cast<Eigen::Index>(use));
  for (std::size_t i = 0; i < use; ++i) {
    const auto& t = trace[m - use + i];
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = -t.s;
    a(r, 1) = 1.0;
    if (cols > 2) a(r, 2) = 1.0 / t.s;
    if (cols > 3) a(r, 3) = 1.0 / (t.s * t.s);
    b[r] = t.value;
  }
  const Vec sol = a.colPivHouseholderQr().solve(b);
  rate = sol[0];
  intercept = sol[1];
}

template <class Obj>
ShrinkGeodesicResult ball_minimise(const Obj& obj, const std::vector<double>& grid,
                                   std::vector<Vec> starts, int max_iterations) {
  if (grid.empty()) throw DomainError("ball minimisation: empty radius grid");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!(grid[i] > 0) || (i > 0 && !(grid[i] > grid[i - 1])))
      throw DomainError("ball minimisation: radii must be positive and increasing");
  ShrinkGeodesicResult out;
  std::vector<MinResult> keep;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double s = grid[gi];
    const Objective fn = [&obj, s](const Vec& y, Vec* g) { return obj(s, y, g); };
    std::vector<MinResult> runs;
    if (gi == 0) {
      for (const auto& y0 : starts)
        if (y0.norm() > 0) runs.push_back(minimize_on_sphere(fn, y0, max_iterations));
    } else {
      for (const auto& k : keep) runs.push_back(minimize_on_sphere(fn, k.y, max_iterations));
    }
    if (runs.empty()) throw DomainError("ball minimisation: no starting directions");
    std::stable_sort(runs.begin(), runs.end(),
                     [](const MinResult& a, const MinResult& b) { return a.value < b.value; });
    keep.clear();
    for (const auto& run : runs) {
      bool duplicate = false;
      for (const auto& k : keep)
        if ((k.y - run.y).norm() < 1e-6) duplicate = true;
      if (!duplicate) keep.push_back(run);
      if (keep.size() == 3) break;
    }
    out.trace.push_back({s, obj.direction(keep[0].y), keep[0].value});
  }
  for (std::size_t i = 1; i < out.trace.size(); ++i) {
    const GroupElement a = GroupElement::trusted(linalg::expm_symmetric(out.trace[i - 1].direction));
    const GroupElement b = GroupElement::trusted(linalg::expm_symmetric(out.trace[i].direction));
    out.cauchy.push_back(symspace::group_distance(a, b));
  }
  out.direction = out.trace.back().direction;
  fit_rate(out.trace, out.rate, out.intercept);
  return out;
}

std::vector<Vec> sphere_starts(const SphereObjective& obj, const Representation& rep,
                               const RepVector& v, const ShrinkOptions& opts) {
  std::vector<Vec> starts;
  // Steepest descent direction at the origin first.
  const Mat mu = moment_map(rep, v);
  if (linalg::trace_norm(mu) > 1e-12) starts.push_back(-linalg::symmetric_coords(mu));
  for (const auto& seed : opts.seeds) starts.push_back(linalg::symmetric_coords(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < opts.starts; ++i) {
    Rng rng = make_rng(opts.seed, 0x9e0d, static_cast<std::uint64_t>(i));
    Vec y(obj.coords());
    for (int c = 0; c < obj.coords(); ++c) y[c] = normal(rng);
    starts.push_back(y);
  }
  return starts;
}

void check_input(const Representation& rep, const RepVector& v) {
  if (v.dim() != rep.dim()) throw DimensionError("vector dimension does not match the representation");
  if (v.is_zero()) throw DomainError("zero vector");
}

}  // namespace

// ---------------------------------------------------------------- flat data

FlatShrinkData flat_shrink_data(const Representation& rep, const RepVector& v, const Mat& k,
                                double eps) {
  check_input(rep, v);
  if (k.rows() != rep.n() || k.cols() != rep.n()) throw DimensionError("frame has wrong size");
  const RepVector w = (is_identity(k) && v.is_exact())
                          ? v
                          : reps::act(rep, GroupElement::trusted(k), v);
  if (w.is_zero()) throw DomainError("flat_shrink_data: zero vector after action");
  FlatShrinkData out;
  out.k = k;
  std::vector<cartan::ExactVector> points;
  for (const auto& c : reps::weight_components(rep, w, eps))
    if (c.active()) {
      out.active.push_back(c);
      points.push_back(c.weight.coords());
    }
  const ExactMinNorm mn = min_norm_point(points);
  out.u = mn.u;
  out.coeffs = mn.coeffs;
  out.rate = std::sqrt(to_double(cartan::form_inner(mn.u, mn.u)));
  double c = 0;
  for (std::size_t i = 0; i < out.active.size(); ++i)
    if (mn.coeffs[i] != 0) c += to_double(mn.coeffs[i]) * out.active[i].log_norm;
  out.bound_const = c;
  out.bounded_below = mn.u.is_zero();
  return out;
}

double shrink_value(const Representation& rep, const RepVector& v, const GroupElement& g) {
  return std::log(reps::rep_norm(rep, reps::act(rep, g, v)));
}

Mat moment_map(const Representation& rep, const RepVector& v) {
  check_input(rep, v);
  const int n = rep.n();
  const Vec& x = v.coords();
  const Vec gx = rep.gram_real().cwiseProduct(x);
  const double norm2 = gx.dot(x);
  Mat c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1;
      c(i, j) = gx.dot(reps::lie_action(rep, e) * x) / norm2;
    }
  Mat m = 0.5 * (c + c.transpose());
  m.diagonal().array() -= m.trace() / n;
  return m;
}

std::vector<double> auto_s_grid(const Representation& rep) {
  double spread = 0;
  const auto& w = rep.basis_weights();
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = a + 1; b < w.size(); ++b) {
      double d2 = 0;
      for (std::size_t i = 0; i < w[a].size(); ++i) {
        const double d = to_double(w[a].coords()[i] - w[b].coords()[i]);
        d2 += d * d;
      }
      spread = std::max(spread, std::sqrt(d2));
    }
  if (spread == 0) spread = 1;
  const double top = 24.0 / spread;
  std::vector<double> grid;
  for (double f : {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0}) grid.push_back(f * top);
  return grid;
}

ShrinkGeodesicResult sphere_minimum_profile(const Representation& rep, const RepVector& v,
                                            const ShrinkOptions& opts) {
  check_input(rep, v);
  const SphereObjective obj(rep, v);
  const auto grid = opts.s_grid.empty() ? auto_s_grid(rep) : opts.s_grid;
  auto out = ball_minimise(obj, grid, sphere_starts(obj, rep, v, opts), opts.max_iterations);
  out.converged = !out.cauchy.empty() && out.cauchy.back() <= opts.tol;
  return out;
}

ShrinkGeodesicResult fastest_shrinking_geodesic(const Representation& rep, const RepVector& v,
                                                const ShrinkOptions& opts) {
  auto out = sphere_minimum_profile(rep, v, opts);
  if (out.rate < opts.stable_slope)
    throw StableInputError("the sphere minimum of f_v does not decrease linearly (slope " +
                           std::to_string(-out.rate) + ")");
  return out;
}

ShrinkGeodesicResult flat_shrinking_geodesic(const Representation& rep, const RepVector& v,
                                             const Mat& k, const ShrinkOptions& opts) {
  check_input(rep, v);
  if (k.rows() != rep.n() || k.cols() != rep.n()) throw DimensionError("frame has wrong size");
  const FlatObjective obj(rep, v, k);
  std::vector<Vec> starts;
  for (const auto& seed : opts.seeds) {
    // Diagonal part of the seed in the frame.
    const Mat d = k * seed * k.transpose();
    starts.push_back(obj.coords_of(d.diagonal()));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < opts.starts; ++i) {
    Rng rng = make_rng(opts.seed, 0xf1a7, static_cast<std::uint64_t>(i));
    Vec y(obj.coords());
    for (int c = 0; c < obj.coords(); ++c) y[c] = normal(rng);
    starts.push_back(y);
  }
  const auto grid = opts.s_grid.empty() ? auto_s_grid(rep) : opts.s_grid;
  auto out = ball_minimise(obj, grid, starts, opts.max_iterations);
  out.converged = !out.cauchy.empty() && out.cauchy.back() <= opts.tol;
  return out;
}

// ---------------------------------------------------------------- verdicts

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::TorusCertified:
      return "torus_certified_unstable";
    case VerdictKind::NumericallyUnstable:
      return "numerically_unstable";
    case VerdictKind::LikelyStable:
      return "likely_stable";
  }
  return {};
}

std::vector<std::pair<Mat, std::string>> candidate_frames(const Representation& rep,
                                                          const RepVector& v,
                                                          const InstabilityBudget& budget) {
  check_input(rep, v);
  const int n = rep.n();
  std::vector<std::pair<Mat, std::string>> out;
  out.emplace_back(Mat::Identity(n, n), "identity");
  if (budget.moment_frames) {
    // The frame in which the moment map of v is diagonal.
    const auto eig = linalg::symmetric_eigen(moment_map(rep, v));
    out.emplace_back(eig.vectors.transpose(), "moment");
  }
  for (int i = 0; i < budget.random_frames; ++i) {
    Rng rng = make_rng(budget.seed, 0xf4a3e, static_cast<std::uint64_t>(i));
    out.emplace_back(linalg::haar_special_orthogonal(n, rng), "random");
  }
  return out;
}

Mat geodesic_frame(const Mat& direction) {
  // pi(exp(t p)) = pi(exp(-t u) k) for p = -k^T u k: the frame is Q^T.
  return linalg::symmetric_eigen(direction).vectors.transpose();
}

Verdict is_unstable(const Representation& rep, const RepVector& v, const InstabilityBudget& budget) {
  check_input(rep, v);
  Verdict verdict;
  for (const auto& [k, source] : candidate_frames(rep, v, budget)) {
    ++verdict.frames_tried;
    const auto data = flat_shrink_data(rep, v, k);
    if (!data.bounded_below) {
      verdict.kind = VerdictKind::TorusCertified;
      verdict.frame = k;
      verdict.frame_source = source;
      verdict.rate = data.rate;
      return verdict;
    }
  }
  const auto profile = sphere_minimum_profile(rep, v, budget.geodesic);
  if (profile.rate < budget.geodesic.stable_slope) {
    verdict.kind = VerdictKind::LikelyStable;
    verdict.rate = 0.0;
    return verdict;
  }
  const Mat k = geodesic_frame(profile.direction);
  ++verdict.frames_tried;
  const auto data = flat_shrink_data(rep, v, k, 1e-6);
  verdict.frame = k;
  verdict.frame_source = "geodesic";
  if (!data.bounded_below) {
    verdict.kind = VerdictKind::TorusCertified;
    verdict.rate = data.rate;
  } else {
    verdict.kind = VerdictKind::NumericallyUnstable;
    verdict.rate = profile.rate;
  }
  return verdict;
}

}  // namespace instab::instability
