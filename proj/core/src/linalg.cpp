#include "instab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace instab::linalg {

Mat haar_special_orthogonal(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

SymmetricEigen symmetric_eigen(const Mat& p) {
  Eigen::SelfAdjointEigenSolver<Mat> es(p);
  const int n = static_cast<int>(p.rows());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const Vec& w = es.eigenvalues();
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] > w[b]; });
  SymmetricEigen out{Vec(n), Mat(n, n)};
  for (int i = 0; i < n; ++i) {
    out.values[i] = w[idx[i]];
    out.vectors.col(i) = es.eigenvectors().col(idx[i]);
  }
  if (out.vectors.determinant() < 0) out.vectors.col(n - 1) = -out.vectors.col(n - 1);
  return out;
}

Mat expm_symmetric(const Mat& p, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(p);
  const Vec e = (t * es.eigenvalues()).array().exp();
  return es.eigenvectors() * e.asDiagonal() * es.eigenvectors().transpose();
}

double trace_inner(const Mat& x, const Mat& y) { return (x.array() * y.array()).sum(); }
double trace_norm(const Mat& x) { return std::sqrt(trace_inner(x, x)); }

std::vector<Mat> symmetric_traceless_basis(int n) {
  std::vector<Mat> basis;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = e(j, i) = r;
      basis.push_back(e);
    }
  // Helmert: h_m = (1, ..., 1, -m, 0, ...)/sqrt(m(m+1)) with m leading ones.
  for (int m = 1; m < n; ++m) {
    Mat e = Mat::Zero(n, n);
    const double c = 1.0 / std::sqrt(static_cast<double>(m) * (m + 1));
    for (int i = 0; i < m; ++i) e(i, i) = c;
    e(m, m) = -m * c;
    basis.push_back(e);
  }
  return basis;
}

Mat symmetric_from_coords(int n, const Vec& coords) {
  const auto basis = symmetric_traceless_basis(n);
  Mat p = Mat::Zero(n, n);
  for (std::size_t i = 0; i < basis.size(); ++i) p += coords[static_cast<Eigen::Index>(i)] * basis[i];
  return p;
}

Vec symmetric_coords(const Mat& p) {
  const auto basis = symmetric_traceless_basis(static_cast<int>(p.rows()));
  Vec c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) c[static_cast<Eigen::Index>(i)] = trace_inner(p, basis[i]);
  return c;
}

std::vector<long double> log_singular_values_scaled(const Mat& m, const Vec& w,
                                                    long double t) {
  // Singular values of D M equal those of B = M^T D, whose columns are the
  // columns of M^T scaled by D. One-sided (Hestenes) Jacobi orthogonalises
  // columns without mixing scales, which keeps small singular values
  // relatively accurate.
  using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(m.rows());
  LMat b = m.transpose().cast<long double>();
  // Factor the scale out: column j of B is s_j * c_j with s_j = exp(t w_j).
  // Work with log-scales and rescale pairs during rotation so that nothing
  // overflows even when t w_j exceeds the long double exponent range.
  std::vector<long double> logscale(n);
  for (int j = 0; j < n; ++j) logscale[j] = t * static_cast<long double>(w[j]);
  // Normalise the columns of the unscaled part.
  for (int j = 0; j < n; ++j) {
    const long double nrm = b.col(j).norm();
    if (nrm > 0) {
      b.col(j) /= nrm;
      logscale[j] += std::log(nrm);
    }
  }
  const long double eps = std::numeric_limits<long double>::epsilon();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        // Columns are exp(logscale) * unit-ish vectors.
        const long double ap = b.col(p).squaredNorm();
        const long double aq = b.col(q).squaredNorm();
        const long double cpq = b.col(p).dot(b.col(q));
        if (ap == 0 || aq == 0) continue;
        const long double cosang = cpq / std::sqrt(ap * aq);
        if (std::fabs(cosang) <= 8 * eps) continue;
        rotated = true;
        // Actual Gram entries: alpha = e^{2 lp} ap, beta = e^{2 lq} aq,
        // gamma = e^{lp + lq} cpq. Work relative to the larger scale.
        const long double lp = logscale[p], lq = logscale[q];
        const long double diff = lq - lp;  // log(s_q / s_p)
        // zeta = (beta - alpha)/(2 gamma) computed with ratios.
        long double zeta;
        if (diff > 0) {
          const long double r = std::exp(-diff);  // s_p / s_q <= 1
          zeta = (aq - r * r * ap) / (2 * r * cpq);
        } else {
          const long double r = std::exp(diff);  // s_q / s_p <= 1
          zeta = (r * r * aq - ap) / (2 * r * cpq);
        }
        const long double tq = (zeta >= 0 ? 1 : -1) / (std::fabs(zeta) + std::sqrt(1 + zeta * zeta));
        const long double cs = 1 / std::sqrt(1 + tq * tq);
        const long double sn = cs * tq;
        // new_p = c * P - s * Q, new_q = s * P + c * Q with P, Q the scaled
        // columns. Express the results in the scale of the larger column.
        const long double lmax = std::max(lp, lq);
        const long double fp = std::exp(lp - lmax), fq = std::exp(lq - lmax);
        Eigen::Matrix<long double, Eigen::Dynamic, 1> np = cs * fp * b.col(p) - sn * fq * b.col(q);
        Eigen::Matrix<long double, Eigen::Dynamic, 1> nq = sn * fp * b.col(p) + cs * fq * b.col(q);
        const long double npn = np.norm(), nqn = nq.norm();
        if (npn > 0) {
          b.col(p) = np / npn;
          logscale[p] = lmax + std::log(npn);
        } else {
          b.col(p).setZero();
          logscale[p] = -std::numeric_limits<long double>::infinity();
        }
        if (nqn > 0) {
          b.col(q) = nq / nqn;
          logscale[q] = lmax + std::log(nqn);
        } else {
          b.col(q).setZero();
          logscale[q] = -std::numeric_limits<long double>::infinity();
        }
      }
    if (!rotated) break;
  }
  std::sort(logscale.begin(), logscale.end(), std::greater<>());
  return logscale;
}

std::vector<double> log_singular_values(const Mat& g) {
  Eigen::JacobiSVD<Mat> svd(g);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    out.push_back(std::log(svd.singularValues()[i]));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Vec remove_trace(const Vec& x) {
  return (x.array() - x.mean()).matrix();
}

}  // namespace instab::linalg
