#pragma once

#include <vector>

#include <Eigen/Dense>

#include "instab/random.hpp"

namespace instab::linalg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Haar-distributed element of SO(n): QR of a Gaussian matrix, with the
/// sign convention that makes R's diagonal positive, then a column flip to
/// land in det = +1.
Mat haar_special_orthogonal(int n, Rng& rng);

/// exp(t * p) for symmetric p.
Mat expm_symmetric(const Mat& p, double t = 1.0);

/// Symmetric eigendecomposition p = Q diag(w) Q^T with w sorted
/// non-increasing and det(Q) = +1.
struct SymmetricEigen {
  Vec values;
  Mat vectors;
};
SymmetricEigen symmetric_eigen(const Mat& p);

/// Frobenius inner product tr(X^T Y); on symmetric matrices this is the
/// trace form tr(XY).
double trace_inner(const Mat& x, const Mat& y);
double trace_norm(const Mat& x);

/// Orthonormal basis, under the trace form, of the symmetric traceless
/// n x n matrices: off-diagonal (E_ij + E_ji)/sqrt2 for i < j, followed by a
/// Helmert basis of the traceless diagonal.
std::vector<Mat> symmetric_traceless_basis(int n);
Mat symmetric_from_coords(int n, const Vec& coords);
Vec symmetric_coords(const Mat& p);

/// log singular values (non-increasing) of diag(exp(t * w)) * m, computed by
/// one-sided Jacobi in extended precision. Accurate to a relative error set
/// by the conditioning of m alone, so t * w may exceed the double range.
std::vector<long double> log_singular_values_scaled(const Mat& m, const Vec& w,
                                                    long double t);

/// log singular values (non-increasing) of g.
std::vector<double> log_singular_values(const Mat& g);

/// Projection onto the orthogonal complement of the all-ones vector.
Vec remove_trace(const Vec& x);

}  // namespace instab::linalg
