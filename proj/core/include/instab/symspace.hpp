#pragma once

// The symmetric space SO(n)\SL_n(R), modelled as P(n,R): symmetric positive
// definite matrices of determinant one, with pi(g) = g^T g and the right
// action p . g = g^T p g. The metric is normalised so that
// t -> pi(exp(t p)) is a unit-speed geodesic for every symmetric traceless p
// with tr(p^2) = 1, i.e. d(x, y) = (1/2) * sqrt(sum_i log^2 mu_i) where mu_i
// are the eigenvalues of x^{-1} y.

#include <utility>
#include <vector>

#include "instab/cartan.hpp"
#include "instab/linalg.hpp"
#include "instab/reps.hpp"

namespace instab::symspace {

using linalg::Mat;
using linalg::Vec;
using reps::GroupElement;

class SymPoint {
 public:
  SymPoint() = default;
  /// Validates symmetry (1e-10), positive definiteness and det = 1 (1e-9).
  explicit SymPoint(Mat p);
  static SymPoint trusted(Mat p);
  static SymPoint origin(int n);

  int n() const noexcept { return static_cast<int>(p_.rows()); }
  const Mat& matrix() const noexcept { return p_; }

  /// Some g with pi(g) = p (upper-triangular Cholesky factor).
  GroupElement lift() const;

 private:
  Mat p_;
};

/// Unit-speed ray t -> pi(exp(t * direction) * base).
class GeodesicRay {
 public:
  GeodesicRay(GroupElement base, Mat direction);
  /// Ray from the origin along diag(a)/|a|.
  static GeodesicRay from_origin(const cartan::RealVector& a);

  const GroupElement& base() const noexcept { return base_; }
  const Mat& direction() const noexcept { return dir_; }
  SymPoint at(double t) const;

 private:
  GroupElement base_;
  Mat dir_;
};

/// P_a and its Levi/unipotent data, described in the dominant ordering of a.
/// h is in P_a iff h_ij = 0 whenever a_i < a_j.
class ParabolicData {
 public:
  explicit ParabolicData(const cartan::RealVector& a, double tie_tol = 1e-12);

  const cartan::RealVector& direction() const noexcept { return a_; }
  const cartan::SimpleSystem& order() const noexcept { return order_; }
  /// Blocks of original coordinate indices, in dominant order.
  const std::vector<std::vector<int>>& blocks() const noexcept { return blocks_; }
  /// Block label of every original coordinate.
  const std::vector<int>& block_of() const noexcept { return block_of_; }

  bool contains(const Mat& h, double tol = 1e-9) const;
  /// Permutation matrix Pi with Pi e_p = e_{sigma(p)}.
  Mat permutation_matrix() const;

 private:
  cartan::RealVector a_;
  cartan::SimpleSystem order_;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
};

SymPoint project(const GroupElement& g);

double distance(const SymPoint& p, const SymPoint& q);

/// d(pi(g), pi(h)) computed on the group side, = |log sigma(h g^{-1})|.
double group_distance(const GroupElement& g, const GroupElement& h);

/// Point at parameter s in [0, 1] of the geodesic from x to y.
SymPoint geodesic_interpolate(const SymPoint& x, const SymPoint& y, double s);

struct CartanDecomposition {
  Mat k1;
  cartan::RealVector a;  // non-increasing
  Mat k2;
};
/// g = k1 * exp(diag(a)) * k2 with k1, k2 in SO(n).
CartanDecomposition cartan_decompose(const GroupElement& g);

struct IwasawaDecomposition {
  Mat k;  // SO(n)
  Mat t;  // block-diagonal SPD, exp of (stab(a) cap p)
  Mat u;  // block-unipotent, in U_a
};
/// g = k * t * u for the parabolic of pdata (unique).
IwasawaDecomposition iwasawa_decompose(const GroupElement& g, const ParabolicData& pdata);

struct BusemannLimit {
  double value;                 // d(x, gamma(t_max)) - t_max
  std::vector<double> sequence; // d(x, gamma(t)) - t over the grid
  bool monotone;                // sequence non-increasing (up to 1e-9)
  double last_decrement;        // sequence[k-2] - sequence[k-1]
};

/// Truncated Busemann function of the ray at x. Distances along the ray are
/// evaluated in extended precision, so grids out to t = 1000 are fine.
BusemannLimit busemann_limit(const GeodesicRay& ray, const SymPoint& x,
                             const std::vector<double>& t_grid);
BusemannLimit busemann_limit(const GeodesicRay& ray, const GroupElement& x,
                             const std::vector<double>& t_grid);

/// Busemann value at pi(g) computed from fundamental representations:
///   |a| * sum_j a_j * log(|rho_j(g) v_j| / |v_j|),
/// a_j = chi_decompose(a, dominant_order(a)) and v_j the highest weight
/// vectors of that order. This is the Busemann function, normalised to vanish
/// at the origin, of the unit-speed ray pi(exp(-t diag(a)/|a|)): the ray
/// along which the highest weight vectors contract.
double busemann_formula(const cartan::RealVector& a, const GroupElement& g);

/// The ray whose Busemann function busemann_formula(a, .) evaluates.
GeodesicRay busemann_ray(const cartan::RealVector& a);

/// |det Ad(h)| on the nilradical of the parabolic.
double modular_delta(const ParabolicData& pdata, const GroupElement& h);

/// Character by which an element h of the j-th maximal standard parabolic
/// of `order` scales the highest weight line of Wedge(j, std): det of the
/// leading j x j block. Satisfies |chi(h)|^n = modular_delta of that
/// parabolic.
double highest_weight_character(int j, const cartan::SimpleSystem& order,
                                const GroupElement& h);

}  // namespace instab::symspace
