#pragma once

// Shrink-rate analysis of a vector v in a representation: behaviour of
// f_v(pi(g)) = log|rho(g) v| on maximal flats, the fastest shrinking geodesic
// found by ball minimisation, and Kempf's optimal cocharacter.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "instab/cartan.hpp"
#include "instab/linalg.hpp"
#include "instab/min_norm.hpp"
#include "instab/reps.hpp"

namespace instab::instability {

using linalg::Mat;
using linalg::Vec;

/// Flat data of f_v on the maximal flat pi(A k):
///   f~_k(x) = max_lambda (<a_lambda, x> + r_lambda(k)),  r = log|(rho(k)v)_lambda|.
struct FlatShrinkData {
  Mat k;
  std::vector<reps::WeightComponent> active;
  cartan::ExactVector u;  // min-norm point of the active weights
  std::vector<Rational> coeffs;  // convex coefficients over `active`
  double rate = 0.0;             // |u|
  /// C in f~_k(x) >= <x, u> + C, from the convex combination sum coeffs*r.
  double bound_const = 0.0;
  /// 0 lies in the hull: f_v is bounded below on this flat.
  bool bounded_below = false;
};

/// Active weights are read from rho(k) v: exactly when k is the identity and
/// v is exact, otherwise with relative threshold eps.
FlatShrinkData flat_shrink_data(const reps::Representation& rep, const reps::RepVector& v,
                                const Mat& k, double eps = 1e-10);

/// f_v at pi(g).
double shrink_value(const reps::Representation& rep, const reps::RepVector& v,
                    const reps::GroupElement& g);

struct ShrinkOptions {
  /// Radii of the balls. Empty means auto_s_grid(rep).
  std::vector<double> s_grid;
  int starts = 16;
  int max_iterations = 500;
  std::uint64_t seed = 0x5eed;
  /// Converged when the last Cauchy distance between consecutive unit
  /// directions is at most this.
  double tol = 5e-2;
  /// Slopes above -stable_slope count as "not decreasing linearly".
  double stable_slope = 1e-3;
  /// Extra starting directions (symmetric traceless, any norm).
  std::vector<Mat> seeds;
};

/// Eight radii up to S = 24 / (largest distance between two basis weights). Beyond
/// that the sphere minimiser must be located to below double precision:
/// a frame error e inflates f_v by up to e^2 * exp(2 s * spread).
std::vector<double> auto_s_grid(const reps::Representation& rep);

struct ShrinkTracePoint {
  double s;
  Mat direction;  // unit p with x_s = pi(exp(s p))
  double value;   // f_v(x_s)
};

struct ShrinkGeodesicResult {
  Mat direction;  // unit, trace form
  double rate = 0.0;
  double intercept = 0.0;
  std::vector<ShrinkTracePoint> trace;
  std::vector<double> cauchy;  // d(gamma_i(1), gamma_{i+1}(1))
  bool converged = false;
};

/// Minimises f_v over the sphere of radius s about the origin for every s in
/// the grid (multi-start BFGS on the unit sphere of p, warm-started along the
/// grid) and reads off the limiting direction and the linear decay rate.
/// Throws StableInputError when the sphere minimum does not decrease
/// linearly.
ShrinkGeodesicResult fastest_shrinking_geodesic(const reps::Representation& rep,
                                                const reps::RepVector& v,
                                                const ShrinkOptions& opts = {});

/// Same ball minimisation restricted to the maximal flat pi(A k).
ShrinkGeodesicResult flat_shrinking_geodesic(const reps::Representation& rep,
                                             const reps::RepVector& v, const Mat& k,
                                             const ShrinkOptions& opts = {});

/// Sphere-minimum profile without the instability requirement.
ShrinkGeodesicResult sphere_minimum_profile(const reps::Representation& rep,
                                            const reps::RepVector& v,
                                            const ShrinkOptions& opts = {});

struct KempfResult {
  cartan::Cocharacter tau;  // primitive, proportional to u
  std::int64_t m = 0;       // m(v, tau) > 0
  std::int64_t norm_squared = 0;
  double ratio = 0.0;  // m / |tau| = |u|
  cartan::ExactVector u;
};

/// Exact min-norm point of the active weights of rho(k) v and the primitive
/// cocharacter along it. Throws StableInputError if 0 is in the hull.
KempfResult torus_kempf(const reps::Representation& rep, const reps::RepVector& v);
KempfResult torus_kempf(const reps::Representation& rep, const reps::RepVector& v,
                        const Mat& k, double eps = 1e-10);

enum class VerdictKind { TorusCertified, NumericallyUnstable, LikelyStable };

std::string to_string(VerdictKind kind);

struct Verdict {
  VerdictKind kind = VerdictKind::LikelyStable;
  Mat frame;                 // certifying frame (TorusCertified)
  std::string frame_source;  // "identity", "moment", "random", "geodesic"
  double rate = 0.0;         // |u| on the frame, or the numeric rate
  int frames_tried = 0;
};

struct InstabilityBudget {
  int random_frames = 64;
  std::uint64_t seed = 0x5eed;
  bool moment_frames = true;
  ShrinkOptions geodesic;
};

/// Candidate frames in search order: identity, eigenframes of the moment map
/// of v, then Haar-random frames. Each entry is (k, source).
std::vector<std::pair<Mat, std::string>> candidate_frames(const reps::Representation& rep,
                                                          const reps::RepVector& v,
                                                          const InstabilityBudget& budget);

/// Frame k of the maximal flat containing t -> pi(exp(t p)), i.e.
/// p = k^T diag(w) k with w non-increasing.
Mat geodesic_frame(const Mat& direction);

/// Throws DomainError for v = 0.
Verdict is_unstable(const reps::Representation& rep, const reps::RepVector& v,
                    const InstabilityBudget& budget = {});

/// Gradient of f_v at the origin, as a symmetric traceless matrix.
Mat moment_map(const reps::Representation& rep, const reps::RepVector& v);

}  // namespace instab::instability
