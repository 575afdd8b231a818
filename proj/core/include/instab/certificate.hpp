#pragma once

// Dominance certificates
//   log|rho(g) v| >= sum_j alpha_j log|rho_j(g) w_j| + c   for all g in SL_n(R),
// with rho_j = Wedge(j, std), alpha_j >= 0 rational, and w_j = rho_j(k^T) v_j
// the highest weight vectors of the certificate's order moved into its frame.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "instab/cartan.hpp"
#include "instab/instability.hpp"
#include "instab/reps.hpp"

namespace instab::certificate {

using linalg::Mat;

struct ConstantEstimate {
  std::string method = "xi-grid";
  int frames = 0;           // frames evaluated
  int excluded = 0;         // frames whose min-norm point differs from u
  double xi_min = 0.0;      // min over used frames of xi(k)
  double safety_margin = 0.1;
};

struct KempfRecord {
  cartan::Cocharacter tau;
  std::int64_t m = 0;
  std::int64_t norm_squared = 0;
  double ratio = 0.0;
};

struct VerificationReport {
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  double box = 5.0;
  double tol = 1e-6;
  int failures = 0;
  double min_margin = 0.0;
  double mean_margin = 0.0;
  bool ray_checked = false;
  double lhs_slope = 0.0;
  double rhs_slope = 0.0;
  double slope_difference = 0.0;
  bool ray_ok = true;

  bool passed() const noexcept { return failures == 0 && ray_ok; }
};

struct DominanceCert {
  int n = 0;
  std::string spec;
  reps::RepVector v;
  Mat frame;                  // k in SO(n); identity for torus-certified input
  std::string frame_source;
  cartan::SimpleSystem order;
  cartan::ExactVector direction;  // u; the shrinking ray is pi(exp(-t u/|u|) k)
  double rate = 0.0;              // |u|
  Rational rate_squared;
  std::vector<Rational> alphas;   // n - 1 entries, alpha_j >= 0
  std::vector<reps::RepVector> hw_vectors;  // w_j in Wedge(j, std), unit norm
  double constant = 0.0;
  ConstantEstimate constant_estimate;
  std::optional<KempfRecord> kempf;
  std::optional<double> geodesic_rate;  // numeric cross-check when run
  VerificationReport verification;
};

struct CertOptions {
  std::uint64_t seed = 0x5eed;
  instability::InstabilityBudget budget;
  bool geodesic_cross_check = true;
  int xi_frames = 1000;
  double safety_margin = 0.1;
  double eps = 1e-10;
  std::int64_t verify_samples = 0;
  double verify_box = 5.0;
  double verify_tol = 1e-6;
};

/// Throws StableInputError when no unstable direction is found.
DominanceCert dominance_certificate(const reps::Representation& rep,
                                    const reps::RepVector& v, const CertOptions& opts = {});

struct Sampler {
  double box = 5.0;  // a-coordinates uniform in [-box, box], then made traceless
  std::uint64_t seed = 0x5eed;
};

/// Margin of the certificate inequality at g.
double certificate_margin(const DominanceCert& cert, const reps::Representation& rep,
                          const reps::RepVector& v, const reps::GroupElement& g);

/// Samples g = k1 exp(diag(a)) k2 (Haar k_i) and checks margin >= -tol, then
/// compares decay slopes of both sides along the shrinking ray. Sample i uses
/// its own counter-derived stream, so reports are independent of scheduling.
VerificationReport verify_dominance(const DominanceCert& cert,
                                    const reps::Representation& rep,
                                    const reps::RepVector& v, std::int64_t samples,
                                    const Sampler& sampler, double tol = 1e-6,
                                    int threads = 1);

inline constexpr const char* kSchema = "instab-cert/1";

nlohmann::json to_json(const DominanceCert& cert);
/// Throws ParseError on schema violations.
DominanceCert cert_from_json(const nlohmann::json& j);
/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string to_canonical_string(const DominanceCert& cert);

nlohmann::json rational_to_json(const Rational& q);
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const reps::RepVector& v);
reps::RepVector vector_from_json(const nlohmann::json& j);

}  // namespace instab::certificate
