#include "instab/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "instab/errors.hpp"

namespace instab::certificate {

using instability::FlatShrinkData;
using reps::GroupElement;
using reps::Representation;
using reps::RepVector;
using linalg::Vec;

namespace {

constexpr std::uint64_t kXiStream = 0xc0457a;
constexpr std::uint64_t kSampleStream = 0x5a3b1e;

// Haar element of the stabiliser of u in SO(n): independent orthogonal
// blocks on the tie classes of u, with a sign fixing the determinant.
Mat stabiliser_element(const cartan::ExactVector& u, Rng& rng) {
  const int n = static_cast<int>(u.size());
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (auto& b : blocks)
      if (u[b[0]] == u[i]) {
        b.push_back(i);
        placed = true;
        break;
      }
    if (!placed) blocks.push_back({i});
  }
  std::bernoulli_distribution coin(0.5);
  Mat out = Mat::Zero(n, n);
  for (const auto& b : blocks) {
    const int m = static_cast<int>(b.size());
    Mat o = m == 1 ? Mat(Mat::Identity(1, 1)) : linalg::haar_special_orthogonal(m, rng);
    if (coin(rng)) o.col(0) *= -1;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out(b[i], b[j]) = o(i, j);
  }
  if (out.determinant() < 0) out.row(blocks[0][0]) *= -1;
  return out;
}

// xi(k): the largest t such that the weights with r_lambda(k) >= t contain u
// in their hull. Returns nullopt when the min-norm point of the active
// weights of rho(k) v is not u.
std::optional<double> xi_value(const Representation& rep, const RepVector& v, const Mat& k,
                               const cartan::ExactVector& u, double eps) {
  const FlatShrinkData data = instability::flat_shrink_data(rep, v, k, eps);
  double dev = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    dev = std::max(dev, std::fabs(to_double(data.u[i] - u[i])));
  if (dev > 1e-6) return std::nullopt;
  std::vector<std::size_t> idx(data.active.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return data.active[a].log_norm > data.active[b].log_norm;
  });
  std::vector<cartan::ExactVector> prefix;
  for (std::size_t i : idx) {
    prefix.push_back(data.active[i].weight.coords());
    if (instability::hull_contains(prefix, u)) return data.active[i].log_norm;
  }
  return std::nullopt;
}

struct Fundamentals {
  std::vector<Representation> reps;
};

Fundamentals build_fundamentals(int n) {
  Fundamentals f;
  for (int j = 1; j < n; ++j) f.reps.push_back(reps::build_rep(reps::RepSpec::wedge(j, reps::RepSpec::standard()), n));
  return f;
}

double margin_with(const DominanceCert& cert, const Fundamentals& fund, const Representation& rep,
                   const RepVector& v, const GroupElement& g) {
  double rhs = cert.constant;
  for (std::size_t j = 0; j < cert.alphas.size(); ++j) {
    if (cert.alphas[j] == 0) continue;
    const double nrm = reps::rep_norm(fund.reps[j], reps::act(fund.reps[j], g, cert.hw_vectors[j]));
    rhs += to_double(cert.alphas[j]) * std::log(nrm);
  }
  return instability::shrink_value(rep, v, g) - rhs;
}

void check_cert_shape(const DominanceCert& cert, const Representation& rep, const RepVector& v) {
  if (cert.n != rep.n()) throw DimensionError("certificate is for a different n");
  if (v.dim() != rep.dim()) throw DimensionError("vector dimension does not match the representation");
  if (cert.alphas.size() != static_cast<std::size_t>(cert.n - 1) ||
      cert.hw_vectors.size() != static_cast<std::size_t>(cert.n - 1))
    throw DimensionError("certificate must carry n - 1 coefficients and vectors");
  if (cert.frame.rows() != cert.n || cert.frame.cols() != cert.n)
    throw DimensionError("certificate frame has wrong size");
}

// log |rho(exp(-t u/|u|) k) x| from the frame coordinates y = rho(k) x of
// the active components; the diagonal action is applied in log space.
double ray_log_norm(const Representation& rep, const Vec& y, const std::vector<bool>& active,
                    const cartan::RealVector& uhat, double t) {
  double top = -std::numeric_limits<double>::infinity();
  std::vector<double> ell(rep.dim(), top);
  for (int b = 0; b < rep.dim(); ++b) {
    if (!active[b] || y[b] == 0) continue;
    ell[b] = -2 * t * rep.basis_weights()[b].pair(uhat) + std::log(rep.gram_real()[b] * y[b] * y[b]);
    top = std::max(top, ell[b]);
  }
  double sum = 0;
  for (double e : ell)
    if (std::isfinite(e)) sum += std::exp(e - top);
  return 0.5 * (top + std::log(sum));
}

}  // namespace

DominanceCert dominance_certificate(const Representation& rep, const RepVector& v,
                                    const CertOptions& opts) {
  if (v.dim() != rep.dim()) throw DimensionError("vector dimension does not match the representation");
  if (v.is_zero()) throw DomainError("zero vector");
  const int n = rep.n();

  // Best torus-certified frame among the candidates.
  std::optional<FlatShrinkData> best;
  std::string best_source;
  for (const auto& [k, source] : instability::candidate_frames(rep, v, opts.budget)) {
    FlatShrinkData data = instability::flat_shrink_data(rep, v, k, opts.eps);
    if (data.bounded_below) continue;
    if (!best || data.rate > best->rate + 1e-12) {
      best = std::move(data);
      best_source = source;
    }
  }

  std::optional<double> geodesic_rate;
  if (opts.geodesic_cross_check || !best) {
    instability::ShrinkOptions so = opts.budget.geodesic;
    if (best) {
      std::vector<double> d(best->u.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = -to_double(best->u[i]);
      Mat p = best->k.transpose() * Eigen::Map<const linalg::Vec>(d.data(), n).asDiagonal() * best->k;
      so.seeds.push_back(p);
    }
    const auto profile = instability::sphere_minimum_profile(rep, v, so);
    if (!best && profile.rate < so.stable_slope)
      throw StableInputError("no shrinking direction: the input looks stable");
    geodesic_rate = profile.rate;
    const Mat k = instability::geodesic_frame(profile.direction);
    FlatShrinkData data = instability::flat_shrink_data(rep, v, k, 1e-6);
    if (!data.bounded_below && (!best || data.rate > best->rate + 1e-9)) {
      best = std::move(data);
      best_source = "geodesic";
    }
  }
  if (!best) throw Error("f_v decreases linearly but no frame certifies a torus direction");

  DominanceCert cert;
  cert.n = n;
  cert.spec = rep.spec()->to_string();
  cert.v = v;
  cert.frame = best->k;
  cert.frame_source = best_source;
  cert.direction = best->u;
  cert.order = cartan::dominant_order(cert.direction);
  cert.rate_squared = cartan::form_inner(cert.direction, cert.direction);
  cert.rate = std::sqrt(to_double(cert.rate_squared));
  for (int j = 0; j + 1 < n; ++j) {
    const Rational a = cert.direction[cert.order[j]] - cert.direction[cert.order[j + 1]];
    if (a < 0) throw Error("chamber membership failed for the certificate direction");
    cert.alphas.push_back(a);
  }
  const bool exact_frame = (best->k.array() == Mat::Identity(n, n).array()).all();
  const GroupElement kt = GroupElement::trusted(best->k.transpose());
  for (int j = 1; j < n; ++j) {
    auto [wrep, vj] = reps::highest_weight_vector(n, j, cert.order);
    cert.hw_vectors.push_back(exact_frame ? vj : reps::act(wrep, kt, vj));
  }
  cert.geodesic_rate = geodesic_rate;

  try {
    const double keps = best_source == "geodesic" ? 1e-6 : opts.eps;
    const auto kr = instability::torus_kempf(rep, v, best->k, keps);
    cert.kempf = KempfRecord{kr.tau, kr.m, kr.norm_squared, kr.ratio};
  } catch (const StableInputError&) {
  }

  // Constant: minimise xi over frames b k, b in the stabiliser of u.
  ConstantEstimate est;
  est.safety_margin = opts.safety_margin;
  double xi_min = std::numeric_limits<double>::infinity();
  const double xeps = best_source == "geodesic" ? 1e-6 : opts.eps;
  for (int i = 0; i < std::max(1, opts.xi_frames); ++i) {
    Mat k = best->k;
    if (i > 0) {
      Rng rng = make_rng(opts.seed, kXiStream, static_cast<std::uint64_t>(i));
      k = stabiliser_element(cert.direction, rng) * best->k;
    }
    ++est.frames;
    const auto xi = xi_value(rep, v, k, cert.direction, xeps);
    if (!xi) {
      ++est.excluded;
      continue;
    }
    xi_min = std::min(xi_min, *xi);
  }
  if (!std::isfinite(xi_min)) throw Error("constant estimation: every frame was excluded");
  est.xi_min = xi_min;
  cert.constant = xi_min - opts.safety_margin;
  cert.constant_estimate = est;

  cert.verification.seed = opts.seed;
  cert.verification.box = opts.verify_box;
  cert.verification.tol = opts.verify_tol;
  if (opts.verify_samples > 0)
    cert.verification = verify_dominance(cert, rep, v, opts.verify_samples,
                                         Sampler{opts.verify_box, opts.seed}, opts.verify_tol);
  return cert;
}

double certificate_margin(const DominanceCert& cert, const Representation& rep,
                          const RepVector& v, const GroupElement& g) {
  check_cert_shape(cert, rep, v);
  return margin_with(cert, build_fundamentals(cert.n), rep, v, g);
}

VerificationReport verify_dominance(const DominanceCert& cert, const Representation& rep,
                                    const RepVector& v, std::int64_t samples,
                                    const Sampler& sampler, double tol, int threads) {
  check_cert_shape(cert, rep, v);
  VerificationReport report;
  report.samples = std::max<std::int64_t>(samples, 0);
  report.seed = sampler.seed;
  report.box = sampler.box;
  report.tol = tol;
  const int n = cert.n;
  const Fundamentals fund = build_fundamentals(n);

  std::vector<double> margins(static_cast<std::size_t>(report.samples));
  const auto work = [&](std::int64_t begin, std::int64_t end) {
    std::uniform_real_distribution<double> box(-sampler.box, sampler.box);
    for (std::int64_t i = begin; i < end; ++i) {
      Rng rng = make_rng(sampler.seed, kSampleStream, static_cast<std::uint64_t>(i));
      const Mat k1 = linalg::haar_special_orthogonal(n, rng);
      const Mat k2 = linalg::haar_special_orthogonal(n, rng);
      linalg::Vec a(n);
      for (int c = 0; c < n; ++c) a[c] = box(rng);
      a = linalg::remove_trace(a);
      const Mat g = k1 * Mat(a.array().exp().matrix().asDiagonal()) * k2;
      margins[static_cast<std::size_t>(i)] = margin_with(cert, fund, rep, v, GroupElement::trusted(g));
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::int64_t>(report.samples, 1))));
  if (workers == 1) {
    work(0, report.samples);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (report.samples + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t b = w * chunk, e = std::min(report.samples, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& t : pool) t.join();
  }
  // Sequential reduction in sample order, independent of the schedule.
  if (!margins.empty()) {
    double sum = 0, lo = std::numeric_limits<double>::infinity();
    for (double m : margins) {
      sum += m;
      lo = std::min(lo, m);
      if (!(m >= -tol)) ++report.failures;
    }
    report.min_margin = lo;
    report.mean_margin = sum / static_cast<double>(margins.size());
  }

  // Along the shrinking ray both sides must decay at the same rate.
  if (!cert.direction.is_zero()) {
    report.ray_checked = true;
    const cartan::RealVector ur = cartan::to_real(cert.direction);
    std::vector<double> uh(ur.coords());
    const double un = std::sqrt(cartan::form_inner(ur, ur));
    for (auto& c : uh) c /= un;
    const cartan::RealVector uhat(uh);
    const GroupElement k = GroupElement::trusted(cert.frame);
    const RepVector y = reps::act(rep, k, v);
    std::vector<bool> active(rep.dim(), false);
    {
      const auto comps = reps::weight_components(rep, y, cert.frame_source == "geodesic" ? 1e-6 : 1e-10);
      for (int b = 0; b < rep.dim(); ++b)
        for (const auto& c : comps)
          if (c.weight == rep.basis_weights()[b]) active[b] = c.active();
    }
    const auto side = [&](double t) {
      double rhs = cert.constant;
      for (std::size_t j = 0; j < cert.alphas.size(); ++j) {
        if (cert.alphas[j] == 0) continue;
        const Representation& fr = fund.reps[j];
        const RepVector yj = reps::act(fr, k, cert.hw_vectors[j]);
        std::vector<bool> all(fr.dim(), true);
        rhs += to_double(cert.alphas[j]) * ray_log_norm(fr, yj.coords(), all, uhat, t);
      }
      return std::pair{ray_log_norm(rep, y.coords(), active, uhat, t), rhs};
    };
    const double t1 = 20, t2 = 40;
    const auto [l1, r1] = side(t1);
    const auto [l2, r2] = side(t2);
    report.lhs_slope = (l2 - l1) / (t2 - t1);
    report.rhs_slope = (r2 - r1) / (t2 - t1);
    report.slope_difference = std::fabs(report.lhs_slope - report.rhs_slope);
    report.ray_ok = report.slope_difference <= 1e-3;
  }
  return report;
}

}  // namespace instab::certificate
