#include <gtest/gtest.h>

#include <cmath>

#include "instab/errors.hpp"
#include "instab/instability.hpp"
#include "instab/symspace.hpp"
#include "oracles/oracles.hpp"
#include "support/generators.hpp"

using namespace instab;
using namespace instab::instability;
using cartan::ExactVector;
using reps::GroupElement;
using reps::RepVector;

namespace {

ExactVector ev(std::vector<Rational> x) { return ExactVector(std::move(x)); }

reps::Representation rep_of(const std::string& s, int n) { return reps::build_rep(reps::parse_spec(s), n); }

RepVector exact(std::vector<Rational> v) { return RepVector(std::move(v)); }

std::vector<std::vector<double>> as_double(const std::vector<ExactVector>& pts) {
  std::vector<std::vector<double>> out;
  for (const auto& p : pts) out.push_back(to_double(p.coords()));
  return out;
}

std::vector<ExactVector> random_polytope(Rng& rng, int n, int count) {
  std::vector<ExactVector> pts;
  for (int i = 0; i < count; ++i) {
    std::vector<Rational> c(n);
    Rational sum = 0;
    for (int k = 0; k + 1 < n; ++k) {
      c[k] = Rational(gen::integer(rng, -6, 6), gen::integer(rng, 1, 3));
      sum += c[k];
    }
    c[n - 1] = -sum;
    pts.emplace_back(c);
  }
  return pts;
}

double brute_force_ratio(const reps::Representation& rep, const std::vector<Rational>& v, int bound) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& tau : oracle::primitive_cocharacters(rep.n(), bound)) {
    double nt = 0;
    for (auto e : tau) nt += static_cast<double>(e * e);
    best = std::max(best, static_cast<double>(oracle::valuation(rep, v, tau)) / std::sqrt(nt));
  }
  return best;
}

// Shrink-rate examples with a known optimum.
struct Case {
  std::string spec;
  int n;
  std::vector<Rational> v;
  double rate;
};

const std::vector<Case>& torus_cases() {
  static const std::vector<Case> c = {
      {"std", 2, {1, 0}, 1 / std::sqrt(2.0)},
      {"wedge(2,std)", 3, {1, 0, 0}, std::sqrt(2.0 / 3)},
      {"std*dual(std)", 2, {0, 1, 0, 0}, std::sqrt(2.0)},
      {"std", 3, {1, 0, 0}, std::sqrt(2.0 / 3)},
      {"std*dual(std)", 3, {0, 1, 0, 0, 0, 1, 0, 0, 0}, 1 / std::sqrt(2.0)},
      {"sym(2,std)", 3, {1, 1, 0, 0, 0, 0}, std::sqrt(2.0 / 3)},
  };
  return c;
}

}  // namespace

TEST(MinNorm, Examples) {
  auto r = min_norm_point({ev({1, -1})});
  EXPECT_EQ(r.u, ev({1, -1}));
  r = min_norm_point({ev({1, -1}), ev({-1, 1})});
  EXPECT_EQ(r.u, ev({0, 0}));
  r = min_norm_point({ev({2, -1, -1}), ev({-1, 2, -1})});
  EXPECT_EQ(r.u, ev({Rational(1, 2), Rational(1, 2), -1}));
  EXPECT_EQ(cartan::form_inner(r.u, r.u), Rational(3, 2));
  EXPECT_NEAR(oracle::min_norm_sq(as_double({ev({2, -1, -1}), ev({-1, 2, -1})})), 1.5, 1e-12);
  EXPECT_THROW(min_norm_point(std::vector<ExactVector>{}), DomainError);
}

TEST(MinNorm, ExactCertificateAndOracle) {
  Rng rng = make_rng(51, 0, 0);
  for (int t = 0; t < 200; ++t) {
    const int n = gen::integer(rng, 2, 5);
    const auto pts = random_polytope(rng, n, gen::integer(rng, 1, 8));
    const auto r = min_norm_point(pts);
    Rational sum = 0;
    std::vector<Rational> comb(n, Rational(0));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ASSERT_GE(r.coeffs[i], 0);
      sum += r.coeffs[i];
      for (int c = 0; c < n; ++c) comb[c] += r.coeffs[i] * pts[i][c];
    }
    EXPECT_EQ(sum, 1);
    EXPECT_EQ(ev(comb), r.u);
    const Rational uu = cartan::form_inner(r.u, r.u);
    for (const auto& p : pts) EXPECT_GE(cartan::form_inner(r.u, p), uu);
    EXPECT_GE(r.gap, 0);
    EXPECT_NEAR(to_double(uu), oracle::min_norm_sq(as_double(pts)), 1e-9);
  }
}

TEST(MinNorm, FloatModeMatchesExact) {
  Rng rng = make_rng(52, 0, 0);
  for (int t = 0; t < 200; ++t) {
    const int n = gen::integer(rng, 2, 6);
    const auto pts = random_polytope(rng, n, gen::integer(rng, 1, 12));
    const auto e = min_norm_point(pts);
    const auto f = min_norm_point(pts, Mode::Float);
    for (int c = 0; c < n; ++c) EXPECT_NEAR(f.u[c], to_double(e.u[c]), 1e-9);
    EXPECT_GE(f.gap, -1e-9);
    double sum = 0;
    for (double x : f.coeffs) {
      EXPECT_GE(x, 0);
      sum += x;
    }
    EXPECT_NEAR(sum, 1, 1e-12);
  }
}

TEST(MinNorm, FormRescalingKeepsDirectionAndOrder) {
  // Under c * tr the dual vectors of the weights are p / c; the optimum moves
  // to u / c and its norm becomes |u| / sqrt(c).
  Rng rng = make_rng(53, 0, 0);
  for (int t = 0; t < 50; ++t) {
    const int n = gen::integer(rng, 2, 4);
    const auto pts = random_polytope(rng, n, 4);
    const Rational c(gen::integer(rng, 1, 7), gen::integer(rng, 1, 7));
    std::vector<ExactVector> scaled;
    for (const auto& p : pts) {
      std::vector<Rational> q = p.coords();
      for (auto& x : q) x /= c;
      scaled.emplace_back(q);
    }
    const auto a = min_norm_point(pts), b = min_norm_point(scaled);
    std::vector<Rational> ua = a.u.coords();
    for (auto& x : ua) x /= c;
    EXPECT_EQ(b.u, ev(ua));
    if (a.u.is_zero()) continue;
    EXPECT_EQ(cartan::dominant_order(a.u), cartan::dominant_order(b.u));
    EXPECT_EQ(c * cartan::form_inner(b.u, b.u), cartan::form_inner(a.u, a.u) / c);
  }
}

TEST(HullContains, Basics) {
  EXPECT_TRUE(hull_contains({ev({1, -1}), ev({-1, 1})}, ev({0, 0})));
  EXPECT_FALSE(hull_contains({ev({1, -1})}, ev({0, 0})));
  EXPECT_TRUE(hull_contains({ev({2, -1, -1}), ev({-1, 2, -1})}, ev({Rational(1, 2), Rational(1, 2), -1})));
}

TEST(FlatShrinkData, Examples) {
  const auto s2 = rep_of("std", 2);
  auto d = flat_shrink_data(s2, exact({1, 0}), Mat::Identity(2, 2));
  EXPECT_EQ(d.u, ev({Rational(1, 2), Rational(-1, 2)}));
  EXPECT_DOUBLE_EQ(d.rate, 1 / std::sqrt(2.0));
  EXPECT_FALSE(d.bounded_below);
  EXPECT_NEAR(d.rate, oracle::flat_rate_grid({{0.5, -0.5}}), 1e-15);
  // The decay slope of log|exp(-t u) v| along the shrink direction.
  const double t = 30;
  const Mat g = Vec((Vec(2) << std::exp(-t * 0.5 / d.rate), std::exp(t * 0.5 / d.rate)).finished()).asDiagonal();
  EXPECT_NEAR(shrink_value(s2, exact({1, 0}), GroupElement(g)) / t, -d.rate, 1e-12);

  d = flat_shrink_data(s2, exact({1, 1}), Mat::Identity(2, 2));
  EXPECT_TRUE(d.bounded_below);
  EXPECT_EQ(d.rate, 0);

  const auto w = rep_of("wedge(2,std)", 3);
  d = flat_shrink_data(w, exact({1, 0, 0}), Mat::Identity(3, 3));
  EXPECT_NEAR(d.rate, std::sqrt(2.0 / 3), 1e-15);
  EXPECT_NEAR(d.rate, oracle::flat_rate_grid({{1.0 / 3, 1.0 / 3, -2.0 / 3}}), 1e-9);
}

TEST(FlatShrinkData, RateMatchesGridOracle) {
  Rng rng = make_rng(54, 0, 0);
  for (int n = 2; n <= 3; ++n)
    for (const auto& s : gen::small_specs()) {
      const auto rep = rep_of(s, n);
      for (int t = 0; t < 8; ++t) {
        const auto v = gen::rational_vector(rep.dim(), rng, 0.25);
        const auto d = flat_shrink_data(rep, exact(v), Mat::Identity(n, n));
        std::vector<std::vector<double>> w;
        for (const auto& a : d.active) w.push_back(to_double(a.weight.coords().coords()));
        EXPECT_NEAR(d.rate, oracle::flat_rate_grid(w), 1e-8) << s;
      }
    }
}

TEST(FlatShrinkData, LowerBoundOnFlat) {
  Rng rng = make_rng(55, 0, 0);
  for (const auto& s : gen::small_specs()) {
    const int n = 3;
    const auto rep = rep_of(s, n);
    const Mat k = gen::so(n, rng);
    const RepVector v(gen::real_vector(rep.dim(), rng));
    const auto d = flat_shrink_data(rep, v, k);
    for (int i = 0; i < 1000; ++i) {
      const Vec x = gen::traceless(n, rng, 4);
      const cartan::RealVector xr(std::vector<double>(x.data(), x.data() + n));
      double ftilde = -std::numeric_limits<double>::infinity();
      for (const auto& a : d.active) ftilde = std::max(ftilde, a.weight.pair(xr) + a.log_norm);
      double ux = 0;
      for (int c = 0; c < n; ++c) ux += to_double(d.u[c]) * x[c];
      ASSERT_GE(ftilde, ux + d.bound_const - 1e-9) << s;
      // f_v on the flat dominates the max of the components.
      const GroupElement g(Mat(x.array().exp().matrix().asDiagonal()) * k);
      ASSERT_GE(shrink_value(rep, v, g), ftilde - 1e-9);
    }
  }
}

TEST(ShrinkGeodesic, StdExample) {
  const auto s2 = rep_of("std", 2);
  const auto r = fastest_shrinking_geodesic(s2, exact({1, 0}));
  Mat want(2, 2);
  want << -1, 0, 0, 1;
  want /= std::sqrt(2.0);
  EXPECT_LE((r.direction - want).norm(), 1e-6);
  EXPECT_NEAR(r.rate, 1 / std::sqrt(2.0), 1e-9);
  const Vec v = (Vec(2) << 1, 0).finished();
  EXPECT_NEAR(-oracle::sphere_min_n2(s2, v, 20) / 20, r.rate, 1e-9);
}

TEST(ShrinkGeodesic, SphereGridOracleN2) {
  Rng rng = make_rng(56, 0, 0);
  for (const std::string s : {"std", "sym(2,std)", "std*dual(std)", "sym(3,std)"}) {
    const auto rep = rep_of(s, 2);
    for (int t = 0; t < 3; ++t) {
      const auto v = gen::rational_vector(rep.dim(), rng, 0.5);
      ShrinkGeodesicResult r;
      try {
        r = fastest_shrinking_geodesic(rep, exact(v));
      } catch (const StableInputError&) {
        continue;
      }
      const Vec vd = Eigen::Map<const Vec>(to_double(v).data(), rep.dim());
      const double s1 = 10, s2 = 20;
      const double slope = -(oracle::sphere_min_n2(rep, vd, s2) - oracle::sphere_min_n2(rep, vd, s1)) / (s2 - s1);
      EXPECT_NEAR(r.rate, slope, 2e-3) << s;
    }
  }
}

TEST(ShrinkGeodesic, TraceInvariants) {
  for (const auto& c : torus_cases()) {
    const auto rep = rep_of(c.spec, c.n);
    const auto r = fastest_shrinking_geodesic(rep, exact(c.v));
    EXPECT_NEAR(r.rate, c.rate, 1e-4) << c.spec;
    EXPECT_TRUE(r.converged);
    const auto o = symspace::SymPoint::origin(c.n);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const auto& p = r.trace[i];
      EXPECT_NEAR(linalg::trace_norm(p.direction), 1, 1e-9);
      EXPECT_LE((p.direction - p.direction.transpose()).norm(), 1e-12);
      EXPECT_NEAR(p.direction.trace(), 0, 1e-12);
      // Past s ~ 4 the eigenvalues of pi(exp(s p)) span more than double
      // precision resolves, so the distance is only checked on the near grid.
      if (p.s <= 4) {
        const auto x = symspace::project(GroupElement::trusted(linalg::expm_symmetric(p.direction, p.s)));
        EXPECT_NEAR(symspace::distance(o, x), p.s, 1e-6);
      }
      if (i > 0) EXPECT_LT(p.value, r.trace[i - 1].value);
    }
    EXPECT_EQ(r.cauchy.size() + 1, r.trace.size());
  }
}

TEST(ShrinkGeodesic, ScalingAndRotation) {
  Rng rng = make_rng(57, 0, 0);
  for (const auto& c : torus_cases()) {
    const auto rep = rep_of(c.spec, c.n);
    const auto v = exact(c.v);
    const auto r1 = fastest_shrinking_geodesic(rep, v);
    const auto r2 = fastest_shrinking_geodesic(rep, v.scaled(Rational(2)));
    EXPECT_LE((r1.direction - r2.direction).norm(), 1e-6) << c.spec;
    EXPECT_NEAR(r1.rate, r2.rate, 1e-6);
    const Mat h = gen::so(c.n, rng);
    const auto hv = reps::act(rep, GroupElement(h), v);
    const auto r3 = fastest_shrinking_geodesic(rep, hv);
    EXPECT_LE((r3.direction - h * r1.direction * h.transpose()).norm(), 1e-4) << c.spec;
  }
}

TEST(ShrinkGeodesic, IndependentRunsAgree) {
  for (const auto& c : torus_cases()) {
    const auto rep = rep_of(c.spec, c.n);
    ShrinkOptions a, b;
    a.seed = 1;
    b.seed = 99;
    b.starts = 24;
    const auto ra = fastest_shrinking_geodesic(rep, exact(c.v), a);
    const auto rb = fastest_shrinking_geodesic(rep, exact(c.v), b);
    const auto ga = GroupElement::trusted(linalg::expm_symmetric(ra.direction));
    const auto gb = GroupElement::trusted(linalg::expm_symmetric(rb.direction));
    EXPECT_LE(symspace::group_distance(ga, gb), 1e-4) << c.spec;
  }
}

TEST(ShrinkGeodesic, RestrictionToFlat) {
  for (const auto& c : torus_cases()) {
    const auto rep = rep_of(c.spec, c.n);
    const auto full = fastest_shrinking_geodesic(rep, exact(c.v));
    const Mat k = geodesic_frame(full.direction);
    const auto flat = flat_shrinking_geodesic(rep, exact(c.v), k);
    EXPECT_LE((flat.direction - full.direction).norm(), 1e-6) << c.spec;
    EXPECT_NEAR(flat.rate, full.rate, 1e-6) << c.spec;
  }
}

TEST(ShrinkGeodesic, StableInputThrows) {
  const auto rep = rep_of("std*dual(std)", 2);
  EXPECT_THROW(fastest_shrinking_geodesic(rep, exact({1, 0, 0, -1})), StableInputError);
  EXPECT_THROW(fastest_shrinking_geodesic(rep, exact({0, 0, 0, 0})), DomainError);
}

TEST(GeodesicFrame, DiagonalisesDirection) {
  Rng rng = make_rng(58, 0, 0);
  for (int i = 0; i < 20; ++i) {
    const Mat p = gen::sym_traceless_unit(4, rng);
    const Mat k = geodesic_frame(p);
    const Mat d = k * p * k.transpose();
    EXPECT_LE((d - Mat(d.diagonal().asDiagonal())).norm(), 1e-10);
    for (int j = 0; j + 1 < 4; ++j) EXPECT_GE(d(j, j), d(j + 1, j + 1));
    EXPECT_NEAR(k.determinant(), 1, 1e-12);
  }
}

TEST(MomentMap, IsGradientAtOrigin) {
  Rng rng = make_rng(59, 0, 0);
  const auto rep = rep_of("sym(2,std)", 3);
  const RepVector v(gen::real_vector(rep.dim(), rng));
  const Mat mu = moment_map(rep, v);
  EXPECT_NEAR(mu.trace(), 0, 1e-10);
  for (int i = 0; i < 5; ++i) {
    const Mat x = gen::sym_traceless_unit(3, rng);
    const double h = 1e-5;
    const double fp = shrink_value(rep, v, GroupElement::trusted(linalg::expm_symmetric(x, h)));
    const double fm = shrink_value(rep, v, GroupElement::trusted(linalg::expm_symmetric(x, -h)));
    EXPECT_NEAR((fp - fm) / (2 * h), linalg::trace_inner(mu, x), 1e-6);
  }
}

TEST(TorusKempf, Examples) {
  const auto s2 = rep_of("std", 2);
  auto k = torus_kempf(s2, exact({1, 0}));
  EXPECT_EQ(k.tau.exps(), (std::vector<std::int64_t>{1, -1}));
  EXPECT_EQ(k.m, 1);
  EXPECT_EQ(k.norm_squared, 2);
  EXPECT_DOUBLE_EQ(k.ratio, 1 / std::sqrt(2.0));
  EXPECT_NEAR(k.ratio, brute_force_ratio(s2, {1, 0}, 5), 1e-15);

  const auto w = rep_of("wedge(2,std)", 3);
  k = torus_kempf(w, exact({1, 0, 0}));
  EXPECT_EQ(k.tau.exps(), (std::vector<std::int64_t>{1, 1, -2}));
  EXPECT_EQ(k.m, 2);
  EXPECT_NEAR(k.ratio, std::sqrt(2.0 / 3), 1e-15);
  EXPECT_NEAR(k.ratio, brute_force_ratio(w, {1, 0, 0}, 5), 1e-15);

  EXPECT_THROW(torus_kempf(s2, exact({1, 1})), StableInputError);
}

TEST(TorusKempf, MaximalOverBoundedCocharacters) {
  Rng rng = make_rng(60, 0, 0);
  int checked = 0;
  for (int n = 2; n <= 3; ++n)
    for (const auto& s : gen::small_specs()) {
      const auto rep = rep_of(s, n);
      if (rep.dim() > 30) continue;
      for (int t = 0; t < 4; ++t) {
        const auto v = gen::rational_vector(rep.dim(), rng, 0.2);
        KempfResult k;
        try {
          k = torus_kempf(rep, exact(v));
        } catch (const StableInputError&) {
          continue;
        }
        ++checked;
        EXPECT_GE(k.ratio, brute_force_ratio(rep, v, 5) - 1e-12) << s;
        EXPECT_EQ(k.m, oracle::valuation(rep, v, k.tau.exps()));
        EXPECT_NEAR(k.ratio, std::sqrt(to_double(cartan::form_inner(k.u, k.u))), 1e-12);
        EXPECT_TRUE(k.tau.primitive());
      }
    }
  EXPECT_GT(checked, 20);
}

TEST(IsUnstable, Examples) {
  const auto s2 = rep_of("std", 2);
  auto v = is_unstable(s2, exact({1, 0}));
  EXPECT_EQ(v.kind, VerdictKind::TorusCertified);
  EXPECT_EQ(v.frame_source, "identity");
  EXPECT_EQ(v.frame, Mat::Identity(2, 2));

  const auto adj = rep_of("std*dual(std)", 2);
  v = is_unstable(adj, exact({0, 1, 0, 0}));
  EXPECT_EQ(v.kind, VerdictKind::TorusCertified);
  EXPECT_NEAR(v.rate, std::sqrt(2.0), 1e-12);

  EXPECT_THROW(is_unstable(s2, exact({0, 0})), DomainError);
  EXPECT_EQ(to_string(VerdictKind::LikelyStable), "likely_stable");
}

TEST(IsUnstable, SumOfBasisVectorsInStdIsUnstable) {
  // Every nonzero vector of R^2 lies in one SL_2 orbit; rotating e1 + e2
  // onto the first axis and contracting it drives the norm to zero.
  const auto s2 = rep_of("std", 2);
  const auto v = exact({1, 1});
  const double c = 1 / std::sqrt(2.0);
  Mat r(2, 2);
  r << c, c, -c, c;
  for (double t : {1.0, 5.0, 20.0}) {
    const Mat g = Vec((Vec(2) << std::exp(-t), std::exp(t)).finished()).asDiagonal() * r;
    EXPECT_NEAR(shrink_value(s2, v, GroupElement(g)), std::log(std::sqrt(2.0)) - t, 1e-9);
  }
  const auto verdict = is_unstable(s2, v);
  EXPECT_EQ(verdict.kind, VerdictKind::TorusCertified);
  EXPECT_NEAR(verdict.rate, 1 / std::sqrt(2.0), 1e-12);
}

TEST(IsUnstable, StableControl) {
  const auto adj = rep_of("std*dual(std)", 2);
  const auto v = is_unstable(adj, exact({1, 0, 0, -1}));
  EXPECT_EQ(v.kind, VerdictKind::LikelyStable);
  EXPECT_LT(v.rate, 1e-3);
}

TEST(IsUnstable, CertifiedFramesAreTorusUnstable) {
  Rng rng = make_rng(61, 0, 0);
  for (const auto& s : gen::small_specs()) {
    const auto rep = rep_of(s, 3);
    const RepVector v(gen::real_vector(rep.dim(), rng));
    const auto verdict = is_unstable(rep, v);
    if (verdict.kind != VerdictKind::TorusCertified) continue;
    EXPECT_FALSE(flat_shrink_data(rep, v, verdict.frame, verdict.frame_source == "geodesic" ? 1e-6 : 1e-10).bounded_below);
  }
}
