#include <gtest/gtest.h>

#include <cmath>

#include "instab/certificate.hpp"
#include "instab/errors.hpp"
#include "support/generators.hpp"

using namespace instab;
using namespace instab::certificate;
using reps::GroupElement;
using reps::RepVector;
using nlohmann::json;

namespace {

reps::Representation rep_of(const std::string& s, int n) { return reps::build_rep(reps::parse_spec(s), n); }

RepVector exact(std::vector<Rational> v) { return RepVector(std::move(v)); }

CertOptions quick() {
  CertOptions o;
  o.xi_frames = 200;
  return o;
}

}  // namespace

TEST(Certificate, StdExample) {
  const auto rep = rep_of("std", 2);
  const auto cert = dominance_certificate(rep, exact({1, 0}), quick());
  EXPECT_EQ(cert.frame_source, "identity");
  ASSERT_EQ(cert.alphas.size(), 1u);
  EXPECT_EQ(cert.alphas[0], 1);
  EXPECT_EQ(cert.hw_vectors[0].exact(), (std::vector<Rational>{1, 0}));
  EXPECT_NEAR(cert.constant, -0.1, 1e-12);
  // The family is an identity up to c: margin is exactly -c.
  Rng rng = make_rng(71, 0, 0);
  for (int i = 0; i < 100; ++i)
    EXPECT_NEAR(certificate_margin(cert, rep, exact({1, 0}), GroupElement(gen::sl(2, rng, 3))), 0.1, 1e-9);
  ASSERT_TRUE(cert.kempf.has_value());
  EXPECT_NEAR(cert.kempf->ratio, cert.rate, 1e-12);
}

TEST(Certificate, WedgeExampleHasSingleAlpha) {
  const auto rep = rep_of("wedge(2,std)", 3);
  const auto v = exact({1, 0, 0});
  const auto cert = dominance_certificate(rep, v, quick());
  ASSERT_EQ(cert.alphas.size(), 2u);
  EXPECT_EQ(cert.alphas[0], 0);
  EXPECT_GT(cert.alphas[1], 0);
  Rng rng = make_rng(72, 0, 0);
  for (int i = 0; i < 1000; ++i)
    EXPECT_GE(certificate_margin(cert, rep, v, GroupElement(gen::sl(3, rng, 3))), -1e-9);
}

TEST(Certificate, AlphasAreDirectionDifferences) {
  const auto rep = rep_of("std*dual(std)", 3);
  const auto cert = dominance_certificate(rep, exact({0, 1, 0, 0, 0, 1, 0, 0, 0}), quick());
  for (int j = 0; j + 1 < 3; ++j) {
    EXPECT_EQ(cert.alphas[j], cert.direction[cert.order[j]] - cert.direction[cert.order[j + 1]]);
    EXPECT_GE(cert.alphas[j], 0);
  }
  EXPECT_EQ(cert.rate_squared, cartan::form_inner(cert.direction, cert.direction));
  ASSERT_TRUE(cert.kempf.has_value());
  EXPECT_LE(std::fabs(cert.rate - cert.kempf->ratio), 1e-6);
}

TEST(Certificate, ScalingShiftsConstantByLog2) {
  for (const auto& [spec, n, v] : std::vector<std::tuple<std::string, int, std::vector<Rational>>>{
           {"std", 2, {1, 0}}, {"sym(2,std)", 3, {1, 1, 0, 0, 0, 0}}, {"std", 3, {1, 1, 0}}}) {
    const auto rep = rep_of(spec, n);
    const auto a = dominance_certificate(rep, exact(v), quick());
    const auto b = dominance_certificate(rep, exact(v).scaled(Rational(2)), quick());
    EXPECT_EQ(a.direction, b.direction) << spec;
    EXPECT_EQ(a.order, b.order);
    EXPECT_EQ(a.alphas, b.alphas);
    EXPECT_NEAR(b.constant - a.constant, std::log(2.0), 1e-9) << spec;
  }
}

TEST(Certificate, PicksTheFastestFrame) {
  // The identity frame only sees rate 1/sqrt6; the moment frame sees sqrt(2/3).
  const auto rep = rep_of("std", 3);
  const auto cert = dominance_certificate(rep, exact({1, 1, 0}), quick());
  EXPECT_NEAR(cert.rate, std::sqrt(2.0 / 3), 1e-6);
  const auto report = verify_dominance(cert, rep, exact({1, 1, 0}), 2000, Sampler{}, 1e-6);
  EXPECT_EQ(report.failures, 0);
  EXPECT_TRUE(report.ray_ok);
}

TEST(Certificate, StableInputThrows) {
  const auto rep = rep_of("std*dual(std)", 2);
  EXPECT_THROW(dominance_certificate(rep, exact({1, 0, 0, -1}), quick()), StableInputError);
  EXPECT_THROW(dominance_certificate(rep, exact({0, 0, 0, 0}), quick()), DomainError);
}

TEST(Verify, IdentityCaseAndNegativeControl) {
  const auto rep = rep_of("std*dual(std)", 2);
  const auto v = exact({0, 1, 0, 0});
  auto cert = dominance_certificate(rep, v, quick());
  auto report = verify_dominance(cert, rep, v, 10000, Sampler{5.0, 3}, 1e-6);
  EXPECT_EQ(report.failures, 0);
  EXPECT_GE(report.min_margin, -1e-9);
  EXPECT_TRUE(report.ray_ok);
  EXPECT_TRUE(report.passed());

  for (auto& a : cert.alphas) a *= 2;
  report = verify_dominance(cert, rep, v, 1000, Sampler{5.0, 3}, 1e-6);
  EXPECT_GT(report.failures, 0);
  EXPECT_FALSE(report.ray_ok);
  EXPECT_FALSE(report.passed());
}

TEST(Verify, EmptyReport) {
  const auto rep = rep_of("std", 2);
  const auto cert = dominance_certificate(rep, exact({1, 0}), quick());
  const auto r = verify_dominance(cert, rep, exact({1, 0}), 0, Sampler{}, 1e-6);
  EXPECT_EQ(r.samples, 0);
  EXPECT_EQ(r.failures, 0);
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(to_json(DominanceCert{cert}).at("verification").at("min_margin").is_null());
}

TEST(Verify, IndependentOfThreadCount) {
  const auto rep = rep_of("sym(2,std)", 3);
  const auto v = exact({1, 1, 0, 0, 0, 0});
  const auto cert = dominance_certificate(rep, v, quick());
  const auto a = verify_dominance(cert, rep, v, 3000, Sampler{5.0, 9}, 1e-6, 1);
  const auto b = verify_dominance(cert, rep, v, 3000, Sampler{5.0, 9}, 1e-6, 4);
  EXPECT_EQ(a.min_margin, b.min_margin);
  EXPECT_EQ(a.mean_margin, b.mean_margin);
  EXPECT_EQ(a.failures, b.failures);
}

TEST(Verify, ShapeErrors) {
  const auto rep = rep_of("std", 2);
  const auto cert = dominance_certificate(rep, exact({1, 0}), quick());
  EXPECT_THROW(verify_dominance(cert, rep_of("std", 3), exact({1, 0, 0}), 10, Sampler{}), DimensionError);
  EXPECT_THROW(verify_dominance(cert, rep, exact({1, 0, 0}), 10, Sampler{}), DimensionError);
}

TEST(CertJson, RoundTripIsCanonical) {
  for (const auto& [spec, n, v] : std::vector<std::tuple<std::string, int, std::vector<Rational>>>{
           {"std", 2, {1, 0}}, {"wedge(2,std)", 3, {1, 0, 0}}, {"std", 3, {1, 1, 0}}}) {
    const auto rep = rep_of(spec, n);
    auto opts = quick();
    opts.verify_samples = 100;
    const auto cert = dominance_certificate(rep, exact(v), opts);
    const std::string text = to_canonical_string(cert);
    EXPECT_EQ(text.back(), '\n');
    const auto back = cert_from_json(json::parse(text));
    EXPECT_EQ(to_canonical_string(back), text);
    EXPECT_EQ(back.alphas, cert.alphas);
    EXPECT_EQ(back.direction, cert.direction);
    EXPECT_EQ(back.frame, cert.frame);
    const auto j = to_json(cert);
    EXPECT_EQ(j.at("schema"), kSchema);
    EXPECT_EQ(j.at("form"), "trace");
    EXPECT_EQ(j.at("mode"), "exact");
  }
}

TEST(CertJson, DeterministicForFixedSeed) {
  const auto rep = rep_of("sym(2,std)", 3);
  const auto v = exact({1, 1, 0, 0, 0, 0});
  EXPECT_EQ(to_canonical_string(dominance_certificate(rep, v, quick())),
            to_canonical_string(dominance_certificate(rep, v, quick())));
}

TEST(CertJson, Rationals) {
  EXPECT_EQ(rational_to_json(Rational(-3, 4)), (json{{"num", -3}, {"den", 4}}));
  const Rational big = Rational(BigInt("123456789012345678901234567890"), 7);
  const auto j = rational_to_json(big);
  EXPECT_TRUE(j.at("num").is_string());
  EXPECT_EQ(rational_from_json(j), big);
  EXPECT_EQ(rational_from_json(json(5)), 5);
  EXPECT_EQ(rational_from_json(json{{"num", "6"}, {"den", 4}}), Rational(3, 2));
  EXPECT_THROW(rational_from_json(json{{"num", 1}, {"den", 0}}), ParseError);
  EXPECT_THROW(rational_from_json(json{{"num", "1.5"}, {"den", 1}}), ParseError);
  EXPECT_THROW(rational_from_json(json("x")), ParseError);
}

TEST(CertJson, Vectors) {
  const auto e = vector_from_json(json::parse(R"([1, {"num": 1, "den": 2}, 0])"));
  EXPECT_TRUE(e.is_exact());
  EXPECT_EQ(e.exact()[1], Rational(1, 2));
  const auto f = vector_from_json(json::parse("[1, 0.5]"));
  EXPECT_FALSE(f.is_exact());
  EXPECT_EQ(vector_to_json(f), json::parse("[1.0, 0.5]"));
  EXPECT_THROW(vector_from_json(json::parse("[]")), ParseError);
}

TEST(CertJson, MalformedInputs) {
  const auto rep = rep_of("std", 2);
  const auto good = to_json(dominance_certificate(rep, exact({1, 0}), quick()));
  auto bad = good;
  bad["schema"] = "instab-cert/0";
  EXPECT_THROW(cert_from_json(bad), ParseError);
  bad = good;
  bad.erase("alphas");
  EXPECT_THROW(cert_from_json(bad), ParseError);
  bad = good;
  bad["alphas"] = json::array({json{{"num", -1}, {"den", 1}}});
  EXPECT_THROW(cert_from_json(bad), ParseError);
  bad = good;
  bad["frame"] = json::array({json::array({1.0})});
  EXPECT_THROW(cert_from_json(bad), ParseError);
  bad = good;
  bad["direction"] = json::array({1, 1});
  EXPECT_THROW(cert_from_json(bad), ParseError);
  bad = good;
  bad["order"] = json::array({1, 1});
  EXPECT_THROW(cert_from_json(bad), ParseError);
  bad = good;
  bad["n"] = "two";
  EXPECT_THROW(cert_from_json(bad), ParseError);
  EXPECT_THROW(cert_from_json(json::array()), ParseError);
}
