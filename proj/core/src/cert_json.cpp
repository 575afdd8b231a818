#include <cmath>
#include <limits>

#include "instab/certificate.hpp"
#include "instab/errors.hpp"

namespace instab::certificate {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError("certificate: " + what, 0); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) fail("expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

json opt_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number(const json& j, const char* what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  return j.get<double>();
}

double number_or_nan(const json& j, const char* what) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : number(j, what);
}

json int_or_string(const BigInt& x) {
  if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
    return x.convert_to<std::int64_t>();
  return x.str();
}

BigInt big_from_json(const json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto body = !s.empty() && s[0] == '-' ? s.substr(1) : s;
    if (body.empty() || body.find_first_not_of("0123456789") != std::string::npos)
      fail("bad integer '" + s + "'");
    return BigInt(s);
  }
  fail("expected an integer");
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) fail("frame must be an n x n array");
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != n) fail("frame must be an n x n array");
    for (int c = 0; c < n; ++c) m(i, c) = number(j[i][c], "frame entry");
  }
  return m;
}

json exact_to_json(const std::vector<Rational>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(rational_to_json(x));
  return out;
}

std::vector<Rational> exact_from_json(const json& j, std::size_t size, const char* what) {
  if (!j.is_array() || j.size() != size) fail(std::string(what) + " has the wrong length");
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(rational_from_json(x));
  return out;
}

}  // namespace

json rational_to_json(const Rational& q) {
  return {{"num", int_or_string(numerator(q))}, {"den", int_or_string(denominator(q))}};
}

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  const BigInt num = big_from_json(field(j, "num"));
  const BigInt den = big_from_json(field(j, "den"));
  if (den == 0) fail("zero denominator");
  return Rational(num, den);
}

json vector_to_json(const reps::RepVector& v) {
  if (v.is_exact()) return exact_to_json(v.exact());
  json out = json::array();
  for (int i = 0; i < v.dim(); ++i) out.push_back(v.coords()[i]);
  return out;
}

reps::RepVector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) fail("vector must be a non-empty array");
  bool floating = false;
  for (const auto& x : j) floating = floating || x.is_number_float();
  if (floating) {
    reps::Vec c(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) c[static_cast<int>(i)] = number(j[i], "vector entry");
    return reps::RepVector(c);
  }
  std::vector<Rational> e;
  for (const auto& x : j) e.push_back(rational_from_json(x));
  return reps::RepVector(std::move(e));
}

json to_json(const DominanceCert& cert) {
  json j;
  j["schema"] = kSchema;
  j["form"] = "trace";
  j["n"] = cert.n;
  j["spec"] = cert.spec;
  j["v"] = vector_to_json(cert.v);
  j["mode"] = cert.v.is_exact() ? "exact" : "float";
  j["frame"] = matrix_to_json(cert.frame);
  j["frame_source"] = cert.frame_source;
  json order = json::array();
  for (int p : cert.order.permutation()) order.push_back(p + 1);
  j["order"] = order;
  j["direction"] = exact_to_json(cert.direction.coords());
  j["rate"] = cert.rate;
  j["rate_squared"] = rational_to_json(cert.rate_squared);
  j["alphas"] = exact_to_json(cert.alphas);
  json hw = json::array();
  for (std::size_t i = 0; i < cert.hw_vectors.size(); ++i) {
    const int jj = static_cast<int>(i) + 1;
    hw.push_back({{"j", jj},
                  {"rep", reps::RepSpec::wedge(jj, reps::RepSpec::standard())->to_string()},
                  {"coords", vector_to_json(cert.hw_vectors[i])}});
  }
  j["hw_vectors"] = hw;
  j["constant"] = cert.constant;
  const auto& ce = cert.constant_estimate;
  j["constant_estimate"] = {{"method", ce.method},
                            {"frames", ce.frames},
                            {"excluded", ce.excluded},
                            {"xi_min", ce.xi_min},
                            {"safety_margin", ce.safety_margin}};
  if (cert.kempf)
    j["kempf"] = {{"tau", cert.kempf->tau.exps()},
                  {"m", cert.kempf->m},
                  {"norm_squared", cert.kempf->norm_squared},
                  {"ratio", cert.kempf->ratio}};
  else
    j["kempf"] = nullptr;
  j["geodesic_rate"] = cert.geodesic_rate ? json(*cert.geodesic_rate) : json(nullptr);
  const auto& r = cert.verification;
  const bool empty = r.samples == 0;
  j["verification"] = {{"samples", r.samples},
                       {"seed", r.seed},
                       {"box", r.box},
                       {"tol", r.tol},
                       {"failures", r.failures},
                       {"min_margin", empty ? json(nullptr) : opt_number(r.min_margin)},
                       {"mean_margin", empty ? json(nullptr) : opt_number(r.mean_margin)},
                       {"ray_checked", r.ray_checked},
                       {"lhs_slope", opt_number(r.lhs_slope)},
                       {"rhs_slope", opt_number(r.rhs_slope)},
                       {"slope_difference", opt_number(r.slope_difference)},
                       {"ray_ok", r.ray_ok},
                       {"passed", r.passed()}};
  return j;
}

DominanceCert cert_from_json(const json& j) {
  try {
    if (!j.is_object()) fail("expected an object");
    if (field(j, "schema") != kSchema) fail("unknown schema");
    if (j.contains("form") && j["form"] != "trace") fail("unsupported form");
    DominanceCert c;
    const auto& jn = field(j, "n");
    if (!jn.is_number_integer() || jn.get<std::int64_t>() < 2 || jn.get<std::int64_t>() > 64)
      fail("n must be an integer >= 2");
    c.n = jn.get<int>();
    const std::size_t n = static_cast<std::size_t>(c.n);
    if (!field(j, "spec").is_string()) fail("spec must be a string");
    c.spec = j["spec"].get<std::string>();
    c.v = vector_from_json(field(j, "v"));
    c.frame = matrix_from_json(field(j, "frame"), c.n);
    c.frame_source = j.value("frame_source", std::string("identity"));
    const auto& jo = field(j, "order");
    if (!jo.is_array() || jo.size() != n) fail("order has the wrong length");
    std::vector<int> perm;
    for (const auto& p : jo) {
      if (!p.is_number_integer()) fail("order entries must be integers");
      perm.push_back(p.get<int>() - 1);
    }
    try {
      c.order = cartan::SimpleSystem(perm);
    } catch (const Error& e) {
      fail(std::string("order: ") + e.what());
    }
    try {
      c.direction = cartan::ExactVector(exact_from_json(field(j, "direction"), n, "direction"));
    } catch (const DomainError& e) {
      fail(std::string("direction: ") + e.what());
    }
    c.rate = number(field(j, "rate"), "rate");
    c.rate_squared = j.contains("rate_squared") ? rational_from_json(j["rate_squared"])
                                                : cartan::form_inner(c.direction, c.direction);
    c.alphas = exact_from_json(field(j, "alphas"), n - 1, "alphas");
    for (const auto& a : c.alphas)
      if (a < 0) fail("alphas must be non-negative");
    const auto& hw = field(j, "hw_vectors");
    if (!hw.is_array() || hw.size() != n - 1) fail("hw_vectors must have n - 1 entries");
    for (std::size_t i = 0; i < hw.size(); ++i) {
      const auto& e = hw[i];
      if (field(e, "j") != static_cast<int>(i) + 1) fail("hw_vectors out of order");
      c.hw_vectors.push_back(vector_from_json(field(e, "coords")));
      const std::int64_t d = reps::spec_dimension(
          *reps::RepSpec::wedge(static_cast<int>(i) + 1, reps::RepSpec::standard()), c.n);
      if (c.hw_vectors.back().dim() != d) fail("hw vector has the wrong dimension");
    }
    c.constant = number(field(j, "constant"), "constant");
    if (j.contains("constant_estimate") && j["constant_estimate"].is_object()) {
      const auto& ce = j["constant_estimate"];
      c.constant_estimate.method = ce.value("method", std::string("xi-grid"));
      c.constant_estimate.frames = ce.value("frames", 0);
      c.constant_estimate.excluded = ce.value("excluded", 0);
      c.constant_estimate.xi_min = ce.value("xi_min", 0.0);
      c.constant_estimate.safety_margin = ce.value("safety_margin", 0.1);
    }
    if (j.contains("kempf") && !j["kempf"].is_null()) {
      const auto& k = j["kempf"];
      KempfRecord r;
      r.tau = cartan::Cocharacter(field(k, "tau").get<std::vector<std::int64_t>>());
      r.m = field(k, "m").get<std::int64_t>();
      r.norm_squared = field(k, "norm_squared").get<std::int64_t>();
      r.ratio = number(field(k, "ratio"), "ratio");
      c.kempf = r;
    }
    if (j.contains("geodesic_rate") && !j["geodesic_rate"].is_null())
      c.geodesic_rate = number(j["geodesic_rate"], "geodesic_rate");
    if (j.contains("verification") && j["verification"].is_object()) {
      const auto& r = j["verification"];
      auto& o = c.verification;
      o.samples = r.value("samples", std::int64_t{0});
      o.seed = r.value("seed", std::uint64_t{0});
      o.box = r.value("box", 5.0);
      o.tol = r.value("tol", 1e-6);
      o.failures = r.value("failures", 0);
      if (r.contains("min_margin")) o.min_margin = number_or_nan(r["min_margin"], "min_margin");
      if (r.contains("mean_margin")) o.mean_margin = number_or_nan(r["mean_margin"], "mean_margin");
      o.ray_checked = r.value("ray_checked", false);
      if (r.contains("lhs_slope")) o.lhs_slope = number_or_nan(r["lhs_slope"], "lhs_slope");
      if (r.contains("rhs_slope")) o.rhs_slope = number_or_nan(r["rhs_slope"], "rhs_slope");
      if (r.contains("slope_difference"))
        o.slope_difference = number_or_nan(r["slope_difference"], "slope_difference");
      o.ray_ok = r.value("ray_ok", true);
    }
    return c;
  } catch (const json::exception& e) {
    fail(e.what());
  } catch (const DimensionError& e) {
    fail(e.what());
  } catch (const DomainError& e) {
    fail(e.what());
  }
}

std::string to_canonical_string(const DominanceCert& cert) { return to_json(cert).dump(2) + "\n"; }

}  // namespace instab::certificate
