#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "instab/certificate.hpp"
#include "instab/errors.hpp"
#include "instab/instability.hpp"
#include "instab/random.hpp"
#include "instab/reps.hpp"
#include "instab/symspace.hpp"

namespace instab::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kBusemannStream = 0xb05e;

struct Common {
  int n = 0;
  std::string spec;
  std::string vector;
  std::string vector_file;
  std::uint64_t seed = 0x5eed;
  std::string mode = "auto";  // auto | exact | float
};

void add_common(CLI::App* app, Common& c, bool vector_needed) {
  app->add_option("--n", c.n, "rank: the group is SL_n")->check(CLI::Range(2, 64));
  app->add_option("--spec", c.spec, "representation, e.g. \"wedge(2,std)*std\"");
  if (vector_needed) {
    app->add_option("--vector", c.vector,
                    "JSON list, comma list, or a sum of basis labels such as e1+e2");
    app->add_option("--vector-file", c.vector_file, "file holding the vector (same syntax)");
    app->add_option("--mode", c.mode, "exact, float, or auto (exact unless a decimal appears)")
        ->check(CLI::IsMember({"auto", "exact", "float"}));
  }
  app->add_option("--seed", c.seed, "64-bit seed");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  const auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One entry of a vector: exact rational or a decimal converted to double.
struct Entry {
  std::optional<Rational> exact;
  double value = 0;
};

Entry parse_entry(const std::string& token, std::size_t offset) {
  const std::string t = trim(token);
  if (t.empty()) throw ParseError("empty vector entry", offset);
  try {
    Rational q = parse_rational(t);
    return {q, to_double(q)};
  } catch (const ParseError&) {
  }
  double x = 0;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(x))
    throw ParseError("bad vector entry '" + t + "'", offset);
  return {std::nullopt, x};
}

Entry entry_from_json(const json& j) {
  if (j.is_number_float()) return {std::nullopt, j.get<double>()};
  if (j.is_string()) return parse_entry(j.get<std::string>(), 0);
  Rational q = certificate::rational_from_json(j);
  return {q, to_double(q)};
}

std::vector<Entry> preset_entries(const std::string& text, const reps::Representation& rep) {
  std::vector<Entry> out(rep.dim(), Entry{Rational(0), 0.0});
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find('+', pos);
    const std::string tok = trim(text.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    const auto& labels = rep.basis_labels();
    int idx = static_cast<int>(std::find(labels.begin(), labels.end(), tok) - labels.begin());
    if (idx == rep.dim() && tok.size() > 1 && tok[0] == 'e') {
      int k = 0;
      const auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), k);
      if (ec == std::errc() && p == tok.data() + tok.size() && k >= 1 && k <= rep.dim()) idx = k - 1;
    }
    if (idx == rep.dim()) throw ParseError("unknown basis vector '" + tok + "'", pos);
    *out[idx].exact += 1;
    out[idx].value += 1;
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

reps::RepVector parse_vector(const Common& c, const reps::Representation& rep) {
  if (!c.vector.empty() && !c.vector_file.empty())
    throw Error("give either --vector or --vector-file, not both");
  if (c.vector.empty() && c.vector_file.empty()) throw Error("missing --vector");
  const std::string text = trim(c.vector.empty() ? read_file(c.vector_file) : c.vector);

  std::vector<Entry> entries;
  if (!text.empty() && text[0] == '[') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("vector JSON: ") + e.what(), e.byte == 0 ? 0 : e.byte - 1);
    }
    if (!j.is_array()) throw ParseError("vector JSON must be a list", 0);
    for (const auto& x : j) entries.push_back(entry_from_json(x));
  } else if (!text.empty() && (text[0] == 'e' || text.find_first_of("abcdfghijklmnopqrstuvwxyz(^") != std::string::npos)) {
    entries = preset_entries(text, rep);
  } else {
    std::size_t pos = 0;
    while (true) {
      const auto next = text.find(',', pos);
      entries.push_back(parse_entry(text.substr(pos, next == std::string::npos ? std::string::npos : next - pos), pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  }
  if (static_cast<int>(entries.size()) != rep.dim())
    throw DimensionError("vector has " + std::to_string(entries.size()) + " entries, representation dimension is " +
                         std::to_string(rep.dim()));

  const bool all_exact = std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.exact.has_value(); });
  if (c.mode == "exact" && !all_exact) throw ParseError("decimal entries are not allowed in exact mode", 0);
  if (c.mode == "float" || !all_exact) {
    reps::Vec v(rep.dim());
    for (int i = 0; i < rep.dim(); ++i) v[i] = entries[i].value;
    return reps::RepVector(v);
  }
  std::vector<Rational> q;
  for (const auto& e : entries) q.push_back(*e.exact);
  return reps::RepVector(std::move(q));
}

reps::Representation build(const Common& c) {
  if (c.n == 0) throw Error("missing --n");
  if (c.spec.empty()) throw Error("missing --spec");
  return reps::build_rep(reps::parse_spec(c.spec), c.n);
}

json weight_json(const cartan::Weight& w) {
  json out = json::array();
  for (const auto& x : w.coords().coords()) out.push_back(to_string(x));
  return out;
}

std::string weight_text(const cartan::Weight& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? ", " : "") + to_string(w.coords()[i]);
  return s + ")";
}

json matrix_json(const linalg::Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

int threads_or_default(int t) {
  if (t > 0) return t;
  return std::max(1u, std::thread::hardware_concurrency());
}

// --- subcommands -----------------------------------------------------------

int cmd_rep_info(const Common& c, bool as_json, std::ostream& out) {
  const auto rep = build(c);
  std::map<cartan::Weight, int> mult;
  for (const auto& w : rep.basis_weights()) ++mult[w];
  const auto fund = cartan::fundamental_weights(c.n, cartan::SimpleSystem::identity(c.n));

  json j;
  j["n"] = c.n;
  j["spec"] = rep.spec()->to_string();
  j["dim"] = rep.dim();
  json basis = json::array();
  for (int b = 0; b < rep.dim(); ++b)
    basis.push_back({{"index", b + 1},
                     {"label", rep.basis_labels()[b]},
                     {"weight", weight_json(rep.basis_weights()[b])},
                     {"gram", to_string(rep.gram()[b])}});
  j["basis"] = basis;
  json weights = json::array();
  for (const auto& [w, m] : mult) weights.push_back({{"weight", weight_json(w)}, {"multiplicity", m}});
  j["weights"] = weights;
  json fj = json::array();
  for (std::size_t i = 0; i < fund.size(); ++i)
    fj.push_back({{"j", i + 1}, {"weight", weight_json(fund[i])}});
  j["fundamental_weights"] = fj;

  if (as_json) {
    out << j.dump(2) << "\n";
    return kOk;
  }
  out << "representation " << rep.spec()->to_string() << " of SL_" << c.n << "\n";
  out << "dim " << rep.dim() << ", " << mult.size() << " distinct weights\n\n";
  out << "  #  label                 gram    weight\n";
  for (int b = 0; b < rep.dim(); ++b) {
    std::string label = rep.basis_labels()[b];
    if (label.size() < 20) label.resize(20, ' ');
    std::string gram = to_string(rep.gram()[b]);
    if (gram.size() < 6) gram.resize(6, ' ');
    out << (b + 1 < 10 ? "  " : b + 1 < 100 ? " " : "") << b + 1 << "  " << label << "  " << gram << "  "
        << weight_text(rep.basis_weights()[b]) << "\n";
  }
  out << "\nweight multiset\n";
  for (const auto& [w, m] : mult) out << "  " << weight_text(w) << "  x" << m << "\n";
  out << "\nfundamental weights of SL_" << c.n << "\n";
  for (std::size_t i = 0; i < fund.size(); ++i) out << "  chi_" << i + 1 << " = " << weight_text(fund[i]) << "\n";
  return kOk;
}

int cmd_classify(const Common& c, int random_frames, std::ostream& out) {
  const auto rep = build(c);
  const auto v = parse_vector(c, rep);
  if (v.is_zero()) throw DomainError("zero vector");
  instability::InstabilityBudget budget;
  budget.seed = c.seed;
  budget.random_frames = random_frames;
  budget.geodesic.seed = c.seed;
  const auto verdict = instability::is_unstable(rep, v, budget);
  json j;
  j["n"] = c.n;
  j["spec"] = rep.spec()->to_string();
  j["verdict"] = instability::to_string(verdict.kind);
  j["rate"] = verdict.rate;
  j["frames_tried"] = verdict.frames_tried;
  j["frame_source"] = verdict.frame_source.empty() ? json(nullptr) : json(verdict.frame_source);
  j["frame"] = verdict.kind == instability::VerdictKind::TorusCertified ? matrix_json(verdict.frame) : json(nullptr);
  out << j.dump(2) << "\n";
  switch (verdict.kind) {
    case instability::VerdictKind::TorusCertified: return kOk;
    case instability::VerdictKind::NumericallyUnstable: return kNumerical;
    case instability::VerdictKind::LikelyStable: return kLikelyStable;
  }
  return kError;
}

struct CertifyFlags {
  std::string out_path;
  int xi_frames = 1000;
  std::int64_t verify_samples = 0;
  double tol = 1e-6;
  double box = 5.0;
};

int cmd_certify(const Common& c, const CertifyFlags& f, std::ostream& out, std::ostream& err) {
  const auto rep = build(c);
  const auto v = parse_vector(c, rep);
  if (v.is_zero()) throw DomainError("zero vector");
  certificate::CertOptions opts;
  opts.seed = c.seed;
  opts.budget.seed = c.seed;
  opts.budget.geodesic.seed = c.seed;
  opts.xi_frames = f.xi_frames;
  opts.verify_samples = f.verify_samples;
  opts.verify_tol = f.tol;
  opts.verify_box = f.box;
  const auto cert = certificate::dominance_certificate(rep, v, opts);
  const std::string text = certificate::to_canonical_string(cert);
  if (f.out_path.empty() || f.out_path == "-") {
    out << text;
  } else {
    std::ofstream file(f.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot write " + f.out_path);
    file << text;
    if (!file) throw Error("write to " + f.out_path + " failed");
    err << "certificate written to " << f.out_path << "\n";
  }
  return kOk;
}

struct VerifyFlags {
  std::string cert_path;
  std::int64_t samples = 10000;
  double tol = 1e-6;
  double box = 5.0;
  int threads = 0;
};

int cmd_verify(const Common& c, const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  certificate::DominanceCert cert;
  reps::Representation rep;
  try {
    const std::string text = read_file(f.cert_path);
    cert = certificate::cert_from_json(json::parse(text));
    rep = reps::build_rep(reps::parse_spec(c.spec.empty() ? cert.spec : c.spec), c.n ? c.n : cert.n);
    if (rep.n() != cert.n) throw DimensionError("certificate n does not match --n");
    for (std::size_t j = 0; j < cert.hw_vectors.size(); ++j)
      if (cert.hw_vectors[j].is_zero()) throw DomainError("zero highest weight vector");
    if (!cert.frame.allFinite()) throw DomainError("frame has non-finite entries");
  } catch (const std::exception& e) {
    err << "malformed certificate: " << e.what() << "\n";
    return kMalformedCert;
  }
  reps::RepVector v = cert.v;
  if (!c.vector.empty() || !c.vector_file.empty()) v = parse_vector(c, rep);
  if (v.dim() != rep.dim()) {
    err << "malformed certificate: vector dimension " << v.dim() << " vs representation " << rep.dim() << "\n";
    return kMalformedCert;
  }
  const auto report = certificate::verify_dominance(cert, rep, v, f.samples,
                                                    certificate::Sampler{f.box, c.seed}, f.tol,
                                                    threads_or_default(f.threads));
  const bool empty = report.samples == 0;
  json j = {{"samples", report.samples},
            {"seed", report.seed},
            {"box", report.box},
            {"tol", report.tol},
            {"failures", report.failures},
            {"min_margin", empty ? json(nullptr) : json(report.min_margin)},
            {"mean_margin", empty ? json(nullptr) : json(report.mean_margin)},
            {"ray_checked", report.ray_checked},
            {"lhs_slope", report.lhs_slope},
            {"rhs_slope", report.rhs_slope},
            {"slope_difference", report.slope_difference},
            {"ray_ok", report.ray_ok},
            {"passed", report.passed()}};
  out << j.dump(2) << "\n";
  return report.passed() ? kOk : kCheckFailed;
}

struct BusemannFlags {
  std::string direction;
  int points = 100;
  double t_max = 1000;
  double box = 1.0;
  double tol = 1e-2;
  bool on_ray = false;
};

int cmd_busemann_check(const Common& c, const BusemannFlags& f, std::ostream& out) {
  if (c.n == 0) throw Error("missing --n");
  if (f.direction.empty()) throw Error("missing --direction");
  std::vector<double> a;
  {
    std::size_t pos = 0;
    while (true) {
      const auto next = f.direction.find(',', pos);
      a.push_back(parse_entry(f.direction.substr(pos, next == std::string::npos ? std::string::npos : next - pos), pos).value);
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  }
  if (static_cast<int>(a.size()) != c.n) throw DimensionError("direction needs n entries");
  if (std::all_of(a.begin(), a.end(), [](double x) { return x == 0; })) throw DomainError("zero direction");
  if (!(f.t_max > 0)) throw DomainError("--t must be positive");
  const cartan::RealVector dir(a);
  const auto ray = symspace::busemann_ray(dir);
  const std::vector<double> grid = {f.t_max / 16, f.t_max / 8, f.t_max / 4, f.t_max / 2, f.t_max};

  double max_dev = 0, sum_dev = 0;
  bool monotone = true;
  for (int i = 0; i < f.points; ++i) {
    Rng rng = make_rng(c.seed, kBusemannStream, static_cast<std::uint64_t>(i));
    linalg::Mat g;
    if (f.on_ray) {
      std::uniform_real_distribution<double> time(0.0, 10.0);
      g = linalg::expm_symmetric(ray.direction(), time(rng)) * ray.base().matrix();
    } else {
      std::uniform_real_distribution<double> coord(-f.box, f.box);
      linalg::Vec d(c.n);
      for (int k = 0; k < c.n; ++k) d[k] = coord(rng);
      d = linalg::remove_trace(d);
      const auto k1 = linalg::haar_special_orthogonal(c.n, rng);
      const auto k2 = linalg::haar_special_orthogonal(c.n, rng);
      g = k1 * linalg::Mat(d.array().exp().matrix().asDiagonal()) * k2;
    }
    const auto ge = reps::GroupElement::trusted(g);
    const auto lim = symspace::busemann_limit(ray, ge, grid);
    const double dev = std::fabs(lim.value - symspace::busemann_formula(dir, ge));
    max_dev = std::max(max_dev, dev);
    sum_dev += dev;
    monotone = monotone && lim.monotone;
  }
  const bool ok = max_dev <= f.tol;
  json j = {{"n", c.n},
            {"direction", a},
            {"points", f.points},
            {"on_ray", f.on_ray},
            {"t", f.t_max},
            {"max_deviation", max_dev},
            {"mean_deviation", f.points ? sum_dev / f.points : 0.0},
            {"monotone", monotone},
            {"tol", f.tol},
            {"passed", ok}};
  out << j.dump(2) << "\n";
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"instability certificates for SL_n representations", "instab"};
  app.require_subcommand(1);

  Common common;
  bool as_json = false;
  int random_frames = 64;
  CertifyFlags cf;
  VerifyFlags vf;
  BusemannFlags bf;

  auto* info = app.add_subcommand("rep-info", "dimension, weights and gram diagonal of a representation");
  add_common(info, common, false);
  info->add_flag("--json", as_json, "print JSON instead of the table");

  auto* classify = app.add_subcommand("classify", "certified unstable, numerically unstable or likely stable");
  add_common(classify, common, true);
  classify->add_option("--frames", random_frames, "random frames to try")->check(CLI::NonNegativeNumber);

  auto* certify = app.add_subcommand("certify", "write a dominance certificate");
  add_common(certify, common, true);
  certify->add_option("--out", cf.out_path, "output file (default stdout)");
  certify->add_option("--xi-frames", cf.xi_frames, "frames for the constant estimate")->check(CLI::PositiveNumber);
  certify->add_option("--samples", cf.verify_samples, "sampled check embedded in the certificate")
      ->check(CLI::NonNegativeNumber);
  certify->add_option("--tol", cf.tol, "margin tolerance");
  certify->add_option("--box", cf.box, "Cartan box half-width for sampling");

  auto* verify = app.add_subcommand("verify", "check a certificate on sampled group elements");
  add_common(verify, common, true);
  verify->add_option("cert", vf.cert_path, "certificate file")->required();
  verify->add_option("--samples", vf.samples, "number of sampled g")->check(CLI::NonNegativeNumber);
  verify->add_option("--tol", vf.tol, "margin tolerance");
  verify->add_option("--box", vf.box, "Cartan box half-width");
  verify->add_option("--threads", vf.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  auto* buse = app.add_subcommand("busemann-check", "limit versus closed-form Busemann values");
  add_common(buse, common, false);
  buse->add_option("--direction", bf.direction, "comma list, sums to zero");
  buse->add_option("--points", bf.points, "number of points")->check(CLI::NonNegativeNumber);
  buse->add_option("--t", bf.t_max, "largest ray time");
  buse->add_option("--box", bf.box, "Cartan box half-width for the points");
  buse->add_option("--tol", bf.tol, "allowed deviation");
  buse->add_flag("--on-ray", bf.on_ray, "sample points on the ray itself");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kError;
  }

  try {
    if (*info) return cmd_rep_info(common, as_json, out);
    if (*classify) return cmd_classify(common, random_frames, out);
    if (*certify) return cmd_certify(common, cf, out, err);
    if (*verify) return cmd_verify(common, vf, out, err);
    if (*buse) return cmd_busemann_check(common, bf, out);
  } catch (const StableInputError& e) {
    err << "stable input: " << e.what() << "\n";
    return kLikelyStable;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return std::string(e.what()) == "zero vector" ? kZeroVector : kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace instab::cli
