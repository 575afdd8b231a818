#include "instab/reps.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "instab/errors.hpp"

namespace instab::reps {

using cartan::Weight;

// ---------------------------------------------------------------- elements

GroupElement::GroupElement(Mat entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw DimensionError("GroupElement: matrix must be square and non-empty");
  if (!m_.allFinite()) throw DomainError("GroupElement: non-finite entry");
  const double det = m_.determinant();
  if (std::fabs(det - 1.0) > 1e-9)
    throw DomainError("GroupElement: determinant " + std::to_string(det) + " is not 1");
}

GroupElement GroupElement::trusted(Mat entries) {
  GroupElement g;
  g.m_ = std::move(entries);
  return g;
}

GroupElement GroupElement::identity(int n) { return trusted(Mat::Identity(n, n)); }

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (n() != other.n()) throw DimensionError("GroupElement product: size mismatch");
  return trusted(m_ * other.m_);
}

GroupElement GroupElement::inverse() const { return trusted(m_.inverse()); }
GroupElement GroupElement::transpose() const { return trusted(m_.transpose()); }

RepVector::RepVector(Vec coords) : coords_(std::move(coords)) {
  if (!coords_.allFinite()) throw DomainError("RepVector: non-finite coordinate");
}

RepVector::RepVector(std::vector<Rational> exact) : coords_(static_cast<Eigen::Index>(exact.size())) {
  for (std::size_t i = 0; i < exact.size(); ++i)
    coords_[static_cast<Eigen::Index>(i)] = to_double(exact[i]);
  exact_ = std::move(exact);
}

RepVector RepVector::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw DimensionError("RepVector::basis: index out of range");
  std::vector<Rational> e(dim, Rational(0));
  e[index] = 1;
  return RepVector(std::move(e));
}

const std::vector<Rational>& RepVector::exact() const {
  if (!exact_) throw DomainError("RepVector has no exact coordinates");
  return *exact_;
}

bool RepVector::is_zero() const {
  if (exact_) {
    for (const auto& q : *exact_)
      if (q != 0) return false;
    return true;
  }
  return coords_.isZero(0.0);
}

RepVector RepVector::scaled(const Rational& factor) const {
  if (exact_) {
    std::vector<Rational> e = *exact_;
    for (auto& q : e) q *= factor;
    return RepVector(std::move(e));
  }
  return RepVector(Vec(coords_ * to_double(factor)));
}

RepVector RepVector::scaled(double factor) const { return RepVector(Vec(coords_ * factor)); }

// ---------------------------------------------------------------- building

namespace {

std::int64_t saturating_mul(std::int64_t a, std::int64_t b) {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  if (a != 0 && b > kMax / a) return kMax;
  return a * b;
}

// C(m, k) with saturation.
std::int64_t binomial(std::int64_t m, std::int64_t k) {
  if (k < 0 || k > m) return 0;
  k = std::min(k, m - k);
  BigInt acc = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    acc = acc * (m - k + i) / i;
    if (acc > std::numeric_limits<std::int64_t>::max()) return std::numeric_limits<std::int64_t>::max();
  }
  return acc.convert_to<std::int64_t>();
}

void strict_tuples(int m, int k, int start, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < m; ++i) {
    cur.push_back(i);
    strict_tuples(m, k, i + 1, cur, out);
    cur.pop_back();
  }
}

void weak_tuples(int m, int k, int start, std::vector<int>& cur,
                 std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < m; ++i) {
    cur.push_back(i);
    weak_tuples(m, k, i, cur, out);
    cur.pop_back();
  }
}

// k! / prod(multiplicity!) for a sorted tuple.
BigInt multinomial(const std::vector<int>& tuple) {
  BigInt num = 1, den = 1;
  std::size_t run = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    num *= static_cast<unsigned>(i + 1);
    run = (i > 0 && tuple[i] == tuple[i - 1]) ? run + 1 : 1;
    den *= static_cast<unsigned>(run);
  }
  return num / den;
}

double factorial_of_multiplicities(const std::vector<int>& tuple) {
  double den = 1;
  std::size_t run = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    run = (i > 0 && tuple[i] == tuple[i - 1]) ? run + 1 : 1;
    den *= static_cast<double>(run);
  }
  return den;
}

std::string join(const std::vector<std::string>& labels, const std::vector<int>& idx,
                 const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += sep;
    out += labels[idx[i]];
  }
  return out;
}

// Ryser's formula for the permanent.
double permanent(const Mat& a) {
  const int k = static_cast<int>(a.rows());
  if (k == 0) return 1.0;
  double total = 0;
  const unsigned long subsets = 1UL << k;
  for (unsigned long s = 1; s < subsets; ++s) {
    double prod = 1;
    for (int i = 0; i < k; ++i) {
      double row = 0;
      for (int j = 0; j < k; ++j)
        if (s & (1UL << j)) row += a(i, j);
      prod *= row;
    }
    const int bits = __builtin_popcountl(s);
    total += ((k - bits) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  return total;
}

Mat submatrix(const Mat& c, const std::vector<int>& rows, const std::vector<int>& cols) {
  Mat s(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = c(rows[i], cols[j]);
  return s;
}

}  // namespace

std::int64_t spec_dimension(const RepSpec& spec, int n) {
  switch (spec.kind()) {
    case RepSpec::Kind::Standard:
      return n;
    case RepSpec::Kind::Dual:
      return spec_dimension(*spec.child(), n);
    case RepSpec::Kind::Wedge:
      return binomial(spec_dimension(*spec.child(), n), spec.degree());
    case RepSpec::Kind::Sym: {
      const std::int64_t d = spec_dimension(*spec.child(), n);
      if (d == std::numeric_limits<std::int64_t>::max()) return d;
      return binomial(d + spec.degree() - 1, spec.degree());
    }
    case RepSpec::Kind::Tensor:
      return saturating_mul(spec_dimension(*spec.left(), n), spec_dimension(*spec.right(), n));
  }
  return 0;
}

Representation build_rep(const RepSpecPtr& spec, int n) { return build_rep(spec, n, 4096); }

Representation build_rep(const RepSpecPtr& spec, int n, std::int64_t max_dim) {
  if (!spec) throw DomainError("build_rep: null spec");
  if (n < 2) throw DomainError("build_rep: n must be at least 2");
  const auto validate = [n](const auto& self, const RepSpec& s) -> void {
    switch (s.kind()) {
      case RepSpec::Kind::Standard:
        return;
      case RepSpec::Kind::Wedge:
        self(self, *s.child());
        if (s.degree() <= 0) throw DomainError("wedge degree must be positive");
        if (s.degree() > spec_dimension(*s.child(), n))
          throw DomainError("wedge degree " + std::to_string(s.degree()) +
                            " exceeds the dimension " +
                            std::to_string(spec_dimension(*s.child(), n)) + " of " +
                            s.child()->to_string());
        return;
      case RepSpec::Kind::Sym:
        self(self, *s.child());
        if (s.degree() <= 0) throw DomainError("sym degree must be positive");
        return;
      case RepSpec::Kind::Dual:
        self(self, *s.child());
        return;
      case RepSpec::Kind::Tensor:
        self(self, *s.left());
        self(self, *s.right());
        return;
    }
  };
  validate(validate, *spec);
  const std::int64_t total = spec_dimension(*spec, n);
  if (total > max_dim)
    throw DomainError("representation dimension " + std::to_string(total) +
                      " exceeds the limit " + std::to_string(max_dim));

  Representation r;
  r.spec_ = spec;
  r.n_ = n;
  switch (spec->kind()) {
    case RepSpec::Kind::Standard: {
      for (int i = 0; i < n; ++i) {
        std::vector<std::int64_t> raw(n, 0);
        raw[i] = 1;
        r.weights_.push_back(Weight::from_raw(raw));
        r.gram_.emplace_back(1);
        r.labels_.push_back("e" + std::to_string(i + 1));
      }
      break;
    }
    case RepSpec::Kind::Dual: {
      auto c = std::make_shared<const Representation>(build_rep(spec->child(), n, max_dim));
      for (int i = 0; i < c->dim(); ++i) {
        r.weights_.push_back(-c->weights_[i]);
        r.gram_.push_back(1 / c->gram_[i]);
        r.labels_.push_back(spec->child()->kind() == RepSpec::Kind::Standard
                                ? "f" + std::to_string(i + 1)
                                : "(" + c->labels_[i] + ")*");
      }
      r.children_.push_back(std::move(c));
      break;
    }
    case RepSpec::Kind::Wedge:
    case RepSpec::Kind::Sym: {
      const bool wedge = spec->kind() == RepSpec::Kind::Wedge;
      auto c = std::make_shared<const Representation>(build_rep(spec->child(), n, max_dim));
      std::vector<int> cur;
      if (wedge)
        strict_tuples(c->dim(), spec->degree(), 0, cur, r.tuples_);
      else
        weak_tuples(c->dim(), spec->degree(), 0, cur, r.tuples_);
      const bool composite = spec->child()->kind() != RepSpec::Kind::Standard;
      std::vector<std::string> child_labels = c->labels_;
      if (composite)
        for (auto& l : child_labels) l = "(" + l + ")";
      for (const auto& t : r.tuples_) {
        Weight w = c->weights_[t[0]];
        Rational g = c->gram_[t[0]];
        for (std::size_t i = 1; i < t.size(); ++i) {
          w = w + c->weights_[t[i]];
          g *= c->gram_[t[i]];
        }
        if (!wedge) g *= Rational(multinomial(t));
        r.weights_.push_back(std::move(w));
        r.gram_.push_back(g);
        r.labels_.push_back(join(child_labels, t, wedge ? "^" : "."));
      }
      r.children_.push_back(std::move(c));
      break;
    }
    case RepSpec::Kind::Tensor: {
      auto a = std::make_shared<const Representation>(build_rep(spec->left(), n, max_dim));
      auto b = std::make_shared<const Representation>(build_rep(spec->right(), n, max_dim));
      const auto wrap = [](const RepSpecPtr& s, const std::string& l) {
        return s->kind() == RepSpec::Kind::Tensor ? "(" + l + ")" : l;
      };
      for (int i = 0; i < a->dim(); ++i)
        for (int j = 0; j < b->dim(); ++j) {
          r.weights_.push_back(a->weights_[i] + b->weights_[j]);
          r.gram_.push_back(a->gram_[i] * b->gram_[j]);
          r.labels_.push_back(wrap(spec->left(), a->labels_[i]) + "(x)" +
                              wrap(spec->right(), b->labels_[j]));
        }
      r.children_.push_back(std::move(a));
      r.children_.push_back(std::move(b));
      break;
    }
  }
  r.dim_ = static_cast<int>(r.weights_.size());
  r.gram_real_.resize(r.dim_);
  for (int i = 0; i < r.dim_; ++i) r.gram_real_[i] = to_double(r.gram_[i]);
  return r;
}

Mat Representation::matrix(const GroupElement& g) const {
  if (g.n() != n_) throw DimensionError("Representation::matrix: group element has wrong size");
  return matrix_impl(g.matrix(), g.matrix().inverse());
}

Mat Representation::matrix_impl(const Mat& g, const Mat& g_inv) const {
  switch (spec_->kind()) {
    case RepSpec::Kind::Standard:
      return g;
    case RepSpec::Kind::Dual:
      return children_[0]->matrix_impl(g_inv, g).transpose();
    case RepSpec::Kind::Wedge:
    case RepSpec::Kind::Sym: {
      const bool wedge = spec_->kind() == RepSpec::Kind::Wedge;
      const Mat c = children_[0]->matrix_impl(g, g_inv);
      Mat m(dim_, dim_);
      for (int b = 0; b < dim_; ++b)
        for (int a = 0; a < dim_; ++a) {
          const Mat s = submatrix(c, tuples_[b], tuples_[a]);
          m(b, a) = wedge ? s.determinant()
                          : permanent(s) / factorial_of_multiplicities(tuples_[a]);
        }
      return m;
    }
    case RepSpec::Kind::Tensor: {
      const Mat a = children_[0]->matrix_impl(g, g_inv);
      const Mat b = children_[1]->matrix_impl(g, g_inv);
      Mat m(dim_, dim_);
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
          m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      return m;
    }
  }
  return {};
}

// ---------------------------------------------------------------- queries

RepVector act(const Representation& rep, const GroupElement& g, const RepVector& v) {
  if (v.dim() != rep.dim())
    throw DimensionError("act: vector has dimension " + std::to_string(v.dim()) +
                         ", representation has " + std::to_string(rep.dim()));
  return RepVector(Vec(rep.matrix(g) * v.coords()));
}

bool WeightComponent::active() const noexcept { return std::isfinite(log_norm); }

double rep_norm(const Representation& rep, const RepVector& v) {
  if (v.dim() != rep.dim()) throw DimensionError("rep_norm: dimension mismatch");
  return std::sqrt((rep.gram_real().array() * v.coords().array().square()).sum());
}

std::vector<int> active_coordinates(const Representation& rep, const RepVector& v, double eps) {
  if (v.dim() != rep.dim()) throw DimensionError("active_coordinates: dimension mismatch");
  std::vector<int> out;
  if (v.is_exact()) {
    for (int i = 0; i < v.dim(); ++i)
      if (v.exact()[i] != 0) out.push_back(i);
    return out;
  }
  // A coordinate is active when its own weight component is; compute those
  // first so that tiny noise inside an active component is still kept.
  const double total = rep_norm(rep, v);
  std::map<Weight, double> comp;
  for (int i = 0; i < v.dim(); ++i)
    comp[rep.basis_weights()[i]] += rep.gram_real()[i] * v.coords()[i] * v.coords()[i];
  for (int i = 0; i < v.dim(); ++i)
    if (v.coords()[i] != 0 && std::sqrt(comp[rep.basis_weights()[i]]) > eps * total)
      out.push_back(i);
  return out;
}

std::vector<WeightComponent> weight_components(const Representation& rep, const RepVector& v,
                                               double eps) {
  if (v.dim() != rep.dim()) throw DimensionError("weight_components: dimension mismatch");
  if (v.is_zero()) throw DomainError("weight_components: zero vector");
  std::vector<Weight> order;
  std::map<Weight, std::pair<double, bool>> acc;  // squared norm, exactly nonzero
  for (int i = 0; i < v.dim(); ++i) {
    const Weight& w = rep.basis_weights()[i];
    auto [it, inserted] = acc.try_emplace(w, 0.0, false);
    if (inserted) order.push_back(w);
    it->second.first += rep.gram_real()[i] * v.coords()[i] * v.coords()[i];
    if (v.is_exact() && v.exact()[i] != 0) it->second.second = true;
  }
  const double total = rep_norm(rep, v);
  std::vector<WeightComponent> out;
  for (const auto& w : order) {
    const auto& [sq, nonzero] = acc.at(w);
    const double norm = std::sqrt(sq);
    const bool active = v.is_exact() ? nonzero : norm > eps * total;
    out.push_back({w, active ? std::log(norm) : -std::numeric_limits<double>::infinity()});
  }
  return out;
}

std::pair<Representation, RepVector> highest_weight_vector(int n, int j,
                                                           const cartan::SimpleSystem& order) {
  if (n < 2) throw DomainError("highest_weight_vector: n must be at least 2");
  if (j < 1 || j > n - 1) throw DomainError("highest_weight_vector: j out of range");
  if (order.n() != n) throw DimensionError("highest_weight_vector: order has wrong size");
  Representation rep = build_rep(RepSpec::wedge(j, RepSpec::standard()), n);
  std::vector<int> idx(order.permutation().begin(), order.permutation().begin() + j);
  // Sign of the sorting permutation: e_{s1} ^ ... ^ e_{sj} = sign * e_sorted.
  int inversions = 0;
  for (int a = 0; a < j; ++a)
    for (int b = a + 1; b < j; ++b)
      if (idx[a] > idx[b]) ++inversions;
  std::sort(idx.begin(), idx.end());
  // Lexicographic index of the sorted tuple among strictly increasing tuples.
  int index = 0;
  {
    int prev = -1;
    for (int p = 0; p < j; ++p) {
      for (int c = prev + 1; c < idx[p]; ++c) index += static_cast<int>(binomial(n - c - 1, j - p - 1));
      prev = idx[p];
    }
  }
  std::vector<Rational> e(rep.dim(), Rational(0));
  e[index] = inversions % 2 ? -1 : 1;
  return {std::move(rep), RepVector(std::move(e))};
}

std::pair<Representation, RepVector> highest_weight_vector(int n, int j) {
  return highest_weight_vector(n, j, cartan::SimpleSystem::identity(n));
}

std::int64_t m_value(const Representation& rep, const RepVector& v,
                     const cartan::Cocharacter& tau, double eps) {
  if (v.is_zero()) throw DomainError("m_value: zero vector");
  if (tau.is_zero()) throw DomainError("m_value: zero cocharacter");
  if (static_cast<int>(tau.size()) != rep.n()) throw DimensionError("m_value: cocharacter has wrong size");
  const auto active = active_coordinates(rep, v, eps);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (int i : active) best = std::min(best, to_int64(rep.basis_weights()[i].pair(tau.exps())));
  return best;
}

Mat lie_action(const Representation& rep, const Mat& x) {
  if (x.rows() != rep.n() || x.cols() != rep.n()) throw DimensionError("lie_action: wrong size");
  // Central differences of t -> rho(exp(tX)) with one Richardson step.
  const auto expm = [](const Mat& a) {
    Mat term = Mat::Identity(a.rows(), a.cols()), sum = term;
    for (int k = 1; k < 30; ++k) {
      term = term * a / k;
      sum += term;
      if (term.norm() < 1e-18 * sum.norm()) break;
    }
    return sum;
  };
  const auto diff = [&](double h) {
    const Mat e = expm(h * x), f = expm(-h * x);
    return Mat((rep.matrix_impl(e, f) - rep.matrix_impl(f, e)) / (2 * h));
  };
  const double h = 1e-3;
  return (4 * diff(h) - diff(2 * h)) / 3;
}

}  // namespace instab::reps
