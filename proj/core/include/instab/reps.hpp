#pragma once

// Representations of SL_n built from an AST (standard, dual, wedge, sym,
// tensor). Every representation lives inside a tensor power of the standard
// representation and its dual, so the induced inner product is SO(n)-invariant
// and weight spaces are orthogonal.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "instab/cartan.hpp"
#include "instab/linalg.hpp"
#include "instab/rational.hpp"

namespace instab::reps {

using linalg::Mat;
using linalg::Vec;

class RepSpec;
using RepSpecPtr = std::shared_ptr<const RepSpec>;

class RepSpec {
 public:
  enum class Kind { Standard, Dual, Wedge, Sym, Tensor };

  static RepSpecPtr standard();
  static RepSpecPtr dual(RepSpecPtr child);
  static RepSpecPtr wedge(int k, RepSpecPtr child);
  static RepSpecPtr sym(int k, RepSpecPtr child);
  static RepSpecPtr tensor(RepSpecPtr left, RepSpecPtr right);

  Kind kind() const noexcept { return kind_; }
  int degree() const noexcept { return degree_; }
  const RepSpecPtr& child() const noexcept { return left_; }
  const RepSpecPtr& left() const noexcept { return left_; }
  const RepSpecPtr& right() const noexcept { return right_; }

  /// Canonical DSL text; parse_spec(to_string()) reproduces the tree.
  std::string to_string() const;

 private:
  RepSpec(Kind kind, int degree, RepSpecPtr left, RepSpecPtr right)
      : kind_(kind), degree_(degree), left_(std::move(left)), right_(std::move(right)) {}

  Kind kind_;
  int degree_ = 0;
  RepSpecPtr left_, right_;
};

/// Grammar: rep := factor ('*' factor)* ; factor := 'std' | 'dual(' rep ')'
/// | 'wedge(' int ',' rep ')' | 'sym(' int ',' rep ')' | '(' rep ')'.
/// Throws ParseError carrying the offending position.
RepSpecPtr parse_spec(std::string_view text);

/// Element of SL_n(R).
class GroupElement {
 public:
  GroupElement() = default;
  /// Checks squareness and det = 1 within 1e-9.
  explicit GroupElement(Mat entries);
  /// No determinant check; for internally generated elements such as
  /// exp(s p) with large s, where det is only known analytically.
  static GroupElement trusted(Mat entries);
  static GroupElement identity(int n);

  int n() const noexcept { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const noexcept { return m_; }
  GroupElement operator*(const GroupElement& other) const;
  GroupElement inverse() const;
  GroupElement transpose() const;

 private:
  Mat m_;
};

/// Coordinates of a vector in a representation's basis. Exact coordinates
/// are kept when the input was rational; they drive exact zero tests.
class RepVector {
 public:
  RepVector() = default;
  explicit RepVector(Vec coords);
  explicit RepVector(std::vector<Rational> exact);

  static RepVector basis(int dim, int index);

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  const Vec& coords() const noexcept { return coords_; }
  bool is_exact() const noexcept { return exact_.has_value(); }
  const std::vector<Rational>& exact() const;
  bool is_zero() const;

  RepVector scaled(const Rational& factor) const;
  RepVector scaled(double factor) const;

 private:
  Vec coords_;
  std::optional<std::vector<Rational>> exact_;
};

class Representation {
 public:
  Representation() = default;

  const RepSpecPtr& spec() const noexcept { return spec_; }
  int n() const noexcept { return n_; }
  int dim() const noexcept { return dim_; }
  const std::vector<cartan::Weight>& basis_weights() const noexcept { return weights_; }
  /// Diagonal of the Gram matrix of the basis (positive rationals).
  const std::vector<Rational>& gram() const noexcept { return gram_; }
  const Vec& gram_real() const noexcept { return gram_real_; }
  const std::vector<std::string>& basis_labels() const noexcept { return labels_; }

  /// rho(g) as a dim x dim matrix in the monomial basis.
  Mat matrix(const GroupElement& g) const;

 private:
  friend Representation build_rep(const RepSpecPtr& spec, int n, std::int64_t max_dim);
  friend Mat lie_action(const Representation& rep, const Mat& x);
  Mat matrix_impl(const Mat& g, const Mat& g_inv) const;

  RepSpecPtr spec_;
  int n_ = 0;
  int dim_ = 0;
  std::vector<cartan::Weight> weights_;
  std::vector<Rational> gram_;
  Vec gram_real_;
  std::vector<std::string> labels_;
  std::vector<std::shared_ptr<const Representation>> children_;
  // Wedge: strictly increasing child indices; Sym: non-decreasing.
  std::vector<std::vector<int>> tuples_;
};

/// Dimension of the representation a spec describes, without building it.
/// Saturates at INT64_MAX.
std::int64_t spec_dimension(const RepSpec& spec, int n);

/// Builds the monomial basis in lexicographic order. Throws DomainError for
/// n < 2, k <= 0, a wedge degree above the child dimension, or a total
/// dimension above max_dim.
Representation build_rep(const RepSpecPtr& spec, int n, std::int64_t max_dim);
Representation build_rep(const RepSpecPtr& spec, int n);

RepVector act(const Representation& rep, const GroupElement& g, const RepVector& v);

struct WeightComponent {
  cartan::Weight weight;
  /// log of the gram-weighted component norm; -infinity when inactive.
  double log_norm;
  bool active() const noexcept;
};

/// One entry per distinct basis weight, in order of first appearance.
/// In exact mode a component is active iff it is exactly nonzero; otherwise
/// iff its norm exceeds eps * |v|.
std::vector<WeightComponent> weight_components(const Representation& rep,
                                               const RepVector& v,
                                               double eps = 1e-10);

/// Indices of basis coordinates treated as nonzero (same rule as above).
std::vector<int> active_coordinates(const Representation& rep, const RepVector& v,
                                    double eps = 1e-10);

double rep_norm(const Representation& rep, const RepVector& v);

/// e_{sigma(1)} ^ ... ^ e_{sigma(j)} in Wedge(j, Standard). Its weight is the
/// fundamental weight chi_j of `order`.
std::pair<Representation, RepVector> highest_weight_vector(
    int n, int j, const cartan::SimpleSystem& order);
std::pair<Representation, RepVector> highest_weight_vector(int n, int j);

/// Minimal tau-weight over the active coordinates of v (Kempf's m(v, tau)).
std::int64_t m_value(const Representation& rep, const RepVector& v,
                     const cartan::Cocharacter& tau, double eps = 1e-10);

/// The infinitesimal action of X in gl_n: d/dt rho(exp(tX)) at t = 0.
Mat lie_action(const Representation& rep, const Mat& x);

}  // namespace instab::reps
