#include "instab/symspace.hpp"

#include <cmath>
#include <limits>

#include "instab/errors.hpp"

namespace instab::symspace {

SymPoint::SymPoint(Mat p) {
  if (p.rows() != p.cols() || p.rows() == 0) throw DimensionError("SymPoint: matrix must be square");
  if (!p.allFinite()) throw DomainError("SymPoint: non-finite entry");
  const double scale = std::max(1.0, p.norm());
  if ((p - p.transpose()).norm() > 1e-10 * scale) throw DomainError("SymPoint: matrix is not symmetric");
  p = 0.5 * (p + p.transpose());
  Eigen::LLT<Mat> llt(p);
  if (llt.info() != Eigen::Success) throw DomainError("SymPoint: matrix is not positive definite");
  const double log_det = 2 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  if (std::fabs(std::expm1(log_det)) > 1e-9)
    throw DomainError("SymPoint: determinant is not 1");
  p_ = std::move(p);
}

SymPoint SymPoint::trusted(Mat p) {
  SymPoint x;
  x.p_ = 0.5 * (p + p.transpose());
  return x;
}

SymPoint SymPoint::origin(int n) { return trusted(Mat::Identity(n, n)); }

GroupElement SymPoint::lift() const {
  Eigen::LLT<Mat> llt(p_);
  if (llt.info() != Eigen::Success) throw DomainError("SymPoint::lift: not positive definite");
  return GroupElement::trusted(llt.matrixU());
}

GeodesicRay::GeodesicRay(GroupElement base, Mat direction) : base_(std::move(base)) {
  const int n = base_.n();
  if (direction.rows() != n || direction.cols() != n)
    throw DimensionError("GeodesicRay: direction has wrong size");
  if ((direction - direction.transpose()).norm() > 1e-10)
    throw DomainError("GeodesicRay: direction is not symmetric");
  if (std::fabs(direction.trace()) > 1e-10) throw DomainError("GeodesicRay: direction is not traceless");
  const double norm = linalg::trace_norm(direction);
  if (std::fabs(norm - 1.0) > 1e-9) throw DomainError("GeodesicRay: direction is not a unit vector");
  dir_ = 0.5 * (direction + direction.transpose()) / norm;
}

GeodesicRay GeodesicRay::from_origin(const cartan::RealVector& a) {
  if (a.is_zero()) throw DomainError("GeodesicRay::from_origin: zero direction");
  const int n = static_cast<int>(a.size());
  Vec d(n);
  for (int i = 0; i < n; ++i) d[i] = a[i];
  return GeodesicRay(GroupElement::identity(n), Mat(d.asDiagonal()) / d.norm());
}

SymPoint GeodesicRay::at(double t) const {
  const Mat e = linalg::expm_symmetric(dir_, 2 * t);
  return SymPoint::trusted(base_.matrix().transpose() * e * base_.matrix());
}

ParabolicData::ParabolicData(const cartan::RealVector& a, double tie_tol)
    : a_(a), order_(cartan::dominant_order(a)) {
  const int n = static_cast<int>(a.size());
  block_of_.assign(n, 0);
  for (int p = 0; p < n; ++p) {
    const int i = order_[p];
    if (p == 0 || a[order_[p - 1]] - a[i] > tie_tol) blocks_.emplace_back();
    blocks_.back().push_back(i);
    block_of_[i] = static_cast<int>(blocks_.size()) - 1;
  }
}

bool ParabolicData::contains(const Mat& h, double tol) const {
  const int n = static_cast<int>(a_.size());
  if (h.rows() != n || h.cols() != n) throw DimensionError("ParabolicData::contains: wrong size");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (block_of_[i] > block_of_[j] && std::fabs(h(i, j)) > tol * scale) return false;
  return true;
}

Mat ParabolicData::permutation_matrix() const {
  const int n = static_cast<int>(a_.size());
  Mat pi = Mat::Zero(n, n);
  for (int p = 0; p < n; ++p) pi(order_[p], p) = 1;
  return pi;
}

SymPoint project(const GroupElement& g) {
  const double det = g.matrix().determinant();
  if (std::fabs(det - 1.0) > 1e-9) throw DomainError("project: determinant is not 1");
  return SymPoint::trusted(g.matrix().transpose() * g.matrix());
}

double distance(const SymPoint& p, const SymPoint& q) {
  if (p.n() != q.n()) throw DimensionError("distance: size mismatch");
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(q.matrix(), p.matrix());
  if (es.info() != Eigen::Success) throw DomainError("distance: input is not positive definite");
  const Vec& mu = es.eigenvalues();
  if ((mu.array() <= 0).any()) throw DomainError("distance: input is not positive definite");
  return 0.5 * mu.array().log().matrix().norm();
}

double group_distance(const GroupElement& g, const GroupElement& h) {
  const auto ls = linalg::log_singular_values(h.matrix() * g.matrix().inverse());
  double acc = 0;
  for (double l : ls) acc += l * l;
  return std::sqrt(acc);
}

SymPoint geodesic_interpolate(const SymPoint& x, const SymPoint& y, double s) {
  if (x.n() != y.n()) throw DimensionError("geodesic_interpolate: size mismatch");
  // Whiten x to the origin, take the eigen-power of the image of y, move back.
  Eigen::LLT<Mat> llt(x.matrix());
  const Mat l = llt.matrixL();
  const Mat linv = l.inverse();
  const Mat z = linv * y.matrix() * linv.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (z + z.transpose()));
  const Vec pw = es.eigenvalues().array().log().unaryExpr([s](double v) { return std::exp(s * v); });
  const Mat zs = es.eigenvectors() * pw.asDiagonal() * es.eigenvectors().transpose();
  return SymPoint::trusted(l * zs * l.transpose());
}

CartanDecomposition cartan_decompose(const GroupElement& g) {
  const Mat& m = g.matrix();
  const double det = m.determinant();
  if (!(det > 0) || std::fabs(det - 1.0) > 1e-9)
    throw DomainError("cartan_decompose: determinant is not 1");
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  if (sv.minCoeff() <= 0) throw DomainError("cartan_decompose: singular input");
  Mat u = svd.matrixU(), v = svd.matrixV();
  if (u.determinant() < 0) {
    u.col(u.cols() - 1) *= -1;
    v.col(v.cols() - 1) *= -1;
  }
  const Vec la = linalg::remove_trace(Vec(sv.array().log()));
  return {u, cartan::RealVector(std::vector<double>(la.data(), la.data() + la.size())),
          v.transpose()};
}

IwasawaDecomposition iwasawa_decompose(const GroupElement& g, const ParabolicData& pdata) {
  const int n = g.n();
  if (static_cast<int>(pdata.direction().size()) != n)
    throw DimensionError("iwasawa_decompose: parabolic has wrong size");
  const double det = g.matrix().determinant();
  if (!(det > 0) || std::fabs(det - 1.0) > 1e-9)
    throw DomainError("iwasawa_decompose: determinant is not 1");
  const Mat pi = pdata.permutation_matrix();
  const Mat gs = pi.transpose() * g.matrix() * pi;
  Eigen::HouseholderQR<Mat> qr(gs);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) {
      q.col(i) *= -1;
      r.row(i) *= -1;
    }
  // Split R = D * U with D block diagonal (blocks in dominant order) and U
  // block unipotent, then polar-decompose each block of D.
  Mat d = Mat::Zero(n, n), o = Mat::Zero(n, n), sp = Mat::Zero(n, n);
  int start = 0;
  for (const auto& block : pdata.blocks()) {
    const int b = static_cast<int>(block.size());
    const Mat db = r.block(start, start, b, b);
    d.block(start, start, b, b) = db;
    Eigen::JacobiSVD<Mat> svd(db, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat w = svd.matrixU(), z = svd.matrixV();
    o.block(start, start, b, b) = w * z.transpose();
    sp.block(start, start, b, b) = z * svd.singularValues().asDiagonal() * z.transpose();
    start += b;
  }
  const Mat us = d.inverse() * r;
  const Mat ks = q * o;
  return {pi * ks * pi.transpose(), pi * sp * pi.transpose(), pi * us * pi.transpose()};
}

BusemannLimit busemann_limit(const GeodesicRay& ray, const GroupElement& x,
                             const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw DomainError("busemann_limit: empty grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("busemann_limit: grid must be increasing");
  if (x.n() != ray.base().n()) throw DimensionError("busemann_limit: size mismatch");
  // exp(t p) = Q diag(e^{t w}) Q^T, so d(pi(x), gamma(t)) is the norm of the
  // log singular values of diag(e^{t w}) Q^T b x^{-1}.
  const auto eig = linalg::symmetric_eigen(ray.direction());
  const Mat m = eig.vectors.transpose() * ray.base().matrix() * x.matrix().inverse();
  BusemannLimit out{0.0, {}, true, 0.0};
  for (double t : t_grid) {
    const auto ls = linalg::log_singular_values_scaled(m, eig.values, t);
    long double mean = 0;
    for (auto l : ls) mean += l;
    mean /= static_cast<long double>(ls.size());
    long double acc = 0;
    for (auto l : ls) acc += (l - mean) * (l - mean);
    out.sequence.push_back(static_cast<double>(std::sqrt(acc) - static_cast<long double>(t)));
  }
  for (std::size_t i = 1; i < out.sequence.size(); ++i)
    if (out.sequence[i] > out.sequence[i - 1] + 1e-9) out.monotone = false;
  out.value = out.sequence.back();
  if (out.sequence.size() >= 2)
    out.last_decrement = out.sequence[out.sequence.size() - 2] - out.sequence.back();
  return out;
}

BusemannLimit busemann_limit(const GeodesicRay& ray, const SymPoint& x,
                             const std::vector<double>& t_grid) {
  return busemann_limit(ray, x.lift(), t_grid);
}

double busemann_formula(const cartan::RealVector& a, const GroupElement& g) {
  if (a.is_zero()) throw DomainError("busemann_formula: zero direction");
  const int n = static_cast<int>(a.size());
  if (g.n() != n) throw DimensionError("busemann_formula: size mismatch");
  const auto order = cartan::dominant_order(a);
  const auto coeffs = cartan::chi_decompose(a, order);
  double acc = 0;
  for (int j = 1; j < n; ++j) {
    const double c = coeffs[j - 1];
    if (c == 0) continue;
    const auto [rep, vj] = reps::highest_weight_vector(n, j, order);
    acc += c * std::log(reps::rep_norm(rep, reps::act(rep, g, vj)) / reps::rep_norm(rep, vj));
  }
  return std::sqrt(cartan::form_inner(a, a)) * acc;
}

GeodesicRay busemann_ray(const cartan::RealVector& a) {
  if (a.is_zero()) throw DomainError("busemann_ray: zero direction");
  const int n = static_cast<int>(a.size());
  Vec d(n);
  for (int i = 0; i < n; ++i) d[i] = -a[i];
  return GeodesicRay(GroupElement::identity(n), Mat(d.asDiagonal()) / d.norm());
}

double modular_delta(const ParabolicData& pdata, const GroupElement& h) {
  if (!pdata.contains(h.matrix())) throw DomainError("modular_delta: element is not in the parabolic");
  const auto& blocks = pdata.blocks();
  std::vector<double> log_det;
  for (const auto& b : blocks) {
    Mat s(b.size(), b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) s(i, j) = h.matrix()(b[i], b[j]);
    const double det = s.determinant();
    if (det == 0) throw DomainError("modular_delta: singular Levi block");
    log_det.push_back(std::log(std::fabs(det)));
  }
  // Ad(h) on Hom(V_j, V_i), i < j, has determinant det(h_ii)^{n_j} det(h_jj)^{-n_i}.
  double acc = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      acc += static_cast<double>(blocks[j].size()) * log_det[i] -
             static_cast<double>(blocks[i].size()) * log_det[j];
  return std::exp(acc);
}

double highest_weight_character(int j, const cartan::SimpleSystem& order, const GroupElement& h) {
  const int n = h.n();
  if (order.n() != n) throw DimensionError("highest_weight_character: order has wrong size");
  if (j < 1 || j > n - 1) throw DomainError("highest_weight_character: j out of range");
  const Mat& m = h.matrix();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int p = j; p < n; ++p)
    for (int q = 0; q < j; ++q)
      if (std::fabs(m(order[p], order[q])) > 1e-9 * scale)
        throw DomainError("highest_weight_character: element is not in the parabolic");
  Mat s(j, j);
  for (int p = 0; p < j; ++p)
    for (int q = 0; q < j; ++q) s(p, q) = m(order[p], order[q]);
  return s.determinant();
}

}  // namespace instab::symspace
