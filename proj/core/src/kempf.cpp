#include <cmath>

#include "instab/errors.hpp"
#include "instab/instability.hpp"

namespace instab::instability {

KempfResult torus_kempf(const reps::Representation& rep, const reps::RepVector& v) {
  return torus_kempf(rep, v, Mat::Identity(rep.n(), rep.n()));
}

KempfResult torus_kempf(const reps::Representation& rep, const reps::RepVector& v, const Mat& k,
                        double eps) {
  const FlatShrinkData data = flat_shrink_data(rep, v, k, eps);
  if (data.bounded_below)
    throw StableInputError("torus-stable: 0 lies in the hull of the active weights");
  KempfResult out;
  out.u = data.u;
  out.tau = cartan::Cocharacter::primitive_along(data.u);
  const reps::RepVector w = (k.isIdentity(0.0) && v.is_exact())
                                ? v
                                : reps::act(rep, reps::GroupElement::trusted(k), v);
  out.m = reps::m_value(rep, w, out.tau, eps);
  out.norm_squared = out.tau.norm_squared();
  out.ratio = static_cast<double>(out.m) / std::sqrt(static_cast<double>(out.norm_squared));
  return out;
}

}  // namespace instab::instability
