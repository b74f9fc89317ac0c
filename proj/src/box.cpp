#include "lipnet/box.hpp"

#include <cmath>
#include <string>

namespace lipnet {

BoxDomain::BoxDomain(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0) throw ArgumentError("box must have positive dimension");
  if (lower_.size() != upper_.size()) throw ArgumentError("box bounds differ in length");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_(i)) || !std::isfinite(upper_(i)) || !(lower_(i) < upper_(i))) {
      throw ArgumentError("degenerate box: axis " + std::to_string(i) + " has lower >= upper");
    }
  }
}

BoxDomain BoxDomain::unit(int dim) { return cube(dim, 0.0, 1.0); }

BoxDomain BoxDomain::cube(int dim, double lo, double hi) {
  if (dim < 1) throw ArgumentError("box must have positive dimension");
  return BoxDomain(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool BoxDomain::contains(const Vector& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  return ((x.array() >= lower_.array() - tol) && (x.array() <= upper_.array() + tol)).all();
}

BoxDomain BoxDomain::enlarged(double margin) const {
  return BoxDomain(lower_.array() - margin, upper_.array() + margin);
}

Vector BoxDomain::clamp(const Vector& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

bool BoxDomain::operator==(const BoxDomain& other) const {
  return lower_.size() == other.lower_.size() && lower_ == other.lower_ && upper_ == other.upper_;
}

AffineRescale affine_rescale(const BoxDomain& box) { return AffineRescale{box.max_edge(), box.lower()}; }

}  // namespace lipnet
