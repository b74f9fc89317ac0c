#include "lipnet/norm.hpp"

namespace lipnet {

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1:
      return "l1";
    case NormKind::L2:
      return "l2";
    case NormKind::Linf:
      return "linf";
  }
  return "?";
}

NormKind parse_norm_kind(std::string_view name) {
  if (name == "l1") return NormKind::L1;
  if (name == "l2") return NormKind::L2;
  if (name == "linf") return NormKind::Linf;
  throw ArgumentError("unknown norm '" + std::string(name) + "' (expected l1, l2 or linf)");
}

NormSpec::NormSpec(NormKind kind, int dim) : kind_(kind), dim_(dim) {
  if (dim < 1) throw ArgumentError("norm dimension must be positive");
  switch (kind) {
    case NormKind::L1:
      scale_ = 1.0 / dim;
      break;
    case NormKind::L2:
      scale_ = 1.0 / std::sqrt(static_cast<double>(dim));
      break;
    case NormKind::Linf:
      scale_ = 1.0;
      break;
  }
}

NormKind NormSpec::dual_kind() const {
  switch (kind_) {
    case NormKind::L1:
      return NormKind::Linf;
    case NormKind::L2:
      return NormKind::L2;
    case NormKind::Linf:
      return NormKind::L1;
  }
  return NormKind::L2;
}

void NormSpec::check_dim(Eigen::Index n) const {
  if (n != dim_) {
    throw ArgumentError("dimension mismatch: norm on R^" + std::to_string(dim_) +
                        " applied to a vector of length " + std::to_string(n));
  }
}

Vector NormSpec::dual_maximizer(const Vector& v) const {
  check_dim(v.size());
  Vector x = Vector::Zero(dim_);
  if (v.isZero(0.0)) return x;
  switch (kind_) {
    case NormKind::L1: {
      // Unit ball of d^{-1} l1 has vertices d*e_i; pick the largest |v_i|.
      Eigen::Index i = 0;
      v.cwiseAbs().maxCoeff(&i);
      x(i) = (v(i) >= 0 ? 1.0 : -1.0) / scale_;
      break;
    }
    case NormKind::L2:
      x = v / (v.norm() * scale_);
      break;
    case NormKind::Linf:
      for (int i = 0; i < dim_; ++i) x(i) = v(i) >= 0 ? 1.0 : -1.0;
      break;
  }
  return x;
}

double NormSpec::c_constant() const {
  // sup (1/d)|x|_1 / (scale |x|_p) = d^{-1} d^{1-1/p} / d^{-1/p} = 1, attained at the all-ones
  // vector. Returned exactly so downstream tolerances carry no rounding from it.
  return 1.0;
}

double NormSpec::euclidean_bound() const {
  switch (kind_) {
    case NormKind::L1:
      return scale_ * std::sqrt(static_cast<double>(dim_));
    case NormKind::L2:
      return scale_;
    case NormKind::Linf:
      return 1.0;
  }
  return 1.0;
}

}  // namespace lipnet
