#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "lipnet/types.hpp"

namespace lipnet {

enum class NormKind { L1, L2, Linf };

std::string to_string(NormKind kind);
NormKind parse_norm_kind(std::string_view name);

/// A p-norm on R^d rescaled so that its maximum over the unit cube is 1,
/// i.e. ||x|| = d^(-1/p) * l_p(x). For d = 1 every kind is |x|.
class NormSpec {
 public:
  NormSpec(NormKind kind, int dim);

  NormKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double scale() const { return scale_; }
  /// Conjugate exponent's name, for reporting.
  NormKind dual_kind() const;

  template <typename Derived>
  double norm(const Eigen::MatrixBase<Derived>& x) const {
    check_dim(x.size());
    return scale_ * raw_norm(kind_, x);
  }

  /// sup { x.v : ||x|| <= 1 } = l_q(v) / scale.
  template <typename Derived>
  double dual(const Eigen::MatrixBase<Derived>& v) const {
    check_dim(v.size());
    return raw_norm(dual_kind(), v) / scale_;
  }

  /// A unit vector x (||x|| = 1) with x.v = dual(v). Zero v gives zero.
  Vector dual_maximizer(const Vector& v) const;

  /// Smallest C with (1/d)||x||_1 <= C ||x|| for all x.
  double c_constant() const;

  /// sup { ||y|| : |y|_2 <= 1 }, converting Euclidean radii into this norm.
  double euclidean_bound() const;

  bool operator==(const NormSpec& other) const = default;

 private:
  template <typename Derived>
  static double raw_norm(NormKind kind, const Eigen::MatrixBase<Derived>& x) {
    switch (kind) {
      case NormKind::L1:
        return x.template lpNorm<1>();
      case NormKind::L2:
        return x.norm();
      case NormKind::Linf:
        return x.size() == 0 ? 0.0 : x.template lpNorm<Eigen::Infinity>();
    }
    return 0.0;
  }

  void check_dim(Eigen::Index n) const;

  NormKind kind_;
  int dim_;
  double scale_;
};

template <typename Derived>
double norm_eval(const NormSpec& n, const Eigen::MatrixBase<Derived>& x) {
  return n.norm(x);
}

template <typename Derived>
double dual_norm_eval(const NormSpec& n, const Eigen::MatrixBase<Derived>& v) {
  return n.dual(v);
}

inline double norm_constant_C(const NormSpec& n) { return n.c_constant(); }

}  // namespace lipnet
