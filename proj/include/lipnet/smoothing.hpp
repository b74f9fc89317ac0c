#pragma once

#include <cmath>

#include "lipnet/box.hpp"
#include "lipnet/types.hpp"

namespace lipnet {

/// Discrete standard mollifier: nodes of a tensor lattice strictly inside the
/// Euclidean ball of radius kappa, weighted by exp(1 / (|y|^2/kappa^2 - 1))
/// and renormalized to unit mass. Node set and weights are symmetric under
/// y -> -y.
class MollifierKernel {
 public:
  double kappa() const { return kappa_; }
  int dim() const { return static_cast<int>(offsets_.rows()); }
  Eigen::Index size() const { return weights_.size(); }
  /// d x q, one offset per column.
  const Matrix& offsets() const { return offsets_; }
  const Vector& weights() const { return weights_; }
  /// Distance between neighbouring quadrature nodes along an axis.
  double node_spacing() const { return node_spacing_; }

 private:
  friend MollifierKernel build_kernel(double kappa, int d, int quad_resolution);
  double kappa_ = 0.0;
  double node_spacing_ = 0.0;
  Matrix offsets_;
  Vector weights_;
};

/// Nodes sit at kappa * (2j - q - 1) / (q + 1), j = 1..q, on each axis, so the
/// spacing is 2 kappa / (q + 1). quad_resolution must be odd and >= 3.
MollifierKernel build_kernel(double kappa, int d, int quad_resolution);

/// sum_j w_j f(x - y_j).
template <typename F>
double mollify_eval(const F& f, const MollifierKernel& k, const Vector& x) {
  if (x.size() != k.dim()) throw ArgumentError("dimension mismatch in mollification");
  double acc = 0.0;
  Vector y(x.size());
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    y = x - k.offsets().col(j);
    const double v = f(y);
    if (!std::isfinite(v)) throw EvaluationError("non-finite function value under the mollifier");
    acc += k.weights()(j) * v;
  }
  return acc;
}

/// Central differences of mollify_eval with step h along each axis.
template <typename F>
Vector mollify_grad_eval(const F& f, const MollifierKernel& k, const Vector& x, double h) {
  if (!(h > 0.0)) throw ArgumentError("finite-difference step must be positive");
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    g(i) = (mollify_eval(f, k, xp) - mollify_eval(f, k, xm)) / (2.0 * h);
    xp(i) = xm(i) = x(i);
  }
  return g;
}

/// Measured lambda(kappa): max over a lattice on `box` and over coordinates of
/// |d(f * eta)/dx_i - df/dx_i|, both derivatives by central differences with
/// step h.
double gradient_deviation(const ScalarFunction& f, const MollifierKernel& k, const BoxDomain& box, int resolution,
                          double h);

}  // namespace lipnet
