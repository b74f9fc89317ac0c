#pragma once

#include <string>
#include <string_view>

#include "lipnet/types.hpp"

namespace lipnet {

enum class Activation { Tanh, Softplus, Sigmoid, Relu };

std::string to_string(Activation act);
Activation parse_activation(std::string_view name);

/// Value, first and second derivative of an activation, plus a global bound
/// on |phi'|. For ReLU, phi'(0) = 0 and phi'' = 0.
struct ActivationSpec {
  Activation tag;
  double lipschitz;
  double value(double z) const;
  double derivative(double z) const;
  double second_derivative(double z) const;
  bool smooth() const { return tag != Activation::Relu; }
};

const ActivationSpec& activation_spec(Activation act);

/// f(x) = b + sum_i a_i phi(w_i . x + c_i), with w_i the rows of W (m x d).
/// Width m = 0 is the constant function b.
class ShallowNet {
 public:
  ShallowNet(Activation act, double b, Vector a, Matrix W, Vector c);
  /// The constant network x -> b on R^d.
  static ShallowNet constant(int d, double b, Activation act = Activation::Relu);

  Activation activation() const { return act_; }
  int dim() const { return static_cast<int>(W_.cols()); }
  int width() const { return static_cast<int>(a_.size()); }
  double b() const { return b_; }
  const Vector& a() const { return a_; }
  const Matrix& W() const { return W_; }
  const Vector& c() const { return c_; }

  double operator()(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  bool operator==(const ShallowNet& other) const;

 private:
  void check_input(const Vector& x) const;

  Activation act_;
  double b_;
  Vector a_;
  Matrix W_;
  Vector c_;
};

inline double net_eval(const ShallowNet& net, const Vector& x) { return net(x); }
inline Vector net_grad(const ShallowNet& net, const Vector& x) { return net.gradient(x); }

/// alpha * f + beta, same width.
ShallowNet net_scale_shift(const ShallowNet& net, double alpha, double beta);

/// x -> M f((x - l) / M), same width. Inverts the unit-cube rescaling
/// y = M x + l.
ShallowNet net_precompose_affine(const ShallowNet& net, double M, const Vector& l);

/// Drops units whose output weight is exactly zero.
ShallowNet prune_zero_units(const ShallowNet& net);

/// ReLU units whose kink hyperplanes agree within `tol` (unit normal and
/// offset) are put on one exact hyperplane: same-side units are merged,
/// opposite-side units are snapped onto it. Removes sliver regions between
/// nearly coincident kinks. Zero units are pruned; other activations pass through.
ShallowNet merge_coincident_units(const ShallowNet& net, double tol);

/// G(x) = relu(x) - 2 relu(x + 1) + relu(x + 2): zero outside [-2, 0], peak 1 at -1.
ShallowNet hat_net();

}  // namespace lipnet
