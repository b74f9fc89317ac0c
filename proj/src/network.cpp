#include "lipnet/network.hpp"

#include <cmath>
#include <vector>

namespace lipnet {

std::string to_string(Activation act) {
  switch (act) {
    case Activation::Tanh:
      return "tanh";
    case Activation::Softplus:
      return "softplus";
    case Activation::Sigmoid:
      return "sigmoid";
    case Activation::Relu:
      return "relu";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "softplus") return Activation::Softplus;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "relu") return Activation::Relu;
  throw ArgumentError("unknown activation '" + std::string(name) + "'");
}

namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double ActivationSpec::value(double z) const {
  switch (tag) {
    case Activation::Tanh:
      return std::tanh(z);
    case Activation::Softplus:
      return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    case Activation::Sigmoid:
      return logistic(z);
    case Activation::Relu:
      return z > 0 ? z : 0.0;
  }
  return 0.0;
}

double ActivationSpec::derivative(double z) const {
  switch (tag) {
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Softplus:
      return logistic(z);
    case Activation::Sigmoid: {
      const double s = logistic(z);
      return s * (1.0 - s);
    }
    case Activation::Relu:
      return z > 0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double ActivationSpec::second_derivative(double z) const {
  switch (tag) {
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return -2.0 * t * (1.0 - t * t);
    }
    case Activation::Softplus: {
      const double s = logistic(z);
      return s * (1.0 - s);
    }
    case Activation::Sigmoid: {
      const double s = logistic(z);
      return s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case Activation::Relu:
      return 0.0;
  }
  return 0.0;
}

const ActivationSpec& activation_spec(Activation act) {
  static const ActivationSpec specs[] = {
      {Activation::Tanh, 1.0},
      {Activation::Softplus, 1.0},
      {Activation::Sigmoid, 0.25},
      {Activation::Relu, 1.0},
  };
  return specs[static_cast<int>(act)];
}

ShallowNet::ShallowNet(Activation act, double b, Vector a, Matrix W, Vector c)
    : act_(act), b_(b), a_(std::move(a)), W_(std::move(W)), c_(std::move(c)) {
  if (W_.rows() != a_.size() || c_.size() != a_.size()) {
    throw ArgumentError("network parameter shapes disagree: a, c and the rows of W must have length m");
  }
  if (W_.cols() < 1) throw ArgumentError("network input dimension must be positive");
  if (!std::isfinite(b_) || !a_.allFinite() || !W_.allFinite() || !c_.allFinite()) {
    throw ArgumentError("network parameters must be finite");
  }
}

ShallowNet ShallowNet::constant(int d, double b, Activation act) {
  return ShallowNet(act, b, Vector(0), Matrix(0, d), Vector(0));
}

void ShallowNet::check_input(const Vector& x) const {
  if (x.size() != W_.cols()) {
    throw ArgumentError("dimension mismatch: network on R^" + std::to_string(W_.cols()) +
                        " evaluated at a vector of length " + std::to_string(x.size()));
  }
}

double ShallowNet::operator()(const Vector& x) const {
  check_input(x);
  const ActivationSpec& phi = activation_spec(act_);
  double acc = b_;
  for (Eigen::Index i = 0; i < a_.size(); ++i) acc += a_(i) * phi.value(W_.row(i).dot(x) + c_(i));
  return acc;
}

Vector ShallowNet::gradient(const Vector& x) const {
  check_input(x);
  const ActivationSpec& phi = activation_spec(act_);
  Vector g = Vector::Zero(W_.cols());
  for (Eigen::Index i = 0; i < a_.size(); ++i) {
    const double s = a_(i) * phi.derivative(W_.row(i).dot(x) + c_(i));
    if (s != 0.0) g += s * W_.row(i).transpose();
  }
  return g;
}

bool ShallowNet::operator==(const ShallowNet& other) const {
  return act_ == other.act_ && b_ == other.b_ && a_.size() == other.a_.size() && W_.cols() == other.W_.cols() &&
         a_ == other.a_ && W_ == other.W_ && c_ == other.c_;
}

ShallowNet net_scale_shift(const ShallowNet& net, double alpha, double beta) {
  return ShallowNet(net.activation(), alpha * net.b() + beta, alpha * net.a(), net.W(), net.c());
}

ShallowNet net_precompose_affine(const ShallowNet& net, double M, const Vector& l) {
  if (M == 0.0 || !std::isfinite(M)) throw ArgumentError("affine precomposition needs a finite nonzero scale M");
  if (l.size() != net.dim()) throw ArgumentError("shift vector does not match the network input dimension");
  // w.((x - l)/M) + c = (w/M).x + (c - w.l/M)
  Matrix W = net.W() / M;
  Vector c = net.c() - W * l;
  return ShallowNet(net.activation(), M * net.b(), M * net.a(), std::move(W), std::move(c));
}

ShallowNet prune_zero_units(const ShallowNet& net) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < net.a().size(); ++i) {
    if (net.a()(i) != 0.0) keep.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  Vector a(m), c(m);
  Matrix W(m, net.dim());
  for (Eigen::Index k = 0; k < m; ++k) {
    a(k) = net.a()(keep[k]);
    c(k) = net.c()(keep[k]);
    W.row(k) = net.W().row(keep[k]);
  }
  return ShallowNet(net.activation(), net.b(), std::move(a), std::move(W), std::move(c));
}

ShallowNet merge_coincident_units(const ShallowNet& net, double tol) {
  if (net.activation() != Activation::Relu) return net;
  const Eigen::Index m = net.width();
  Vector a = net.a(), c = net.c();
  Matrix W = net.W();
  std::vector<Eigen::Index> reps;
  // sigma = +1: same half-plane, sigma = -1: complementary half-plane.
  auto same_line = [&](Eigen::Index i, Eigen::Index r, double sigma) {
    const double li = W.row(i).norm(), lr = W.row(r).norm();
    return (W.row(i) / li - sigma * W.row(r) / lr).cwiseAbs().maxCoeff() <= tol &&
           std::abs(c(i) / li - sigma * c(r) / lr) <= tol;
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    if (W.row(i).norm() == 0.0) continue;
    bool merged = false;
    for (Eigen::Index r : reps) {
      if (!same_line(i, r, 1.0)) continue;
      // relu(lambda z) = lambda relu(z) for lambda > 0
      a(r) += a(i) * W.row(i).norm() / W.row(r).norm();
      a(i) = 0.0;
      merged = true;
      break;
    }
    if (merged) continue;
    for (Eigen::Index r : reps) {
      if (!same_line(i, r, -1.0)) continue;
      const double lambda = W.row(i).norm() / W.row(r).norm();
      W.row(i) = -lambda * W.row(r);
      c(i) = -lambda * c(r);
      break;
    }
    reps.push_back(i);
  }
  return prune_zero_units(ShallowNet(net.activation(), net.b(), std::move(a), std::move(W), std::move(c)));
}

ShallowNet hat_net() {
  Vector a(3), c(3);
  a << 1.0, -2.0, 1.0;
  c << 0.0, 1.0, 2.0;
  return ShallowNet(Activation::Relu, 0.0, a, Matrix::Ones(3, 1), c);
}

}  // namespace lipnet
