#pragma once

#include <cstdint>

#include "lipnet/lattice.hpp"
#include "lipnet/network.hpp"
#include "lipnet/norm.hpp"

namespace lipnet {

/// Values and gradients to be matched in sup norm on a lattice.
struct FitTarget {
  FitTarget(SampledFunction samples, double value_tol, double grad_tol, NormSpec norm);

  SampledFunction samples;
  double value_tol;
  double grad_tol;
  NormSpec norm;
};

struct FitOptions {
  Activation activation = Activation::Relu;
  /// Weight of gradient residuals in the least-squares surrogate.
  double grad_weight = 1.0;
  /// Tikhonov weight on output weights, relative to the mean squared column norm.
  double ridge = 1e-10;
  /// Damped gradient-descent steps after the least-squares stage.
  int refine_iterations = 40;
  /// Whether refinement may move W and c, or only (b, a). ReLU kinks never
  /// move.
  bool refine_features = true;
  /// Share of hidden units (d >= 2) with uniformly random directions instead
  /// of lattice-aligned ones.
  double random_direction_fraction = 0.0;
};

struct FitReport {
  ShallowNet net;
  double achieved_value_err = 0.0;
  double achieved_grad_err = 0.0;
  int width_used = 0;
  bool converged = false;
  int iterations = 0;
};

/// Sup-norm residuals of a network against a sampled function with gradients.
struct Residuals {
  double value_err;
  double grad_err;
};
Residuals lattice_residuals(const ShallowNet& net, const SampledFunction& target);

/// max(value_err / value_tol, grad_err / grad_tol); converged iff <= 1.
double fit_score(const Residuals& r, const FitTarget& target);

/// Least squares over (b, a) for m seeded hidden units, followed by damped
/// gradient-descent refinement. Units for width m extend those for width m/2,
/// and the result is never worse (in fit_score) than the result at m/2.
FitReport fit_c1(const FitTarget& target, int m, std::uint64_t seed, const FitOptions& options = {});

/// fit_c1 over m = 1, 2, 4, ... <= m_max; first converged report, else the best one.
FitReport fit_adaptive(const FitTarget& target, int m_max, std::uint64_t seed, const FitOptions& options = {});

}  // namespace lipnet
