#pragma once

#include <cstdint>
#include <string>

#include "lipnet/box.hpp"
#include "lipnet/certification.hpp"
#include "lipnet/fitting.hpp"
#include "lipnet/network.hpp"
#include "lipnet/norm.hpp"

namespace lipnet {

/// Approximate an L-Lipschitz target on K within epsilon by a certified
/// L-Lipschitz network. The target only needs to be evaluable on the closure of K.
struct ApproximationProblem {
  ScalarFunction target;
  double L;
  BoxDomain K;
  double epsilon;
  NormSpec norm;
  Activation activation = Activation::Relu;
  std::uint64_t seed = 0;
  /// The target is L-Lipschitz on all of R^d and may be read outside K, so it
  /// serves as its own extension. Otherwise it is read at the nearest point of K.
  bool global_target = false;
};

/// Throws ArgumentError unless epsilon > 0, L > 0, dimensions agree and the
/// target's empirical Lipschitz quotient on K is <= L (1 + 1e-6).
void validate_problem(const ApproximationProblem& prob);

/// The reduction to L = 1, lower corner at the origin, value 0 there, and K
/// inside the unit cube: f_c(x) = (f(M x + l) - f(l)) / (L M).
struct Canonicalization {
  AffineRescale rescale;
  double L;
  double anchor_value;
  double epsilon;
  /// (K - l) / M, a sub-box of the unit cube with lower corner 0.
  BoxDomain domain;
  ScalarFunction target;

  /// Original-problem net from a canonical one: x -> L M g((x - l) / M) + f(l).
  ShallowNet restore(const ShallowNet& canonical) const;
  double forward_value(double original_value) const { return (original_value - anchor_value) / (L * rescale.M); }
  double restore_value(double canonical_value) const { return L * rescale.M * canonical_value + anchor_value; }
};

Canonicalization canonicalize(const ApproximationProblem& prob);

struct Tolerances {
  double shrink;
  double lip_budget;
  /// Largest mollifier radius with shrink * c_conv * kappa <= epsilon / 4.
  double kappa;
  double delta;
  double C;
  /// sup { ||y|| : |y|_2 <= 1 }.
  double c_conv;
};

/// Requires 0 < epsilon < 2.
Tolerances choose_tolerances(double epsilon, int d, const NormSpec& norm);

struct PipelineOptions {
  /// Fit lattice cells per axis on the canonical unit cube; 0 picks 256 for
  /// d = 1 and 64 otherwise.
  int fit_cells = 0;
  /// Share of the admissible kappa actually used.
  double kappa_fraction = 0.9;
  /// Multiply the canonical target by 1 - epsilon/2 before extending. Turning
  /// it off shows why the margin is needed.
  bool shrink_enabled = true;
  /// Measurement lattice is this many times finer than the fit lattice.
  int measure_factor = 4;
  FitOptions fit;
  CertifyOptions certify;
};

/// Parameters and outcomes of each stage, in canonical units unless noted.
struct StageLog {
  double M = 1.0;
  double canonical_epsilon = 0.0;
  double shrink = 1.0;
  double lip_budget = 1.0;
  double kappa = 0.0;
  double delta = 0.0;
  double C = 1.0;
  double c_conv = 1.0;
  int fit_resolution = 0;
  int measure_resolution = 0;
  /// Error budget: shrink + mollification + fit <= canonical epsilon.
  double budget_shrink = 0.0;
  double budget_mollify = 0.0;
  double budget_fit = 0.0;
  bool budget_ok = true;
  bool trivial = false;
  bool fit_converged = false;
  double fit_value_err = 0.0;
  double fit_grad_err = 0.0;
  int fit_iterations = 0;
  int width = 0;
};

struct PipelineReport {
  ShallowNet net;
  LipschitzCertificate certificate;
  /// Max |net - f| over the measurement lattice on K, original units.
  double sup_error = 0.0;
  StageLog log;
  bool success = false;
  /// Empty on success, otherwise the first failing stage.
  std::string failure;
};

/// Canonicalize, shrink, extend by nearest-point retraction onto K, mollify, fit (widths up to m_max), restore,
/// certify on the original K and L, and measure the sup error. Success needs
/// a converged fit, a certified verdict and sup_error <= epsilon.
PipelineReport approximate(const ApproximationProblem& prob, int m_max, const PipelineOptions& options = {});

}  // namespace lipnet
