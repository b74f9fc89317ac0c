#include "lipnet/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "lipnet/lattice.hpp"
#include "lipnet/smoothing.hpp"

namespace lipnet {

void validate_problem(const ApproximationProblem& prob) {
  if (!prob.target) throw ArgumentError("approximation problem has no target");
  if (!(prob.epsilon > 0.0) || !std::isfinite(prob.epsilon)) throw ArgumentError("epsilon must be positive");
  if (!(prob.L > 0.0) || !std::isfinite(prob.L)) throw ArgumentError("L must be positive");
  if (prob.norm.dim() != prob.K.dim()) throw ArgumentError("norm and domain dimensions differ");
  const double q = empirical_lipschitz(prob.target, prob.K, prob.norm, 2000, prob.seed);
  if (q > prob.L * (1.0 + 1e-6)) {
    throw ArgumentError("target is not " + format_double(prob.L) + "-Lipschitz on K: observed quotient " +
                        format_double(q));
  }
}

ShallowNet Canonicalization::restore(const ShallowNet& canonical) const {
  return net_scale_shift(net_precompose_affine(canonical, rescale.M, rescale.l), L, anchor_value);
}

Canonicalization canonicalize(const ApproximationProblem& prob) {
  const AffineRescale rescale = affine_rescale(prob.K);
  const double anchor = prob.target(prob.K.lower());
  const BoxDomain domain(rescale.inverse(prob.K.lower()), rescale.inverse(prob.K.upper()));
  const double L = prob.L;
  ScalarFunction f = prob.target;
  ScalarFunction fc = [f, rescale, anchor, L](const Vector& x) {
    return (f(rescale.forward(x)) - anchor) / (L * rescale.M);
  };
  return Canonicalization{rescale, L, anchor, prob.epsilon / (L * rescale.M), domain, std::move(fc)};
}

Tolerances choose_tolerances(double epsilon, int d, const NormSpec& norm) {
  if (!(epsilon > 0.0) || !(epsilon < 2.0)) throw ArgumentError("epsilon must lie in (0, 2)");
  if (norm.dim() != d) throw ArgumentError("norm dimension differs from d");
  Tolerances t;
  t.shrink = 1.0 - epsilon / 2.0;
  t.lip_budget = 1.0 - epsilon / 4.0;
  t.C = norm_constant_C(norm);
  t.c_conv = norm.euclidean_bound();
  t.delta = std::min(epsilon / 4.0, epsilon / (4.0 * d * t.C));
  t.kappa = epsilon / (4.0 * t.shrink * t.c_conv);
  return t;
}

namespace {

constexpr int kQuadResolution = 19;

double measure_sup_error(const ShallowNet& net, const ScalarFunction& f, const BoxDomain& K, int resolution) {
  const Lattice lat(K, resolution);
  double err = 0.0;
  for (Eigen::Index p = 0; p < lat.size(); ++p) {
    const Vector x = lat.point(p);
    err = std::max(err, std::abs(net(x) - f(x)));
  }
  return err;
}

/// Values of a function on a regular grid with integer addressing.
struct Grid {
  Lattice lattice;
  Vector values;
  Eigen::Index at(const std::vector<int>& idx) const { return lattice.flat_index(idx); }
};

}  // namespace

PipelineReport approximate(const ApproximationProblem& prob, int m_max, const PipelineOptions& options) {
  validate_problem(prob);
  if (m_max < 1) throw ArgumentError("m_max must be at least 1");
  const int d = prob.K.dim();
  const Canonicalization canon = canonicalize(prob);
  const double eps = canon.epsilon;
  const int fit_cells = options.fit_cells > 0 ? options.fit_cells : d == 1 ? 256 : 64;

  StageLog log;
  log.M = canon.rescale.M;
  log.canonical_epsilon = eps;
  log.C = norm_constant_C(prob.norm);
  log.c_conv = prob.norm.euclidean_bound();
  log.fit_resolution = fit_cells + 1;
  log.measure_resolution = options.measure_factor * fit_cells + 1;

  auto finish = [&](ShallowNet canonical_net) {
    PipelineReport rep{canon.restore(canonical_net), {}, 0.0, log, false, {}};
    rep.log.width = rep.net.width();
    CertifyOptions copt = options.certify;
    copt.seed = prob.seed;
    rep.certificate = certify(rep.net, prob.L, prob.K, prob.norm, copt);
    rep.sup_error = measure_sup_error(rep.net, prob.target, prob.K, log.measure_resolution);
    if (!rep.log.fit_converged) {
      rep.failure = "fit";
    } else if (rep.certificate.verdict != Verdict::Certified) {
      rep.failure = "certify";
    } else if (!(rep.sup_error <= prob.epsilon)) {
      rep.failure = "measure";
    }
    rep.success = rep.failure.empty();
    return rep;
  };

  // |f_c| <= 1 on the unit cube, so the zero net already meets the tolerance.
  if (eps >= 1.0) {
    log.trivial = true;
    log.fit_converged = true;
    return finish(ShallowNet::constant(d, 0.0, prob.activation));
  }

  const Tolerances tol = choose_tolerances(eps, d, prob.norm);
  log.shrink = options.shrink_enabled ? tol.shrink : 1.0;
  log.lip_budget = tol.lip_budget;
  log.delta = tol.delta;

  // Fine grid of step g on which kernel nodes, fit lattice and difference
  // stencils all land. Kernel node spacing is 2 kappa / (q + 1).
  const int k = static_cast<int>(std::ceil((kQuadResolution + 1) / (2.0 * fit_cells * tol.kappa * options.kappa_fraction)));
  const double g = 1.0 / (static_cast<double>(k) * fit_cells);
  const double kappa = g * (kQuadResolution + 1) / 2.0;
  log.kappa = kappa;
  const MollifierKernel kernel = build_kernel(kappa, d, kQuadResolution);
  const int reach = (kQuadResolution - 1) / 2 + 1;  // kernel half-width plus the difference step

  log.budget_shrink = options.shrink_enabled ? eps / 2.0 : 0.0;
  log.budget_mollify = log.shrink * tol.c_conv * kappa;
  log.budget_fit = tol.delta;
  log.budget_ok = log.budget_shrink + log.budget_mollify + log.budget_fit <= eps;

  // Extension of the shrunk target: read it at the nearest point of K_c unless
  // it is already Lipschitz everywhere. Coordinatewise clamping is 1-Lipschitz
  // for every supported norm, so the constant and the sup bound carry over, and
  // no fold forms along the boundary.
  const BoxDomain& kc = canon.domain;
  const double s = log.shrink;
  const int margin = reach + 2;
  const BoxDomain fine_box = BoxDomain::unit(d).enlarged(margin * g);
  const int fine_res = k * fit_cells + 2 * margin + 1;
  const Grid fine{Lattice(fine_box, fine_res),
                  sample_function([&](const Vector& x) { return s * canon.target(prob.global_target ? x : kc.clamp(x)); },
                                  fine_box, fine_res)
                      .values()};

  std::vector<std::vector<int>> node_steps(kernel.size(), std::vector<int>(d));
  for (Eigen::Index j = 0; j < kernel.size(); ++j) {
    for (int i = 0; i < d; ++i) node_steps[j][i] = static_cast<int>(std::lround(kernel.offsets()(i, j) / g));
  }
  auto mollified = [&](const std::vector<int>& idx) {
    double acc = 0.0;
    std::vector<int> at(d);
    for (Eigen::Index j = 0; j < kernel.size(); ++j) {
      for (int i = 0; i < d; ++i) at[i] = idx[i] - node_steps[j][i];
      acc += kernel.weights()(j) * fine.values(fine.at(at));
    }
    return acc;
  };

  const Lattice fit_lattice(BoxDomain::unit(d), fit_cells + 1);
  Vector fit_values(fit_lattice.size());
  Matrix fit_grads(fit_lattice.size(), d);
  for (Eigen::Index p = 0; p < fit_lattice.size(); ++p) {
    std::vector<int> idx = fit_lattice.multi_index(p);
    for (int& v : idx) v = margin + k * v;
    fit_values(p) = mollified(idx);
    for (int i = 0; i < d; ++i) {
      ++idx[i];
      const double up = mollified(idx);
      idx[i] -= 2;
      const double down = mollified(idx);
      ++idx[i];
      fit_grads(p, i) = (up - down) / (2.0 * g);
    }
  }

  const FitTarget target(SampledFunction(BoxDomain::unit(d), fit_cells + 1, fit_values, fit_grads), tol.delta,
                         tol.delta, prob.norm);
  FitOptions fopt = options.fit;
  fopt.activation = prob.activation;
  const FitReport fit = fit_adaptive(target, m_max, prob.seed, fopt);
  log.fit_converged = fit.converged;
  log.fit_value_err = fit.achieved_value_err;
  log.fit_grad_err = fit.achieved_grad_err;
  log.fit_iterations = fit.iterations;
  return finish(fit.net);
}

}  // namespace lipnet
