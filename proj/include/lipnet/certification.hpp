#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lipnet/box.hpp"
#include "lipnet/network.hpp"
#include "lipnet/norm.hpp"

namespace lipnet {

/// Relative slack used for every floating-point Lipschitz comparison.
inline constexpr double kLipschitzSlack = 1e-9;

enum class Verdict { Certified, Refuted, Inconclusive };

std::string to_string(Verdict v);
Verdict parse_verdict(std::string_view name);

struct LipschitzCertificate {
  double target_L = 0.0;
  double weight_bound = 0.0;
  double grid_sup = 0.0;
  double empirical_quotient = 0.0;
  /// Exact constant on the box for ReLU nets when region enumeration succeeded.
  std::optional<double> region_exact;
  /// The sound upper bound the verdict was decided on.
  double certified_bound = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/// Lip(phi) * sum_i |a_i| * dual(w_i); a global upper bound.
double weight_bound_lipschitz(const ShallowNet& net, const NormSpec& norm);

/// dual(grad f) maximized over a lattice on the box, then over `refine_rounds`
/// successively finer lattices around the running maximizer. A lower bound
/// on the true supremum.
double grid_gradient_sup(const ShallowNet& net, const BoxDomain& box, const NormSpec& norm, int resolution,
                         int refine_rounds);

/// Exact Lipschitz constant of a ReLU net on the open box, by enumerating the
/// activation patterns of regions meeting the box. d <= 2 only.
/// Throws CapacityError when more than region_cap patterns are found and
/// ArgumentError for other activations or d > 2.
double relu_exact_lipschitz(const ShallowNet& net, const BoxDomain& box, const NormSpec& norm, int region_cap);

/// Number of distinct activation patterns realized on the box (d <= 2).
std::size_t relu_region_count(const ShallowNet& net, const BoxDomain& box, int region_cap);

/// Largest difference quotient over random pairs, lattice-neighbour pairs and
/// short pairs aligned with a finite-difference gradient. A lower bound on the
/// Lipschitz constant on the box.
double empirical_lipschitz(const ScalarFunction& f, const BoxDomain& box, const NormSpec& norm, int pairs,
                           std::uint64_t seed);

struct CertifyOptions {
  /// Lattice points per axis for grid_gradient_sup; 0 picks 2001 (d = 1),
  /// 201 (d = 2) or 21 otherwise.
  int grid_resolution = 0;
  int refine_rounds = 2;
  int pairs = 20000;
  std::uint64_t seed = 0;
  int region_cap = 200000;
};

/// Verdict certified when the sound bound is <= L (1 + 1e-9), refuted when the
/// empirical quotient exceeds that, inconclusive otherwise.
LipschitzCertificate certify(const ShallowNet& net, double L, const BoxDomain& box, const NormSpec& norm,
                             const CertifyOptions& options = {});

}  // namespace lipnet
