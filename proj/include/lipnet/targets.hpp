#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lipnet/box.hpp"
#include "lipnet/norm.hpp"

namespace lipnet {

/// Names accepted by make_target.
const std::vector<std::string>& builtin_target_names();

/// L times a 1-Lipschitz reference function:
///   abs-shift           ||x - 0.5 * 1||
///   min2d               min(x_1, x_2), d = 2, 1-Lipschitz for the linf norm
///   sin-scaled          sin(pi * mean(x)) / pi
///   zero                0
///   randomized-mcshane  random_mcshane on the unit cube with the given seed
ScalarFunction make_target(std::string_view name, const NormSpec& norm, double L, std::uint64_t seed = 0);

/// A random L-Lipschitz function on R^d: `points` random nodes in the box
/// with values drawn inside the interval their predecessors allow, read
/// through a random convex mixture of the largest and smallest L-Lipschitz
/// extensions of those values.
ScalarFunction random_mcshane(double L, const BoxDomain& box, const NormSpec& norm, std::uint64_t seed,
                              int points = 12);

/// A random piecewise-linear L-Lipschitz function on a 1D box: `cells`
/// equal cells with slopes drawn from {-L, 0, L} and uniformly from [-L, L].
ScalarFunction random_walk_1d(double L, const BoxDomain& box, int cells, std::uint64_t seed);

}  // namespace lipnet
