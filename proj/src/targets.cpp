#include "lipnet/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>

namespace lipnet {

const std::vector<std::string>& builtin_target_names() {
  static const std::vector<std::string> names{"abs-shift", "min2d", "sin-scaled", "zero", "randomized-mcshane"};
  return names;
}

ScalarFunction make_target(std::string_view name, const NormSpec& norm, double L, std::uint64_t seed) {
  const int d = norm.dim();
  if (name == "abs-shift") {
    return [norm, L](const Vector& x) { return L * norm.norm((x.array() - 0.5).matrix()); };
  }
  if (name == "min2d") {
    if (d != 2) throw ArgumentError("min2d needs d = 2");
    return [L](const Vector& x) { return L * std::min(x(0), x(1)); };
  }
  if (name == "sin-scaled") {
    return [L](const Vector& x) { return L * std::sin(std::numbers::pi * x.mean()) / std::numbers::pi; };
  }
  if (name == "zero") {
    return [](const Vector&) { return 0.0; };
  }
  if (name == "randomized-mcshane") {
    return random_mcshane(L, BoxDomain::unit(d), norm, seed);
  }
  throw ArgumentError("unknown target '" + std::string(name) + "'");
}

ScalarFunction random_mcshane(double L, const BoxDomain& box, const NormSpec& norm, std::uint64_t seed, int points) {
  if (points < 1) throw ArgumentError("random_mcshane needs at least one node");
  const int d = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto nodes = std::make_shared<Matrix>(d, points);
  auto values = std::make_shared<Vector>(points);
  for (int i = 0; i < points; ++i) {
    for (int k = 0; k < d; ++k) (*nodes)(k, i) = box.lower()(k) + uni(rng) * (box.upper()(k) - box.lower()(k));
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < i; ++j) {
      const double r = L * norm.norm(nodes->col(i) - nodes->col(j));
      lo = std::max(lo, (*values)(j) - r);
      hi = std::min(hi, (*values)(j) + r);
    }
    if (i == 0) {
      lo = -0.5 * L * box.max_edge();
      hi = -lo;
    }
    (*values)(i) = lo + uni(rng) * (hi - lo);
  }
  const double t = uni(rng);
  return [nodes, values, t, L, norm](const Vector& x) {
    double upper = std::numeric_limits<double>::infinity();
    double lower = -upper;
    for (Eigen::Index i = 0; i < values->size(); ++i) {
      const double r = L * norm.norm(x - nodes->col(i));
      upper = std::min(upper, (*values)(i) + r);
      lower = std::max(lower, (*values)(i) - r);
    }
    return t * upper + (1.0 - t) * lower;
  };
}

ScalarFunction random_walk_1d(double L, const BoxDomain& box, int cells, std::uint64_t seed) {
  if (box.dim() != 1) throw ArgumentError("random_walk_1d needs a 1D box");
  if (cells < 1) throw ArgumentError("random_walk_1d needs at least one cell");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double lo = box.lower()(0);
  const double h = (box.upper()(0) - lo) / cells;
  auto knots = std::make_shared<std::vector<double>>(cells + 1, 0.0);
  // Half the walks use extreme slopes only, the rest any slope in [-L, L].
  const bool extreme = uni(rng) < 0.5;
  for (int k = 0; k < cells; ++k) {
    const double slope = extreme ? L * (static_cast<int>(uni(rng) * 3.0) - 1) : L * (2.0 * uni(rng) - 1.0);
    (*knots)[k + 1] = (*knots)[k] + slope * h;
  }
  return [knots, lo, h, cells](const Vector& x) {
    const double u = std::clamp((x(0) - lo) / h, 0.0, static_cast<double>(cells));
    const int k = std::min(static_cast<int>(u), cells - 1);
    const double t = u - k;
    return (1.0 - t) * (*knots)[k] + t * (*knots)[k + 1];
  };
}

}  // namespace lipnet
