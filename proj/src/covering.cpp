#include "lipnet/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lipnet/targets.hpp"

namespace lipnet {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t x = seed ^ (stream * 0x9e3779b97f4a7c15ULL) ^ (index + 1) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Depth-first enumeration of integer lattice values (units of the quantum)
/// in row-major node order.
class Enumerator {
 public:
  Enumerator(const Lattice& lat, double L, double quantum, const NormSpec& norm, std::size_t cap)
      : lat_(lat), L_(L), q_(quantum), norm_(norm), cap_(cap), k_(lat.size(), 0) {
    const int d = lat.dim();
    for (int axis = 0; axis < d; ++axis) {
      // Largest increment along an edge of this axis.
      Vector e = Vector::Zero(d);
      e(axis) = lat.spacing(axis);
      reach_.push_back(static_cast<long>(std::floor(L * norm.norm(e) / quantum * (1.0 + 1e-12))));
    }
  }

  std::vector<std::vector<long>> run() {
    if (lat_.size() == 1) return {{0}};
    k_[0] = 0;
    visit(1);
    return std::move(out_);
  }

 private:
  bool cell_ok(const std::vector<int>& idx) const {
    // Bilinear gradients are convex combinations of the four edge pairs.
    const std::vector<int> i00{idx[0] - 1, idx[1] - 1}, i01{idx[0] - 1, idx[1]}, i10{idx[0], idx[1] - 1};
    const double v00 = k_[lat_.flat_index(i00)], v01 = k_[lat_.flat_index(i01)], v10 = k_[lat_.flat_index(i10)];
    const double v11 = k_[lat_.flat_index(idx)];
    const double h0 = lat_.spacing(0), h1 = lat_.spacing(1);
    Vector g(2);
    for (double d0 : {v10 - v00, v11 - v01}) {
      for (double d1 : {v01 - v00, v11 - v10}) {
        g << d0 * q_ / h0, d1 * q_ / h1;
        if (norm_.dual(g) > L_ * (1.0 + 1e-12)) return false;
      }
    }
    return true;
  }

  void visit(Eigen::Index p) {
    if (p == lat_.size()) {
      if (out_.size() >= cap_) throw CapacityError("eps-net element count exceeds the cap", out_.size() + 1);
      out_.push_back(k_);
      return;
    }
    const std::vector<int> idx = lat_.multi_index(p);
    long lo = std::numeric_limits<long>::min(), hi = std::numeric_limits<long>::max();
    for (int axis = 0; axis < lat_.dim(); ++axis) {
      if (idx[axis] == 0) continue;
      std::vector<int> prev = idx;
      --prev[axis];
      const long base = k_[lat_.flat_index(prev)];
      lo = std::max(lo, base - reach_[axis]);
      hi = std::min(hi, base + reach_[axis]);
    }
    const bool check_cell = lat_.dim() == 2 && idx[0] > 0 && idx[1] > 0;
    for (long v = lo; v <= hi; ++v) {
      k_[p] = v;
      if (check_cell && !cell_ok(idx)) continue;
      visit(p + 1);
    }
  }

  const Lattice& lat_;
  double L_;
  double q_;
  NormSpec norm_;
  std::size_t cap_;
  std::vector<long> k_;
  std::vector<long> reach_;
  std::vector<std::vector<long>> out_;
};

/// Element values on a measurement lattice, one row per element.
struct ElementTable {
  Lattice lattice;
  Matrix values;
};

ElementTable tabulate(const EpsNet& net, int resolution) {
  ElementTable t{Lattice(net.hat_box, resolution), Matrix(static_cast<Eigen::Index>(net.elements.size()), 0)};
  t.values.resize(static_cast<Eigen::Index>(net.elements.size()), t.lattice.size());
  for (Eigen::Index p = 0; p < t.lattice.size(); ++p) {
    const Vector x = t.lattice.point(p);
    for (std::size_t e = 0; e < net.elements.size(); ++e) {
      t.values(static_cast<Eigen::Index>(e), p) = net.elements[e].interpolate(x);
    }
  }
  return t;
}

std::pair<std::size_t, double> nearest_in_table(const ElementTable& t, const Eigen::RowVectorXd& g) {
  std::size_t best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index e = 0; e < t.values.rows(); ++e) {
    const double de = (t.values.row(e) - g).cwiseAbs().maxCoeff();
    if (de < dist) {
      dist = de;
      best = static_cast<std::size_t>(e);
    }
  }
  return {best, dist};
}

Eigen::RowVectorXd anchored_values(const ScalarFunction& f, const Lattice& lat, const Vector& anchor) {
  const double f0 = f(anchor);
  Eigen::RowVectorXd g(lat.size());
  for (Eigen::Index p = 0; p < lat.size(); ++p) g(p) = f(lat.point(p)) - f0;
  return g;
}

int measure_resolution(const EpsNet& net) { return std::max(8 * net.cells, 16) + 1; }

ScalarFunction random_trial(const EpsNet& net, std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t s = derive_seed(seed, 1, index);
  if (net.hat_box.dim() == 1 && index % 2 == 0) {
    return random_walk_1d(net.L, net.hat_box, std::max(8 * net.cells, 16), s);
  }
  return random_mcshane(net.L, net.hat_box, net.norm, s);
}

}  // namespace

EpsNet enumerate_eps_net(double L, const BoxDomain& hat_box, int cells, double quantum, const NormSpec& norm,
                         double epsilon, std::size_t cap) {
  const int d = hat_box.dim();
  if (d != 1 && d != 2) throw ArgumentError("eps-nets are built for d = 1 or 2 only");
  if (norm.dim() != d) throw ArgumentError("norm and box dimensions differ");
  if (!(L > 0.0)) throw ArgumentError("L must be positive");
  EpsNet net{{}, epsilon, L, hat_box, norm, cells, 0.0, quantum};
  if (cells == 0) {
    net.elements.emplace_back(hat_box, 2, Vector::Zero(d == 1 ? 2 : 4));
    return net;
  }
  if (!(quantum > 0.0)) throw ArgumentError("quantum must be positive");
  const Lattice lat(hat_box, cells + 1);
  net.spacing = lat.spacing().maxCoeff();
  for (const auto& k : Enumerator(lat, L, quantum, norm, cap).run()) {
    Vector v(lat.size());
    for (Eigen::Index p = 0; p < lat.size(); ++p) v(p) = static_cast<double>(k[p]) * quantum;
    net.elements.emplace_back(hat_box, cells + 1, std::move(v));
  }
  return net;
}

EpsNet build_eps_net(double L, const BoxDomain& hat_box, double epsilon, const NormSpec& norm, std::size_t cap) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(L > 0.0)) throw ArgumentError("L must be positive");
  const int d = hat_box.dim();
  const double diam = norm.norm(hat_box.edges());
  if (epsilon >= 2.0 * L * diam) return enumerate_eps_net(L, hat_box, 0, 0.0, norm, epsilon, cap);
  const double h_max = d == 1 ? epsilon / (2.0 * L) : epsilon / (2.5 * L);
  const int cells = static_cast<int>(std::ceil(hat_box.max_edge() / h_max * (1.0 - 1e-12)));
  const double h = hat_box.max_edge() / cells;
  const double quantum = d == 1 ? L * h : 0.5 * L * h;
  return enumerate_eps_net(L, hat_box, cells, quantum, norm, epsilon, cap);
}

std::pair<std::size_t, double> nearest_element(const EpsNet& net, const ScalarFunction& f, int resolution) {
  const ElementTable t = tabulate(net, resolution);
  return nearest_in_table(t, anchored_values(f, t.lattice, net.hat_box.lower()));
}

double covering_radius_check(const EpsNet& net, int trials, std::uint64_t seed) {
  if (trials < 1) throw ArgumentError("covering radius check needs at least one trial");
  const ElementTable t = tabulate(net, measure_resolution(net));
  double radius = 0.0;
  for (int k = 0; k < trials; ++k) {
    const ScalarFunction f = random_trial(net, seed, static_cast<std::uint64_t>(k));
    radius = std::max(radius, nearest_in_table(t, anchored_values(f, t.lattice, net.hat_box.lower())).second);
  }
  return radius;
}

UniformWidthResult uniform_width_experiment(double L, const BoxDomain& K, const BoxDomain& hat_box, double epsilon,
                                            const NormSpec& norm, Activation activation, std::uint64_t seed,
                                            const UniformWidthOptions& options) {
  if (!hat_box.contains(K.lower()) || !hat_box.contains(K.upper())) {
    throw ArgumentError("the net's box must contain K");
  }
  UniformWidthResult result{build_eps_net(L, hat_box, epsilon, norm, options.cap), 0.0, {}, {}, 0, false, {}};
  result.covering_radius = covering_radius_check(result.net, options.radius_trials, derive_seed(seed, 2, 0));
  for (std::size_t i = 0; i < result.net.elements.size(); ++i) {
    const SampledFunction& element = result.net.elements[i];
    ApproximationProblem prob{[&element](const Vector& x) { return element.interpolate(x); },
                              L, K, epsilon / 2.0, norm, activation, seed};
    const PipelineReport rep = approximate(prob, options.m_max, options.pipeline);
    result.runs.push_back({i, rep.net.width(), rep.sup_error, rep.success, rep.failure});
    result.element_nets.push_back(rep.net);
    if (!rep.success) {
      result.failure = "element " + std::to_string(i) + ": " + rep.failure;
      return result;
    }
    result.m_uniform = std::max(result.m_uniform, rep.net.width());
  }
  if (result.covering_radius > epsilon / 2.0 * (1.0 + kLipschitzSlack)) {
    result.failure = "covering radius " + format_double(result.covering_radius) + " exceeds epsilon/2";
    return result;
  }
  result.success = true;
  return result;
}

ValidationOutcome validate_uniform_width(const UniformWidthResult& result, const BoxDomain& K, int count,
                                         std::uint64_t seed) {
  const EpsNet& net = result.net;
  if (result.element_nets.size() != net.elements.size()) {
    throw ArgumentError("validation needs a network for every element");
  }
  const ElementTable t = tabulate(net, measure_resolution(net));
  const Lattice probe(K, K.dim() == 1 ? 1001 : 101);
  ValidationOutcome out;
  for (int v = 0; v < count; ++v) {
    const ScalarFunction f = random_trial(net, derive_seed(seed, 3, 0), static_cast<std::uint64_t>(v));
    const double f0 = f(net.hat_box.lower());
    const std::size_t i = nearest_in_table(t, anchored_values(f, t.lattice, net.hat_box.lower())).first;
    const ShallowNet approx = net_scale_shift(result.element_nets[i], 1.0, f0);
    for (Eigen::Index p = 0; p < probe.size(); ++p) {
      const Vector x = probe.point(p);
      out.max_error = std::max(out.max_error, std::abs(approx(x) - f(x)));
    }
    ++out.functions;
  }
  out.ok = out.max_error <= net.epsilon;
  return out;
}

}  // namespace lipnet
