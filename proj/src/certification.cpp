#include "lipnet/certification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>
#include <vector>

#include "lipnet/lattice.hpp"

namespace lipnet {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified:
      return "certified";
    case Verdict::Refuted:
      return "refuted";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

Verdict parse_verdict(std::string_view name) {
  if (name == "certified") return Verdict::Certified;
  if (name == "refuted") return Verdict::Refuted;
  if (name == "inconclusive") return Verdict::Inconclusive;
  throw ArgumentError("unknown verdict '" + std::string(name) + "'");
}

double weight_bound_lipschitz(const ShallowNet& net, const NormSpec& norm) {
  double sum = 0.0;
  for (int i = 0; i < net.width(); ++i) sum += std::abs(net.a()(i)) * norm.dual(net.W().row(i).transpose());
  return activation_spec(net.activation()).lipschitz * sum;
}

namespace {

constexpr Eigen::Index kChunk = 4096;

/// Dual norms of the net gradient at the rows of X, with their argmax.
std::pair<double, Eigen::Index> max_gradient_dual(const ShallowNet& net, const NormSpec& norm, const Matrix& X) {
  const ActivationSpec& phi = activation_spec(net.activation());
  double best = -1.0;
  Eigen::Index arg = 0;
  for (Eigen::Index start = 0; start < X.rows(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, X.rows() - start);
    Matrix Z = X.middleRows(start, n) * net.W().transpose();
    Z.rowwise() += net.c().transpose();
    const Matrix D = Z.unaryExpr([&](double z) { return phi.derivative(z); });
    const Matrix G = (D * net.a().asDiagonal()) * net.W();
    for (Eigen::Index r = 0; r < n; ++r) {
      const double v = norm.dual(G.row(r).transpose());
      if (v > best) {
        best = v;
        arg = start + r;
      }
    }
  }
  return {std::max(best, 0.0), arg};
}

Matrix lattice_points(const Lattice& lat) {
  Matrix X(lat.size(), lat.dim());
  for (Eigen::Index p = 0; p < lat.size(); ++p) X.row(p) = lat.point(p).transpose();
  return X;
}

std::vector<Vector> lattice_offsets(int d) {
  // Half of {-1, 0, 1}^d \ {0} (first nonzero entry positive); axes only for d > 3.
  std::vector<Vector> out;
  if (d > 3) {
    for (int i = 0; i < d; ++i) out.push_back(Vector::Unit(d, i));
    return out;
  }
  int total = 1;
  for (int i = 0; i < d; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    Vector o(d);
    int c = code;
    for (int i = 0; i < d; ++i) {
      o(i) = c % 3 - 1;
      c /= 3;
    }
    int first = 0;
    while (first < d && o(first) == 0) ++first;
    if (first < d && o(first) > 0) out.push_back(o);
  }
  return out;
}

class PatternSet {
 public:
  PatternSet(const ShallowNet& net, std::size_t cap) : net_(net), cap_(cap) {}

  void add(const std::vector<char>& active) {
    std::string key(active.begin(), active.end());
    if (!seen_.insert(std::move(key)).second) return;
    if (seen_.size() > cap_) throw CapacityError("activation region count exceeds the cap", seen_.size());
    Vector g = Vector::Zero(net_.dim());
    for (int i = 0; i < net_.width(); ++i) {
      if (active[i]) g += net_.a()(i) * net_.W().row(i).transpose();
    }
    gradients_.push_back(std::move(g));
  }

  const std::vector<Vector>& gradients() const { return gradients_; }

 private:
  const ShallowNet& net_;
  std::size_t cap_;
  std::unordered_set<std::string> seen_;
  std::vector<Vector> gradients_;
};

void enumerate_1d(const ShallowNet& net, const BoxDomain& box, PatternSet& patterns) {
  const double lo = box.lower()(0), hi = box.upper()(0);
  const double tol = 1e-12 * std::max({hi - lo, std::abs(lo), std::abs(hi)});
  std::vector<double> cuts{lo, hi};
  for (int i = 0; i < net.width(); ++i) {
    const double w = net.W()(i, 0);
    if (w == 0.0) continue;
    const double t = -net.c()(i) / w;
    if (t > lo && t < hi) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  // Kinks closer than tol are the same kink up to rounding.
  std::vector<double> merged{cuts.front()};
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    if (cuts[k] - merged.back() > tol) merged.push_back(cuts[k]);
  }
  if (merged.back() < hi) merged.back() = hi;
  std::vector<char> active(net.width());
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
    const double mid = 0.5 * (merged[k] + merged[k + 1]);
    for (int i = 0; i < net.width(); ++i) active[i] = net.W()(i, 0) * mid + net.c()(i) > 0.0;
    patterns.add(active);
  }
}

/// Every region meeting the box is a convex polygon with a vertex; at that
/// vertex it fills the sector between two consecutive rays of the lines and
/// box edges through the vertex. Visiting all sectors of all vertices
/// therefore visits every region.
void enumerate_2d(const ShallowNet& net, const BoxDomain& box, PatternSet& patterns) {
  const int m = net.width();
  const Vector lo = box.lower(), hi = box.upper();
  const double scale = std::max({box.max_edge(), lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()});
  const double tol = 1e-10 * scale;

  std::vector<int> lines;
  Matrix n(m, 2);
  Vector off(m);
  for (int i = 0; i < m; ++i) {
    const double len = net.W().row(i).norm();
    if (len == 0.0) continue;
    lines.push_back(i);
    n.row(i) = net.W().row(i) / len;
    off(i) = net.c()(i) / len;
  }

  auto in_closure = [&](const Eigen::Vector2d& v) {
    return v(0) >= lo(0) - tol && v(0) <= hi(0) + tol && v(1) >= lo(1) - tol && v(1) <= hi(1) + tol;
  };
  std::vector<Eigen::Vector2d> vertices;
  for (int cx = 0; cx < 2; ++cx) {
    for (int cy = 0; cy < 2; ++cy) vertices.emplace_back(cx ? hi(0) : lo(0), cy ? hi(1) : lo(1));
  }
  for (int i : lines) {
    for (int axis = 0; axis < 2; ++axis) {
      const int other = 1 - axis;
      if (n(i, other) == 0.0) continue;
      for (double fixed : {lo(axis), hi(axis)}) {
        Eigen::Vector2d v;
        v(axis) = fixed;
        v(other) = -(off(i) + n(i, axis) * fixed) / n(i, other);
        if (in_closure(v)) vertices.push_back(v);
      }
    }
  }
  for (std::size_t s = 0; s < lines.size(); ++s) {
    const int i = lines[s];
    for (std::size_t t = s + 1; t < lines.size(); ++t) {
      const int j = lines[t];
      const double det = n(i, 0) * n(j, 1) - n(i, 1) * n(j, 0);
      if (std::abs(det) < 1e-12) continue;
      const Eigen::Vector2d v((-off(i) * n(j, 1) + off(j) * n(i, 1)) / det,
                              (-n(i, 0) * off(j) + n(j, 0) * off(i)) / det);
      if (in_closure(v)) vertices.push_back(v);
    }
  }

  std::vector<char> active(m);
  std::vector<double> angles;
  std::vector<int> through;
  for (const auto& v : vertices) {
    through.clear();
    angles.clear();
    for (int i : lines) {
      if (std::abs(n(i, 0) * v(0) + n(i, 1) * v(1) + off(i)) <= tol) {
        through.push_back(i);
        const double a = std::atan2(n(i, 0), -n(i, 1));
        angles.push_back(a);
        angles.push_back(a > 0 ? a - std::numbers::pi : a + std::numbers::pi);
      }
    }
    bool on_lo[2], on_hi[2];
    for (int axis = 0; axis < 2; ++axis) {
      on_lo[axis] = std::abs(v(axis) - lo(axis)) <= tol;
      on_hi[axis] = std::abs(v(axis) - hi(axis)) <= tol;
      if (on_lo[axis] || on_hi[axis]) {
        // Box edge through v runs along the other axis.
        angles.push_back(axis == 0 ? std::numbers::pi / 2 : 0.0);
        angles.push_back(axis == 0 ? -std::numbers::pi / 2 : std::numbers::pi);
      }
    }
    if (angles.empty()) continue;
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(), [](double x, double y) { return y - x < 1e-14; }),
                 angles.end());
    for (std::size_t k = 0; k < angles.size(); ++k) {
      const double a0 = angles[k];
      const double a1 = k + 1 < angles.size() ? angles[k + 1] : angles[0] + 2.0 * std::numbers::pi;
      const double mid = 0.5 * (a0 + a1);
      const Eigen::Vector2d u(std::cos(mid), std::sin(mid));
      bool inward = true;
      for (int axis = 0; axis < 2; ++axis) {
        if (on_lo[axis] && !(u(axis) > 0.0)) inward = false;
        if (on_hi[axis] && !(u(axis) < 0.0)) inward = false;
      }
      if (!inward) continue;
      for (int i = 0; i < m; ++i) active[i] = net.W()(i, 0) * v(0) + net.W()(i, 1) * v(1) + net.c()(i) > 0.0;
      for (int i : through) active[i] = n(i, 0) * u(0) + n(i, 1) * u(1) > 0.0;
      patterns.add(active);
    }
  }
}

PatternSet enumerate_regions(const ShallowNet& net, const BoxDomain& box, int region_cap) {
  if (net.activation() != Activation::Relu) throw ArgumentError("region enumeration needs a ReLU network");
  if (net.dim() != box.dim()) throw ArgumentError("network and box dimensions differ");
  PatternSet patterns(net, static_cast<std::size_t>(std::max(region_cap, 1)));
  if (box.dim() == 1) {
    enumerate_1d(net, box, patterns);
  } else if (box.dim() == 2) {
    enumerate_2d(net, box, patterns);
  } else {
    throw ArgumentError("region enumeration supports d <= 2");
  }
  return patterns;
}

}  // namespace

double grid_gradient_sup(const ShallowNet& net, const BoxDomain& box, const NormSpec& norm, int resolution,
                         int refine_rounds) {
  if (resolution < 2) throw ArgumentError("grid resolution must be at least 2");
  if (net.dim() != box.dim() || norm.dim() != box.dim()) throw ArgumentError("dimension mismatch in grid sweep");
  if (net.width() == 0) return 0.0;
  BoxDomain cell = box;
  double best = 0.0;
  for (int round = 0; round <= refine_rounds; ++round) {
    const Lattice lat(cell, resolution);
    const auto [value, arg] = max_gradient_dual(net, norm, lattice_points(lat));
    best = std::max(best, value);
    if (round == refine_rounds) break;
    const Vector x = lat.point(arg);
    const Vector lower = (x - lat.spacing()).cwiseMax(box.lower());
    const Vector upper = (x + lat.spacing()).cwiseMin(box.upper());
    if (!((upper - lower).array() > 0.0).all()) break;
    cell = BoxDomain(lower, upper);
  }
  return best;
}

std::size_t relu_region_count(const ShallowNet& net, const BoxDomain& box, int region_cap) {
  return enumerate_regions(net, box, region_cap).gradients().size();
}

double relu_exact_lipschitz(const ShallowNet& net, const BoxDomain& box, const NormSpec& norm, int region_cap) {
  const PatternSet patterns = enumerate_regions(net, box, region_cap);
  double best = 0.0;
  for (const Vector& g : patterns.gradients()) best = std::max(best, norm.dual(g));
  return best;
}

double empirical_lipschitz(const ScalarFunction& f, const BoxDomain& box, const NormSpec& norm, int pairs,
                           std::uint64_t seed) {
  if (pairs < 1) throw ArgumentError("empirical Lipschitz probe needs at least one pair");
  const int d = box.dim();
  if (norm.dim() != d) throw ArgumentError("dimension mismatch in Lipschitz probe");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto random_point = [&] {
    Vector x(d);
    for (int k = 0; k < d; ++k) x(k) = box.lower()(k) + uni(rng) * (box.upper()(k) - box.lower()(k));
    return x;
  };
  double best = 0.0;
  auto consider = [&](const Vector& x, double fx, const Vector& y, double fy) {
    const double dist = norm.norm(x - y);
    if (dist > 0.0) best = std::max(best, std::abs(fx - fy) / dist);
  };

  for (int k = 0; k < pairs; ++k) {
    const Vector x = random_point();
    const Vector y = random_point();
    consider(x, f(x), y, f(y));
  }

  const int res = d == 1 ? 1001 : d == 2 ? 101 : std::max(3, static_cast<int>(std::pow(1e4, 1.0 / d)));
  const Lattice lat(box, res);
  Vector values(lat.size());
  for (Eigen::Index p = 0; p < lat.size(); ++p) values(p) = f(lat.point(p));
  const auto offsets = lattice_offsets(d);
  for (Eigen::Index p = 0; p < lat.size(); ++p) {
    const auto idx = lat.multi_index(p);
    for (const Vector& o : offsets) {
      std::vector<int> jdx = idx;
      bool inside = true;
      for (int k = 0; k < d; ++k) {
        jdx[k] += static_cast<int>(o(k));
        inside = inside && jdx[k] >= 0 && jdx[k] < res;
      }
      if (!inside) continue;
      const Eigen::Index q = lat.flat_index(jdx);
      consider(lat.point(p), values(p), lat.point(q), values(q));
    }
  }

  // Short pairs along the direction that maximizes the finite-difference slope.
  const int aligned = std::min(pairs, 2000);
  const double h = 1e-6 * box.max_edge();
  const double t = 1e-4 * box.max_edge();
  for (int k = 0; k < aligned; ++k) {
    const Vector x = random_point();
    Vector g(d);
    for (int i = 0; i < d; ++i) {
      Vector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      g(i) = (f(box.clamp(xp)) - f(box.clamp(xm))) / (xp(i) - xm(i));
    }
    if (g.isZero(0.0)) continue;
    const Vector y = box.clamp(x + t * norm.dual_maximizer(g));
    const Vector z = box.clamp(x - t * norm.dual_maximizer(g));
    const double fx = f(x);
    consider(x, fx, y, f(y));
    consider(x, fx, z, f(z));
  }
  return best;
}

LipschitzCertificate certify(const ShallowNet& net, double L, const BoxDomain& box, const NormSpec& norm,
                             const CertifyOptions& options) {
  const int d = box.dim();
  LipschitzCertificate cert;
  cert.target_L = L;
  cert.weight_bound = weight_bound_lipschitz(net, norm);
  const int res = options.grid_resolution > 0 ? options.grid_resolution : d == 1 ? 2001 : d == 2 ? 201 : 21;
  cert.grid_sup = grid_gradient_sup(net, box, norm, res, options.refine_rounds);
  cert.empirical_quotient =
      empirical_lipschitz([&net](const Vector& x) { return net(x); }, box, norm, options.pairs, options.seed);
  cert.certified_bound = cert.weight_bound;
  if (net.activation() == Activation::Relu && d <= 2) {
    try {
      cert.region_exact = relu_exact_lipschitz(net, box, norm, options.region_cap);
      cert.certified_bound = std::min(cert.weight_bound, *cert.region_exact);
    } catch (const CapacityError&) {
      // Too many regions: the weight bound stands alone.
    }
  }
  const double limit = L * (1.0 + kLipschitzSlack);
  if (cert.certified_bound <= limit) {
    cert.verdict = Verdict::Certified;
  } else if (cert.empirical_quotient > limit) {
    cert.verdict = Verdict::Refuted;
  } else {
    cert.verdict = Verdict::Inconclusive;
  }
  return cert;
}

}  // namespace lipnet
