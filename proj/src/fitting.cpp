#include "lipnet/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace lipnet {

FitTarget::FitTarget(SampledFunction samples_, double value_tol_, double grad_tol_, NormSpec norm_)
    : samples(std::move(samples_)), value_tol(value_tol_), grad_tol(grad_tol_), norm(norm_) {
  if (!(value_tol > 0.0) || !(grad_tol > 0.0)) throw ArgumentError("fit tolerances must be positive");
  if (!samples.has_gradients()) throw ArgumentError("fit target needs gradients at every lattice point");
  if (norm.dim() != samples.dim()) throw ArgumentError("fit norm dimension does not match the samples");
}

Residuals lattice_residuals(const ShallowNet& net, const SampledFunction& target) {
  const Lattice& lat = target.lattice();
  Residuals r{0.0, 0.0};
  for (Eigen::Index p = 0; p < lat.size(); ++p) {
    const Vector x = lat.point(p);
    r.value_err = std::max(r.value_err, std::abs(net(x) - target.values()(p)));
    if (target.has_gradients()) {
      const Vector g = net.gradient(x) - target.gradients().row(p).transpose();
      r.grad_err = std::max(r.grad_err, g.cwiseAbs().maxCoeff());
    }
  }
  return r;
}

double fit_score(const Residuals& r, const FitTarget& target) {
  return std::max(r.value_err / target.value_tol, r.grad_err / target.grad_tol);
}

namespace {

// Kink hyperplanes closer than this (relative to the box) are made identical.
constexpr double kCoincidenceTol = 1e-6;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Direction {
  std::vector<int> step;  // lattice index step
  Vector w;               // physical direction on the dual sphere scaled by d
  double spacing;         // gap between consecutive projections of lattice nodes
  std::vector<double> cdf;
  std::vector<double> midpoints;
};

struct Unit {
  Vector w;
  double c;
  int direction;      // -1 for random directions
  long long slot;     // snapped gap index along the direction
};

/// Deterministic hidden-unit generator. Unit i depends on (seed, i) and the
/// target only, so the unit lists for increasing widths are nested.
class FeatureSampler {
 public:
  FeatureSampler(const FitTarget& target, std::uint64_t seed, const FitOptions& options)
      : target_(target), seed_(seed), options_(options) {
    const Lattice& lat = target.samples.lattice();
    const int d = lat.dim();
    std::vector<std::vector<int>> steps;
    for (int i = 0; i < d; ++i) {
      for (int s : {1, -1}) {
        std::vector<int> e(d, 0);
        e[i] = s;
        steps.push_back(e);
      }
    }
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        for (int si : {1, -1}) {
          for (int sj : {1, -1}) {
            std::vector<int> e(d, 0);
            e[i] = si;
            e[j] = sj;
            steps.push_back(e);
          }
        }
      }
    }
    const Matrix& grads = target.samples.gradients();
    double grad_scale = 0.0;
    for (Eigen::Index p = 0; p < grads.rows(); ++p) grad_scale = std::max(grad_scale, grads.row(p).lpNorm<1>());
    double curvature = 0.0;
    double min_spacing = std::numeric_limits<double>::infinity();

    for (const auto& step : steps) {
      Direction dir;
      dir.step = step;
      Vector v(d);
      for (int k = 0; k < d; ++k) v(k) = step[k] / lat.spacing(k);
      dir.w = d * v / target.norm.dual(v);
      dir.spacing = 0.0;
      for (int k = 0; k < d; ++k) {
        if (step[k] != 0) dir.spacing = std::abs(dir.w(k)) * lat.spacing(k);
      }
      min_spacing = std::min(min_spacing, dir.spacing);
      double total = 0.0;
      for (Eigen::Index p = 0; p < lat.size(); ++p) {
        auto idx = lat.multi_index(p);
        bool inside = true;
        for (int k = 0; k < d; ++k) {
          idx[k] += step[k];
          inside = inside && idx[k] >= 0 && idx[k] < lat.resolution();
        }
        if (!inside) continue;
        const Eigen::Index q = lat.flat_index(idx);
        const double weight = (grads.row(q) - grads.row(p)).lpNorm<1>();
        if (weight <= 0.0) continue;
        total += weight;
        dir.cdf.push_back(total);
        // First gap between projected nodes past p; a diagonal step spans two gaps.
        dir.midpoints.push_back(dir.w.dot(lat.point(p)) + 0.5 * dir.spacing);
        curvature = std::max(curvature, weight / dir.spacing);
      }
      directions_.push_back(std::move(dir));
    }
    const BoxDomain& box = lat.box();
    for (auto& dir : directions_) {
      double lo = 0.0, hi = 0.0;
      for (int k = 0; k < d; ++k) {
        lo += std::min(dir.w(k) * box.lower()(k), dir.w(k) * box.upper()(k));
        hi += std::max(dir.w(k) * box.lower()(k), dir.w(k) * box.upper()(k));
      }
      ranges_.emplace_back(lo, hi);
    }
    // Steepest useful smooth unit: resolve the target's curvature, never finer
    // than half a lattice gap.
    const double rho = grad_scale > 0.0 ? curvature / grad_scale : 0.0;
    sigma_max_ = std::clamp(rho, 1.0, std::max(1.0, 0.5 / min_spacing));
  }

  Unit unit(int i) const {
    std::mt19937_64 rng(splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(i) + 1)));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const Lattice& lat = target_.samples.lattice();
    const int d = lat.dim();
    const ActivationSpec& phi = activation_spec(options_.activation);
    const double sigma = phi.smooth() ? std::exp(uni(rng) * std::log(sigma_max_)) : 1.0;

    if (d >= 2 && uni(rng) < options_.random_direction_fraction) {
      std::normal_distribution<double> normal;
      Vector v(d);
      do {
        for (int k = 0; k < d; ++k) v(k) = normal(rng);
      } while (v.norm() == 0.0);
      Vector w = d * v / target_.norm.dual(v);
      double lo = 0.0, hi = 0.0;
      for (int k = 0; k < d; ++k) {
        lo += std::min(w(k) * lat.box().lower()(k), w(k) * lat.box().upper()(k));
        hi += std::max(w(k) * lat.box().lower()(k), w(k) * lat.box().upper()(k));
      }
      const double t = lo + uni(rng) * (hi - lo);
      return Unit{sigma * w, -sigma * t, -1, 0};
    }

    const int ndir = static_cast<int>(directions_.size());
    const bool importance = i % 2 == 0;
    // Curvature-guided units cycle through the directions; the rest pick one at random.
    const int di = importance ? (i / 2) % ndir : static_cast<int>(uni(rng) * ndir) % ndir;
    const Direction& dir = directions_[di];
    const double origin = dir.w.dot(lat.box().lower());
    double t;
    if (importance && !dir.cdf.empty()) {
      const double u = uni(rng) * dir.cdf.back();
      auto it = std::upper_bound(dir.cdf.begin(), dir.cdf.end(), u);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - dir.cdf.begin()), dir.cdf.size() - 1);
      t = dir.midpoints[k];
    } else {
      const auto [lo, hi] = ranges_[di];
      t = lo + uni(rng) * (hi - lo);
      // Snap to the midpoint of the gap between projected lattice nodes.
      const double gaps = std::floor((ranges_[di].second - ranges_[di].first) / dir.spacing + 0.5);
      double slot = std::floor((t - origin) / dir.spacing);
      const double first = std::floor((lo - origin) / dir.spacing + 0.5);
      slot = std::clamp(slot, first, first + std::max(0.0, gaps - 1.0));
      t = origin + (slot + 0.5) * dir.spacing;
    }
    const long long slot = static_cast<long long>(std::llround((t - origin) / dir.spacing * 2.0));
    return Unit{sigma * dir.w, -sigma * t, di, slot};
  }

  /// First m units with exact duplicates removed (ReLU only; smooth units differ in steepness).
  std::vector<Unit> units(int m) const {
    std::vector<Unit> out;
    std::set<std::pair<int, long long>> seen;
    const bool dedup = !activation_spec(options_.activation).smooth();
    for (int i = 0; i < m; ++i) {
      Unit u = unit(i);
      if (dedup && u.direction >= 0 && !seen.emplace(u.direction, u.slot).second) continue;
      out.push_back(std::move(u));
    }
    return out;
  }

 private:
  const FitTarget& target_;
  std::uint64_t seed_;
  FitOptions options_;
  std::vector<Direction> directions_;
  std::vector<std::pair<double, double>> ranges_;
  double sigma_max_ = 1.0;
};

/// Lattice points, values and gradients in matrix form.
struct FitData {
  Matrix X;  // N x d
  Vector y;  // N
  Matrix G;  // N x d
};

FitData make_data(const SampledFunction& s) {
  const Lattice& lat = s.lattice();
  FitData data{Matrix(lat.size(), lat.dim()), s.values(), s.gradients()};
  for (Eigen::Index p = 0; p < lat.size(); ++p) data.X.row(p) = lat.point(p).transpose();
  return data;
}

/// Surrogate loss, residuals and the activation matrices they came from.
struct State {
  Matrix Z;
  Matrix Phi;
  Matrix dPhi;
  Vector rv;  // value residuals
  Matrix rg;  // gradient residuals, N x d
  double loss = 0.0;
  Residuals sup{0.0, 0.0};
};

State evaluate(const FitData& data, const ActivationSpec& phi, double b, const Vector& a, const Matrix& W,
               const Vector& c, double grad_weight) {
  State st;
  st.Z = data.X * W.transpose();
  st.Z.rowwise() += c.transpose();
  st.Phi = st.Z.unaryExpr([&](double z) { return phi.value(z); });
  st.dPhi = st.Z.unaryExpr([&](double z) { return phi.derivative(z); });
  st.rv = (st.Phi * a).array() + b;
  st.rv -= data.y;
  st.rg = (st.dPhi * a.asDiagonal()) * W - data.G;
  st.loss = 0.5 * st.rv.squaredNorm() + 0.5 * grad_weight * st.rg.squaredNorm();
  st.sup.value_err = st.rv.size() ? st.rv.cwiseAbs().maxCoeff() : 0.0;
  st.sup.grad_err = st.rg.size() ? st.rg.cwiseAbs().maxCoeff() : 0.0;
  return st;
}

struct Candidate {
  ShallowNet net;
  Residuals sup;
  double score;
  int iterations;
};

Candidate least_squares_and_refine(const FitTarget& target, const FitData& data, const std::vector<Unit>& units,
                                   const FitOptions& options) {
  const int d = target.samples.dim();
  const Eigen::Index N = data.X.rows();
  const Eigen::Index n = static_cast<Eigen::Index>(units.size());
  const ActivationSpec& phi = activation_spec(options.activation);

  Matrix W(n, d);
  Vector c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    W.row(i) = units[i].w.transpose();
    c(i) = units[i].c;
  }

  // Rows: N value rows, N*d gradient rows, n ridge rows. Columns: bias, units.
  Matrix Z = data.X * W.transpose();
  Z.rowwise() += c.transpose();
  const double gw = std::sqrt(options.grad_weight);
  Matrix A = Matrix::Zero(N * (1 + d) + n, n + 1);
  Vector rhs = Vector::Zero(A.rows());
  A.block(0, 0, N, 1).setOnes();
  A.block(0, 1, N, n) = Z.unaryExpr([&](double z) { return phi.value(z); });
  rhs.head(N) = data.y;
  const Matrix dPhi = Z.unaryExpr([&](double z) { return phi.derivative(z); });
  for (int k = 0; k < d; ++k) {
    A.block(N * (1 + k), 1, N, n) = gw * (dPhi * W.col(k).asDiagonal());
    rhs.segment(N * (1 + k), N) = gw * data.G.col(k);
  }
  if (n > 0) {
    const double mean_sq = A.block(0, 1, N * (1 + d), n).colwise().squaredNorm().mean();
    const double mu = std::sqrt(options.ridge * std::max(mean_sq, 1e-300));
    A.block(N * (1 + d), 1, n, n).diagonal().setConstant(mu);
  }
  const Vector sol = A.householderQr().solve(rhs);
  double b = sol(0);
  Vector a = sol.tail(n);

  State cur = evaluate(data, phi, b, a, W, c, options.grad_weight);
  Candidate best{ShallowNet(options.activation, b, a, W, c), cur.sup, fit_score(cur.sup, target), 0};

  // Damped gradient descent with backtracking on the same surrogate. The
  // first step is 1 / ||A||_F^2, which cannot overshoot along (b, a).
  double step = 1.0 / std::max(A.squaredNorm(), 1e-300);
  int accepted = 0;
  const double lam = options.grad_weight;
  // ReLU kinks stay on their slots, so twin units on one hyperplane stay
  // exactly coincident instead of drifting into sliver regions.
  const bool move_features = options.refine_features && phi.smooth();
  for (int it = 0; it < options.refine_iterations && n > 0 && best.score > 0.0; ++it) {
    const Matrix S = cur.rg * W.transpose();  // (r_g,p . w_i)
    const double gb = cur.rv.sum();
    const Vector ga = cur.Phi.transpose() * cur.rv + lam * cur.dPhi.cwiseProduct(S).colwise().sum().transpose();
    Vector gc = Vector::Zero(n);
    Matrix gW = Matrix::Zero(n, d);
    if (move_features) {
      gc = cur.dPhi.transpose() * cur.rv;
      gW = cur.dPhi.transpose() * (cur.rv.asDiagonal() * data.X) + lam * cur.dPhi.transpose() * cur.rg;
      if (phi.smooth()) {
        const Matrix U = cur.Z.unaryExpr([&](double z) { return phi.second_derivative(z); }).cwiseProduct(S);
        gc += lam * U.colwise().sum().transpose();
        gW += lam * U.transpose() * data.X;
      }
      gc = a.cwiseProduct(gc);
      gW = a.asDiagonal() * gW;
    }
    const double gnorm2 = gb * gb + ga.squaredNorm() + gc.squaredNorm() + gW.squaredNorm();
    if (!(gnorm2 > 0.0) || !std::isfinite(gnorm2)) break;

    bool moved = false;
    for (int tries = 0; tries < 20; ++tries) {
      const double nb = b - step * gb;
      Vector na = a - step * ga;
      Vector nc = c - step * gc;
      Matrix nW = W - step * gW;
      State trial = evaluate(data, phi, nb, na, nW, nc, lam);
      if (std::isfinite(trial.loss) && trial.loss <= cur.loss - 1e-4 * step * gnorm2) {
        b = nb;
        a = std::move(na);
        c = std::move(nc);
        W = std::move(nW);
        cur = std::move(trial);
        ++accepted;
        moved = true;
        step *= 2.0;
        const double score = fit_score(cur.sup, target);
        if (score < best.score) best = Candidate{ShallowNet(options.activation, b, a, W, c), cur.sup, score, accepted};
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return best;
}

FitReport to_report(const Candidate& cand, const FitTarget& target) {
  FitReport rep{merge_coincident_units(cand.net, kCoincidenceTol * target.samples.domain().max_edge()), 0.0, 0.0, 0, false,
                cand.iterations};
  const Residuals r = lattice_residuals(rep.net, target.samples);
  rep.achieved_value_err = r.value_err;
  rep.achieved_grad_err = r.grad_err;
  rep.width_used = rep.net.width();
  rep.converged = r.value_err <= target.value_tol && r.grad_err <= target.grad_tol;
  return rep;
}

/// Fits along a chain of widths, each result competing with the previous best.
class WidthChain {
 public:
  WidthChain(const FitTarget& target, std::uint64_t seed, const FitOptions& options)
      : target_(target), options_(options), sampler_(target, seed, options), data_(make_data(target.samples)) {}

  const Candidate& step(int m) {
    Candidate cand = least_squares_and_refine(target_, data_, sampler_.units(m), options_);
    if (!best_ || cand.score < best_->score) best_ = std::move(cand);
    return *best_;
  }

 private:
  const FitTarget& target_;
  FitOptions options_;
  FeatureSampler sampler_;
  FitData data_;
  std::optional<Candidate> best_;
};

}  // namespace

FitReport fit_c1(const FitTarget& target, int m, std::uint64_t seed, const FitOptions& options) {
  if (m < 1) throw ArgumentError("fit width must be at least 1");
  std::vector<int> widths;
  for (int w = m; w >= 1; w /= 2) widths.push_back(w);
  WidthChain chain(target, seed, options);
  const Candidate* best = nullptr;
  for (auto it = widths.rbegin(); it != widths.rend(); ++it) best = &chain.step(*it);
  return to_report(*best, target);
}

FitReport fit_adaptive(const FitTarget& target, int m_max, std::uint64_t seed, const FitOptions& options) {
  if (m_max < 1) throw ArgumentError("maximum fit width must be at least 1");
  WidthChain chain(target, seed, options);
  FitReport rep = to_report(chain.step(1), target);
  for (int m = 2; m <= m_max && !rep.converged; m *= 2) rep = to_report(chain.step(m), target);
  return rep;
}

}  // namespace lipnet
