#include "lipnet/smoothing.hpp"

#include <vector>

#include "lipnet/lattice.hpp"

namespace lipnet {

MollifierKernel build_kernel(double kappa, int d, int quad_resolution) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ArgumentError("mollifier radius must be positive");
  if (d < 1) throw ArgumentError("mollifier dimension must be positive");
  if (quad_resolution < 3) throw ArgumentError("quadrature resolution must be at least 3");
  if (quad_resolution % 2 == 0) throw ArgumentError("quadrature resolution must be odd to keep the kernel symmetric");

  const int q = quad_resolution;
  // Integer numerators keep t_j == -t_{q+1-j} bit for bit.
  std::vector<double> t(q);
  for (int j = 1; j <= q; ++j) t[j - 1] = static_cast<double>(2 * j - q - 1) / static_cast<double>(q + 1);

  std::vector<Vector> nodes;
  std::vector<double> weights;
  std::vector<int> idx(d, 0);
  Vector y(d);
  while (true) {
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) {
      y(i) = t[idx[i]];
      r2 += y(i) * y(i);
    }
    if (r2 < 1.0) {
      nodes.push_back(kappa * y);
      weights.push_back(std::exp(1.0 / (r2 - 1.0)));
    }
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] == q) idx[axis--] = 0;
    if (axis < 0) break;
  }

  MollifierKernel k;
  k.kappa_ = kappa;
  k.node_spacing_ = 2.0 * kappa / (q + 1);
  k.offsets_.resize(d, static_cast<Eigen::Index>(nodes.size()));
  k.weights_.resize(static_cast<Eigen::Index>(nodes.size()));
  double total = 0.0;
  for (double w : weights) total += w;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    k.offsets_.col(static_cast<Eigen::Index>(j)) = nodes[j];
    k.weights_(static_cast<Eigen::Index>(j)) = weights[j] / total;
  }
  return k;
}

double gradient_deviation(const ScalarFunction& f, const MollifierKernel& k, const BoxDomain& box, int resolution,
                          double h) {
  Lattice lat(box, resolution);
  double worst = 0.0;
  for (Eigen::Index p = 0; p < lat.size(); ++p) {
    const Vector x = lat.point(p);
    const Vector gm = mollify_grad_eval(f, k, x, h);
    Vector xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      xp(i) = x(i) + h;
      xm(i) = x(i) - h;
      const double gi = (f(xp) - f(xm)) / (2.0 * h);
      worst = std::max(worst, std::abs(gm(i) - gi));
      xp(i) = xm(i) = x(i);
    }
  }
  return worst;
}

}  // namespace lipnet
