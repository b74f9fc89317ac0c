#pragma once

#include <iosfwd>

#include "lipnet/lattice.hpp"
#include "lipnet/norm.hpp"

namespace lipnet {

/// Finite samples of an L-Lipschitz function together with the bound the
/// extension must respect. Construction checks every sample pair, so a
/// constructed problem is always consistent.
class ExtensionProblem {
 public:
  /// points is n x d (one sample per row). Throws ArgumentError on empty or
  /// mis-shaped input and ConsistencyError naming the first violating pair.
  ExtensionProblem(Matrix points, Vector values, double lipschitz, NormSpec norm, double sup_bound,
                   double rel_slack = 1e-9);
  /// sup_bound defaults to max |value|.
  ExtensionProblem(Matrix points, Vector values, double lipschitz, NormSpec norm);

  Eigen::Index size() const { return values_.size(); }
  int dim() const { return norm_.dim(); }
  Vector point(Eigen::Index i) const { return points_.col(i); }
  const Vector& values() const { return values_; }
  double lipschitz() const { return lipschitz_; }
  const NormSpec& norm() const { return norm_; }
  double sup_bound() const { return sup_bound_; }

  /// min_i (v_i + L ||x - p_i||) clamped to [-sup_bound, sup_bound].
  double operator()(const Vector& x) const;

 private:
  Matrix points_;  // d x n, column per sample
  Vector values_;
  double lipschitz_;
  NormSpec norm_;
  double sup_bound_;
};

inline double mcshane_extend(const ExtensionProblem& prob, const Vector& x) { return prob(x); }

SampledFunction extend_to_grid(const ExtensionProblem& prob, const BoxDomain& target_box, int resolution);

/// Scattered samples: rows of d coordinates followed by the value. An optional
/// non-numeric header row is skipped.
struct ScatteredSamples {
  Matrix points;  // n x d
  Vector values;
};
ScatteredSamples read_scattered_csv(std::istream& is);
void write_scattered_csv(std::ostream& os, const ScatteredSamples& samples);

}  // namespace lipnet
