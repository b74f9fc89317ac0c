#pragma once

#include "lipnet/types.hpp"

namespace lipnet {

/// Axis-aligned box with lower[i] < upper[i]. Treated as open for Lipschitz
/// statements and as closed for lattices.
class BoxDomain {
 public:
  BoxDomain(Vector lower, Vector upper);
  static BoxDomain unit(int dim);
  static BoxDomain cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Vector edges() const { return upper_ - lower_; }
  double max_edge() const { return edges().maxCoeff(); }
  Vector center() const { return 0.5 * (lower_ + upper_); }

  bool contains(const Vector& x, double tol = 0.0) const;
  /// Grows every side by margin (may be negative as long as the box stays valid).
  BoxDomain enlarged(double margin) const;
  /// Nearest point of the closed box.
  Vector clamp(const Vector& x) const;

  bool operator==(const BoxDomain& other) const;

 private:
  Vector lower_;
  Vector upper_;
};

/// The pair of maps between the unit cube and the cube [l, l + M]^d that
/// contains a box, with M the longest edge and l the lower corner:
/// forward(x) = M x + l, inverse(y) = (y - l) / M.
struct AffineRescale {
  double M;
  Vector l;

  Vector forward(const Vector& x) const { return M * x + l; }
  Vector inverse(const Vector& y) const { return (y - l) / M; }
};

AffineRescale affine_rescale(const BoxDomain& box);

}  // namespace lipnet
