#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lipnet/box.hpp"

namespace lipnet {

/// Regular lattice over a closed box with `resolution` points per axis,
/// boundary included. Points are flattened row-major: the first axis varies
/// slowest, the last axis fastest.
class Lattice {
 public:
  Lattice(BoxDomain box, int resolution);

  const BoxDomain& box() const { return box_; }
  int resolution() const { return resolution_; }
  int dim() const { return box_.dim(); }
  Eigen::Index size() const { return size_; }
  double spacing(int axis) const { return spacing_(axis); }
  const Vector& spacing() const { return spacing_; }

  std::vector<int> multi_index(Eigen::Index flat) const;
  Eigen::Index flat_index(const std::vector<int>& idx) const;
  Vector point(Eigen::Index flat) const;
  Vector point(const std::vector<int>& idx) const;
  /// Stride of `axis` in the flat ordering.
  Eigen::Index stride(int axis) const;

  /// Flat index of the node within `tol` (in units of spacing) of x, if any.
  std::optional<Eigen::Index> node_near(const Vector& x, double tol = 1e-7) const;

 private:
  BoxDomain box_;
  int resolution_;
  Eigen::Index size_;
  Vector spacing_;
};

/// Values (and optionally gradients) of a function on a Lattice.
class SampledFunction {
 public:
  SampledFunction(BoxDomain domain, int resolution, Vector values,
                  std::optional<Matrix> gradients = std::nullopt);

  const BoxDomain& domain() const { return lattice_.box(); }
  int resolution() const { return lattice_.resolution(); }
  int dim() const { return lattice_.dim(); }
  const Lattice& lattice() const { return lattice_; }
  const Vector& values() const { return values_; }
  bool has_gradients() const { return gradients_.has_value(); }
  /// size() x d, one row per lattice point.
  const Matrix& gradients() const;

  /// Multilinear interpolation; exact at nodes. x is clamped into the box.
  double interpolate(const Vector& x) const;

  bool operator==(const SampledFunction& other) const;

 private:
  Lattice lattice_;
  Vector values_;
  std::optional<Matrix> gradients_;
};

/// Samples f at every lattice node.
template <typename F>
SampledFunction sample_function(const F& f, const BoxDomain& box, int resolution) {
  Lattice lat(box, resolution);
  Vector values(lat.size());
  for (Eigen::Index k = 0; k < lat.size(); ++k) values(k) = f(lat.point(k));
  return SampledFunction(box, resolution, std::move(values));
}

/// Lattice file: a `# lipnet-lattice v1` header, key lines `d`, `resolution`,
/// `lower`, `upper`, `gradients`, then one CSV row per point in row-major
/// order holding the value followed by the d gradient entries when present.
/// Numbers use shortest round-trip decimal encoding.
void write_lattice_csv(std::ostream& os, const SampledFunction& f);
SampledFunction read_lattice_csv(std::istream& is);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace lipnet
