#include "lipnet/extension.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace lipnet {

ExtensionProblem::ExtensionProblem(Matrix points, Vector values, double lipschitz, NormSpec norm, double sup_bound,
                                   double rel_slack)
    : values_(std::move(values)), lipschitz_(lipschitz), norm_(norm), sup_bound_(sup_bound) {
  if (points.rows() == 0) throw ArgumentError("extension needs at least one sample");
  if (points.cols() != norm_.dim()) throw ArgumentError("sample points do not match the norm dimension");
  if (points.rows() != values_.size()) throw ArgumentError("sample points and values differ in count");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_)) throw ArgumentError("Lipschitz constant must be positive");
  if (!points.allFinite() || !values_.allFinite()) throw ArgumentError("samples must be finite");
  if (!(sup_bound_ >= values_.cwiseAbs().maxCoeff())) {
    throw ArgumentError("sup_bound is smaller than the largest sample magnitude");
  }
  points_ = points.transpose();
  const Eigen::Index n = values_.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double allowed = lipschitz_ * norm_.norm(points_.col(i) - points_.col(j));
      const double gap = std::abs(values_(i) - values_(j));
      if (gap > allowed * (1.0 + rel_slack)) {
        throw ConsistencyError("samples " + std::to_string(i) + " and " + std::to_string(j) +
                                   " violate the Lipschitz bound: |dv| = " + format_double(gap) +
                                   " > L*||dx|| = " + format_double(allowed),
                               static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
}

ExtensionProblem::ExtensionProblem(Matrix points, Vector values, double lipschitz, NormSpec norm)
    : ExtensionProblem(points, values, lipschitz, norm, values.size() ? values.cwiseAbs().maxCoeff() : 0.0) {}

double ExtensionProblem::operator()(const Vector& x) const {
  const int d = dim();
  if (x.size() != d) throw ArgumentError("dimension mismatch in McShane extension");
  const Eigen::Index n = values_.size();
  const double* p = points_.data();
  const double* v = values_.data();
  const double* xp = x.data();
  const double s = norm_.scale() * lipschitz_;
  double best = std::numeric_limits<double>::infinity();
  // Dispatch once; the inner loops are the hot path of the smoothing stage.
  switch (norm_.kind()) {
    case NormKind::Linf:
      for (Eigen::Index i = 0; i < n; ++i, p += d) {
        double m = 0.0;
        for (int k = 0; k < d; ++k) m = std::max(m, std::abs(xp[k] - p[k]));
        best = std::min(best, v[i] + s * m);
      }
      break;
    case NormKind::L1:
      for (Eigen::Index i = 0; i < n; ++i, p += d) {
        double m = 0.0;
        for (int k = 0; k < d; ++k) m += std::abs(xp[k] - p[k]);
        best = std::min(best, v[i] + s * m);
      }
      break;
    case NormKind::L2:
      for (Eigen::Index i = 0; i < n; ++i, p += d) {
        double m = 0.0;
        for (int k = 0; k < d; ++k) m += (xp[k] - p[k]) * (xp[k] - p[k]);
        best = std::min(best, v[i] + s * std::sqrt(m));
      }
      break;
  }
  return std::clamp(best, -sup_bound_, sup_bound_);
}

SampledFunction extend_to_grid(const ExtensionProblem& prob, const BoxDomain& target_box, int resolution) {
  if (target_box.dim() != prob.dim()) throw ArgumentError("target box dimension does not match the samples");
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    if (!target_box.contains(prob.point(i), 1e-12)) {
      throw ArgumentError("target box does not contain sample " + std::to_string(i));
    }
  }
  return sample_function(prob, target_box, resolution);
}

ScatteredSamples read_scattered_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    for (const auto& c : cells) {
      try {
        row.push_back(parse_double(c));
      } catch (const ArgumentError&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ArgumentError("scattered sample file: non-numeric row " + std::to_string(rows.size() + 1));
    }
    first = false;
    if (row.size() < 2) throw ArgumentError("scattered sample file: rows need d >= 1 coordinates and a value");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ArgumentError("scattered sample file: inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ArgumentError("scattered sample file contains no samples");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(rows.front().size()) - 1;
  ScatteredSamples out{Matrix(n, d), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) out.points(i, k) = rows[i][k];
    out.values(i) = rows[i][d];
  }
  return out;
}

void write_scattered_csv(std::ostream& os, const ScatteredSamples& samples) {
  const Eigen::Index d = samples.points.cols();
  for (Eigen::Index k = 0; k < d; ++k) os << 'x' << (k + 1) << ',';
  os << "value\n";
  for (Eigen::Index i = 0; i < samples.values.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) os << format_double(samples.points(i, k)) << ',';
    os << format_double(samples.values(i)) << '\n';
  }
}

}  // namespace lipnet
