#include "lipnet/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace lipnet {

Lattice::Lattice(BoxDomain box, int resolution) : box_(std::move(box)), resolution_(resolution) {
  if (resolution < 2) throw ArgumentError("lattice resolution must be at least 2");
  size_ = 1;
  for (int i = 0; i < box_.dim(); ++i) {
    if (size_ > (Eigen::Index{1} << 40) / resolution) throw ArgumentError("lattice too large");
    size_ *= resolution;
  }
  spacing_ = box_.edges() / static_cast<double>(resolution - 1);
}

Eigen::Index Lattice::stride(int axis) const {
  Eigen::Index s = 1;
  for (int i = dim() - 1; i > axis; --i) s *= resolution_;
  return s;
}

std::vector<int> Lattice::multi_index(Eigen::Index flat) const {
  std::vector<int> idx(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % resolution_);
    flat /= resolution_;
  }
  return idx;
}

Eigen::Index Lattice::flat_index(const std::vector<int>& idx) const {
  Eigen::Index flat = 0;
  for (int i = 0; i < dim(); ++i) flat = flat * resolution_ + idx[i];
  return flat;
}

Vector Lattice::point(const std::vector<int>& idx) const {
  Vector x(dim());
  for (int i = 0; i < dim(); ++i) {
    // Hit the upper bound exactly on the last node.
    x(i) = idx[i] == resolution_ - 1 ? box_.upper()(i) : box_.lower()(i) + idx[i] * spacing_(i);
  }
  return x;
}

Vector Lattice::point(Eigen::Index flat) const { return point(multi_index(flat)); }

std::optional<Eigen::Index> Lattice::node_near(const Vector& x, double tol) const {
  if (x.size() != dim()) return std::nullopt;
  Eigen::Index flat = 0;
  for (int i = 0; i < dim(); ++i) {
    const double u = (x(i) - box_.lower()(i)) / spacing_(i);
    const double r = std::round(u);
    if (std::abs(u - r) > tol || r < 0 || r > resolution_ - 1) return std::nullopt;
    flat = flat * resolution_ + static_cast<Eigen::Index>(r);
  }
  return flat;
}

SampledFunction::SampledFunction(BoxDomain domain, int resolution, Vector values,
                                 std::optional<Matrix> gradients)
    : lattice_(std::move(domain), resolution), values_(std::move(values)), gradients_(std::move(gradients)) {
  if (values_.size() != lattice_.size()) {
    throw ArgumentError("lattice has " + std::to_string(lattice_.size()) + " points but " +
                        std::to_string(values_.size()) + " values were given");
  }
  if (!values_.allFinite()) throw ArgumentError("sampled values must be finite");
  if (gradients_) {
    if (gradients_->rows() != lattice_.size() || gradients_->cols() != lattice_.dim()) {
      throw ArgumentError("gradient lattice shape does not match the value lattice");
    }
    if (!gradients_->allFinite()) throw ArgumentError("sampled gradients must be finite");
  }
}

const Matrix& SampledFunction::gradients() const {
  if (!gradients_) throw ArgumentError("sampled function carries no gradients");
  return *gradients_;
}

double SampledFunction::interpolate(const Vector& x) const {
  const int d = dim();
  if (x.size() != d) throw ArgumentError("dimension mismatch in lattice interpolation");
  const int res = resolution();
  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (int i = 0; i < d; ++i) {
    const double u = (std::clamp(x(i), domain().lower()(i), domain().upper()(i)) - domain().lower()(i)) /
                     lattice_.spacing(i);
    int k = static_cast<int>(std::floor(u));
    k = std::clamp(k, 0, res - 2);
    base[i] = k;
    frac[i] = std::clamp(u - k, 0.0, 1.0);
  }
  double acc = 0.0;
  std::vector<int> idx(d);
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const bool up = (corner >> i) & 1;
      idx[i] = base[i] + (up ? 1 : 0);
      w *= up ? frac[i] : 1.0 - frac[i];
    }
    if (w != 0.0) acc += w * values_(lattice_.flat_index(idx));
  }
  return acc;
}

bool SampledFunction::operator==(const SampledFunction& other) const {
  if (!(domain() == other.domain()) || resolution() != other.resolution()) return false;
  if (values_ != other.values_) return false;
  if (gradients_.has_value() != other.gradients_.has_value()) return false;
  return !gradients_ || *gradients_ == *other.gradients_;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ArgumentError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::vector<std::string> expect_key(std::istream& is, const std::string& key) {
  std::string line;
  if (!std::getline(is, line)) throw ArgumentError("lattice file truncated before '" + key + "'");
  auto cells = split_csv(line);
  if (cells.empty() || cells[0] != key) throw ArgumentError("lattice file: expected key '" + key + "'");
  cells.erase(cells.begin());
  return cells;
}

}  // namespace

void write_lattice_csv(std::ostream& os, const SampledFunction& f) {
  const int d = f.dim();
  os << "# lipnet-lattice v1\n";
  os << "d," << d << "\n";
  os << "resolution," << f.resolution() << "\n";
  os << "lower";
  for (int i = 0; i < d; ++i) os << ',' << format_double(f.domain().lower()(i));
  os << "\nupper";
  for (int i = 0; i < d; ++i) os << ',' << format_double(f.domain().upper()(i));
  os << "\ngradients," << (f.has_gradients() ? 1 : 0) << "\n";
  for (Eigen::Index k = 0; k < f.values().size(); ++k) {
    os << format_double(f.values()(k));
    if (f.has_gradients()) {
      for (int i = 0; i < d; ++i) os << ',' << format_double(f.gradients()(k, i));
    }
    os << '\n';
  }
}

SampledFunction read_lattice_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# lipnet-lattice v1", 0) != 0) {
    throw ArgumentError("not a lipnet lattice file (missing header)");
  }
  auto dcell = expect_key(is, "d");
  auto rcell = expect_key(is, "resolution");
  if (dcell.size() != 1 || rcell.size() != 1) throw ArgumentError("lattice file: malformed d/resolution");
  const int d = static_cast<int>(parse_double(dcell[0]));
  const int res = static_cast<int>(parse_double(rcell[0]));
  if (d < 1 || res < 2) throw ArgumentError("lattice file: invalid d or resolution");
  auto lo = expect_key(is, "lower");
  auto hi = expect_key(is, "upper");
  auto gcell = expect_key(is, "gradients");
  if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d || gcell.size() != 1) {
    throw ArgumentError("lattice file: bounds do not match d");
  }
  Vector lower(d), upper(d);
  for (int i = 0; i < d; ++i) {
    lower(i) = parse_double(lo[i]);
    upper(i) = parse_double(hi[i]);
  }
  const bool grads = parse_double(gcell[0]) != 0.0;
  Lattice lat(BoxDomain(lower, upper), res);
  Vector values(lat.size());
  Matrix gradients(grads ? lat.size() : 0, grads ? d : 0);
  for (Eigen::Index k = 0; k < lat.size(); ++k) {
    if (!std::getline(is, line)) throw ArgumentError("lattice file: fewer rows than lattice points");
    auto cells = split_csv(line);
    if (static_cast<int>(cells.size()) != 1 + (grads ? d : 0)) {
      throw ArgumentError("lattice file: row " + std::to_string(k) + " has the wrong number of columns");
    }
    values(k) = parse_double(cells[0]);
    for (int i = 0; grads && i < d; ++i) gradients(k, i) = parse_double(cells[1 + i]);
  }
  if (grads) return SampledFunction(lat.box(), res, std::move(values), std::move(gradients));
  return SampledFunction(lat.box(), res, std::move(values));
}

}  // namespace lipnet
