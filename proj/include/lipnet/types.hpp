#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lipnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A real-valued function on R^d, the common currency of targets,
/// extensions, mollified functions and networks.
using ScalarFunction = std::function<double(const Vector&)>;

/// Invalid input: wrong dimension, bad parameter range, malformed file.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sample data that contradicts a stated Lipschitz constant.
class ConsistencyError : public std::runtime_error {
 public:
  ConsistencyError(const std::string& what, std::size_t first, std::size_t second)
      : std::runtime_error(what), first_(first), second_(second) {}
  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

/// An enumeration outgrew its configured cap.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, std::size_t count)
      : std::runtime_error(what), count_(count) {}
  /// The count reached (or a lower bound on it) when the cap tripped.
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

/// A function produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lipnet
