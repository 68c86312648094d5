#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace dcclust {

/// Row-major so that a center x^l or a datum a^i is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Vector>;

/// Shape or argument errors in calls into the library.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when asked to sample from a set with no uniform distribution.
class UnsupportedSampling : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dcclust
