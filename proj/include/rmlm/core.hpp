#pragma once

// Shared vocabulary: node indices, dense matrices, error types and the
// numerical tolerance used by every equality-based classification.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmlm {

/// Zero-based node index. File formats and messages use 1-based labels.
using Node = std::size_t;

/// Sorted, duplicate-free set of nodes.
using NodeSet = std::vector<Node>;

using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violating a documented precondition or format.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Entry of a tail dependence matrix inside (0, zero tolerance]; it can be
/// classified neither as zero nor as positive.
class IllConditioned : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Well-formed input that no recursive max-linear model realizes.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Work refused because the problem exceeds a configured size cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Numerical tolerance.
///
/// `eps` scales with max(1, |a|, |b|): coefficients and tail dependence
/// coefficients live in [0, 1], where it acts as an absolute bound, while
/// unstandardized coefficients larger than one are compared relatively.
/// Recursion outputs within [-eps, eps] are rounding noise and snap to zero.
/// `zero` is the threshold below which a tail dependence coefficient counts
/// as exactly zero.
struct Tolerance {
  double eps = 1e-9;
  double zero = 1e-12;

  [[nodiscard]] bool close(double a, double b) const {
    return std::abs(a - b) <= eps * std::max({1.0, std::abs(a), std::abs(b)});
  }
  /// a > b beyond rounding.
  [[nodiscard]] bool greater(double a, double b) const { return a > b && !close(a, b); }
  /// a >= b up to rounding.
  [[nodiscard]] bool at_least(double a, double b) const { return a >= b || close(a, b); }
  /// Scale-aware residual, comparable against eps.
  [[nodiscard]] double residual(double a, double b) const {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
  }
};

/// 1-based "(row, column)" label for messages.
inline std::string entry_label(Node r, Node c) {
  return "(" + std::to_string(r + 1) + ", " + std::to_string(c + 1) + ")";
}

/// Decimal text with `digits` significant digits; 17 round-trips any double.
inline std::string format_double(double x, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidInput(what);
}

inline void require_square(const Matrix& m, const char* what) {
  require(m.rows() == m.cols(), std::string(what) + " must be square, got " +
                                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  require(m.rows() > 0, std::string(what) + " must have at least one row");
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      require(std::isfinite(m(r, c)), std::string(what) + " entry " +
                                          entry_label(Node(r), Node(c)) + " is not finite");
}

inline bool contains(const NodeSet& s, Node v) { return std::binary_search(s.begin(), s.end(), v); }

}  // namespace detail
}  // namespace rmlm
