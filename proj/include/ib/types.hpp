#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ib {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Clamp applied to arguments of logarithms so that vanishing probabilities
/// contribute exactly 0 instead of NaN. The stored probabilities are never
/// modified, only the log argument.
inline constexpr double kLogFloor = 1e-12;

/// Smallest encoder entry at which analytic gradients are evaluated.
/// project_simplex_rows() raises entries to this floor, so a projected
/// encoder is always a valid gradient argument.
inline constexpr double kEncoderFloor = 1e-9;

inline constexpr double kLn2 = 0.6931471805599453;

inline double nats_to_bits(double nats) { return nats / kLn2; }
inline double bits_to_nats(double bits) { return bits * kLn2; }

/// log with the probability floor; log(x<=floor) == log(floor).
inline double clog(double x) { return std::log(x < kLogFloor ? kLogFloor : x); }

/// Joint distribution p(x,y) with cached marginals.
///
/// Invariants (checked on construction): entries >= 0, total mass 1 within
/// 1e-12, marginals consistent with row/column sums, |X| >= 2, |Y| >= 2.
struct JointDistribution {
  Matrix p_xy;
  Vector p_x;
  Vector p_y;

  static JointDistribution from_joint(const Matrix& p);

  Index x_size() const { return p_xy.rows(); }
  Index y_size() const { return p_xy.cols(); }
};

/// Row-stochastic encoder p(z|x); the optimization variable.
struct Encoder {
  Matrix p_z_given_x;

  /// Validates row sums within 1e-10 and non-negative entries.
  static Encoder from_matrix(const Matrix& q);

  /// Wraps without validation; for internal use where rows are known valid.
  static Encoder unchecked(Matrix q) { return Encoder{std::move(q)}; }

  Index x_size() const { return p_z_given_x.rows(); }
  Index z_size() const { return p_z_given_x.cols(); }
};

/// Free parameters of an encoder: the first |Z|-1 columns flattened row by
/// row; the last z-column of each row is implied by normalization.
struct ReducedCoordinates {
  Vector values;
  Index x_size = 0;
  Index z_size = 0;

  Index dim() const { return x_size * (z_size - 1); }
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace ib
