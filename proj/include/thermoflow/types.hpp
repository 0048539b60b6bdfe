#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace thermoflow {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Numerical thresholds shared across modules.
template <typename Scalar>
struct Tolerance {
  /// Post-construction normalization slack of probability vectors.
  static constexpr Scalar normalized = Scalar(1e-12);
  /// Inputs closer than this to unit mass are renormalized, others rejected.
  static constexpr Scalar renormalize = Scalar(1e-9);
  /// Probabilities at or below this are outside the support.
  static constexpr Scalar support = Scalar(1e-15);
  /// Absolute slack of Lorenz-curve comparisons.
  static constexpr Scalar curve = Scalar(1e-12);
  /// Linear-feasibility and witness checks.
  static constexpr Scalar feasibility = Scalar(1e-9);
};

/// log(sum(exp(v))) with max shifting. Returns -inf for an empty or all -inf input.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) return -std::numeric_limits<Scalar>::infinity();
  const Scalar shift = v.maxCoeff();
  if (!std::isfinite(shift)) return shift;
  return shift + std::log((v.array() - shift).exp().sum());
}

/// log(exp(a) + exp(b)) without overflow.
template <typename Scalar>
Scalar log_add_exp(Scalar a, Scalar b) {
  if (a < b) std::swap(a, b);
  if (a == -std::numeric_limits<Scalar>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace thermoflow
