#pragma once

// Dense two-phase tableau simplex for small standard-form programs
//
//   minimize c^T x  subject to  A x = b,  x >= 0,
//
// with Bland's rule for entering and leaving variables, so degenerate
// instances terminate. Rows with negative right-hand side are flipped.
// Redundant equality rows are detected when driving artificials out of the
// basis after phase 1 and dropped.

#include "thermoflow/types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace thermoflow {

enum class LpStatus { optimal, infeasible, unbounded };

template <typename Scalar = double>
struct LpResult {
  LpStatus status;
  Vector<Scalar> x;
  Scalar objective;
  /// Sum of artificial variables at the end of phase 1.
  Scalar infeasibility;
};

template <typename Scalar = double>
struct SimplexOptions {
  Scalar feasibility_tolerance = Tolerance<Scalar>::feasibility;
  Scalar pivot_tolerance = Scalar(1e-11);
  Scalar optimality_tolerance = Scalar(1e-11);
};

template <typename Scalar = double>
class DenseSimplex {
 public:
  DenseSimplex(const Matrix<Scalar>& a, const Vector<Scalar>& b, SimplexOptions<Scalar> options = {})
      : m_(a.rows()), n_(a.cols()), options_(options) {
    // Columns: n structural, m artificial, then the right-hand side.
    tableau_.setZero(m_ + 1, n_ + m_ + 1);
    for (Index i = 0; i < m_; ++i) {
      const Scalar sign = b(i) < 0 ? Scalar(-1) : Scalar(1);
      tableau_.row(i).head(n_) = sign * a.row(i);
      tableau_(i, n_ + i) = 1;
      tableau_(i, rhs()) = sign * b(i);
    }
    basis_.resize(static_cast<std::size_t>(m_));
    for (Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    active_.assign(static_cast<std::size_t>(m_), true);
  }

  LpResult<Scalar> solve(const Vector<Scalar>& cost) {
    // Phase 1: minimize the sum of artificials.
    tableau_.row(m_).setZero();
    for (Index i = 0; i < m_; ++i) tableau_.row(m_) -= tableau_.row(i);
    for (Index i = 0; i < m_; ++i) tableau_(m_, n_ + i) = 0;
    iterate(n_ + m_);
    const Scalar infeasibility = -tableau_(m_, rhs());
    if (infeasibility > options_.feasibility_tolerance) {
      return {LpStatus::infeasible, Vector<Scalar>(), std::numeric_limits<Scalar>::quiet_NaN(), infeasibility};
    }
    drive_out_artificials();

    // Phase 2 on the structural columns only.
    tableau_.row(m_).setZero();
    tableau_.row(m_).head(n_) = cost.transpose();
    for (Index i = 0; i < m_; ++i) {
      if (!active_[static_cast<std::size_t>(i)]) continue;
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_ && tableau_(m_, j) != 0) tableau_.row(m_) -= tableau_(m_, j) * tableau_.row(i);
    }
    if (!iterate(n_)) {
      return {LpStatus::unbounded, Vector<Scalar>(), -std::numeric_limits<Scalar>::infinity(), infeasibility};
    }
    Vector<Scalar> x = Vector<Scalar>::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (active_[static_cast<std::size_t>(i)] && j < n_) x(j) = tableau_(i, rhs());
    }
    return {LpStatus::optimal, x, cost.dot(x), infeasibility};
  }

 private:
  Index rhs() const { return n_ + m_; }

  // Returns false on unboundedness. Only columns below `limit` may enter.
  bool iterate(Index limit) {
    for (;;) {
      Index entering = -1;
      for (Index j = 0; j < limit; ++j) {
        if (tableau_(m_, j) < -options_.optimality_tolerance) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;

      Index leaving = -1;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (Index i = 0; i < m_; ++i) {
        if (!active_[static_cast<std::size_t>(i)]) continue;
        const Scalar coef = tableau_(i, entering);
        if (coef <= options_.pivot_tolerance) continue;
        const Scalar ratio = tableau_(i, rhs()) / coef;
        if (ratio < best - options_.pivot_tolerance ||
            (std::abs(ratio - best) <= options_.pivot_tolerance &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
          best = ratio;
          leaving = i;
        }
      }
      if (leaving < 0) return false;
      pivot(leaving, entering);
    }
  }

  void pivot(Index row, Index col) {
    tableau_.row(row) /= tableau_(row, col);
    for (Index i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const Scalar factor = tableau_(i, col);
      if (factor != 0) tableau_.row(i) -= factor * tableau_.row(row);
    }
    // Keep the basic column exact.
    tableau_.col(col).setZero();
    tableau_(row, col) = 1;
    basis_[static_cast<std::size_t>(row)] = col;
  }

  void drive_out_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      // The artificial sits at a level below the feasibility tolerance; pin it to zero.
      tableau_(i, rhs()) = 0;
      Index col = -1;
      Scalar largest = options_.pivot_tolerance;
      for (Index j = 0; j < n_; ++j) {
        if (std::abs(tableau_(i, j)) > largest) {
          largest = std::abs(tableau_(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        active_[static_cast<std::size_t>(i)] = false;  // redundant row
      }
    }
  }

  Index m_;
  Index n_;
  SimplexOptions<Scalar> options_;
  Matrix<Scalar> tableau_;
  std::vector<Index> basis_;
  std::vector<bool> active_;
};

template <typename Scalar>
LpResult<Scalar> solve_lp(const Matrix<Scalar>& a, const Vector<Scalar>& b, const Vector<Scalar>& cost,
                          SimplexOptions<Scalar> options = {}) {
  DenseSimplex<Scalar> simplex(a, b, options);
  return simplex.solve(cost);
}

}  // namespace thermoflow
