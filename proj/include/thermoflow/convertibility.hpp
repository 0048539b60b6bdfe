#pragma once

// Single-shot convertibility R -> S under equilibrating operations.
//
// The production path compares rescaled Lorenz curves. The verification path
// solves the defining linear feasibility problem directly: find a stochastic
// M (unit column sums, nonnegative) with M g = g and M r = s. States that do
// not share their eigenvalue tables are first padded with free states,
// (r (x) g_S) -> (g_R (x) s), against the reference g_R (x) g_S.

#include "thermoflow/error.hpp"
#include "thermoflow/lorenz.hpp"
#include "thermoflow/simplex.hpp"
#include "thermoflow/theory.hpp"
#include "thermoflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace thermoflow {

template <typename Scalar = double>
struct ConversionQuery {
  QuasiclassicalState<Scalar> source;
  QuasiclassicalState<Scalar> target;
  TheoryContext<Scalar> ctx;
};

template <typename Scalar = double>
struct WitnessMatrix {
  Matrix<Scalar> entries;  // d_out x d_in, acts on column probability vectors
};

/// Size cap of the linear-programming paths, per side of the query.
struct OracleLimits {
  Index max_side_dim = 12;
};

/// Source, target and reference vectors of the equimajorization problem.
template <typename Scalar = double>
struct EquimajorizationProblem {
  Vector<Scalar> from;
  Vector<Scalar> to;
  Vector<Scalar> reference;
  bool composed = false;
};

template <typename Scalar>
bool shares_operators(const SystemSpec<Scalar>& a, const SystemSpec<Scalar>& b) {
  return a.dim() == b.dim() && a.operators() == b.operators();
}

namespace detail {

template <typename Scalar>
void require_valid(const ConversionQuery<Scalar>& q) {
  try {
    q.source.spec().require_compatible(q.ctx);
    q.target.spec().require_compatible(q.ctx);
  } catch (const Error& e) {
    throw Error(ErrorCode::ContextMismatch, e.what());
  }
  if (q.source.spec().labels() != q.target.spec().labels()) {
    throw Error(ErrorCode::ContextMismatch, "source and target carry different state-operator labels");
  }
}

template <typename Scalar>
void require_size(const ConversionQuery<Scalar>& q, const OracleLimits& limits) {
  const Index largest = std::max(q.source.dim(), q.target.dim());
  if (largest > limits.max_side_dim) {
    throw Error(ErrorCode::TooLarge, "dimension " + std::to_string(largest) + " exceeds the oracle cap of " +
                                         std::to_string(limits.max_side_dim));
  }
}

/// The padded pair (R + G_S, G_R + S), both over the composed system.
template <typename Scalar>
std::pair<QuasiclassicalState<Scalar>, QuasiclassicalState<Scalar>> padded_pair(const ConversionQuery<Scalar>& q) {
  const auto g_source = gibbs_state(q.source.spec(), q.ctx);
  const auto g_target = gibbs_state(q.target.spec(), q.ctx);
  try {
    return {compose(q.source, g_target), compose(g_source, q.target)};
  } catch (const Error& e) {
    throw Error(ErrorCode::ContextMismatch, e.what());
  }
}

}  // namespace detail

template <typename Scalar>
EquimajorizationProblem<Scalar> equimajorization_problem(const ConversionQuery<Scalar>& q) {
  detail::require_valid(q);
  if (shares_operators(q.source.spec(), q.target.spec())) {
    return {q.source.r(), q.target.r(), gibbs_vector(q.source.spec(), q.ctx), false};
  }
  const auto [from, to] = detail::padded_pair(q);
  return {from.r(), to.r(), gibbs_vector(from.spec(), q.ctx), true};
}

/// Lorenz-curve verdict on whether an equilibrating operation maps source to target.
template <typename Scalar>
bool can_convert(const ConversionQuery<Scalar>& q) {
  detail::require_valid(q);
  if (shares_operators(q.source.spec(), q.target.spec())) {
    return dominates(build_curve(q.source, q.ctx), build_curve(q.target, q.ctx));
  }
  const auto [from, to] = detail::padded_pair(q);
  return dominates(build_curve(from, q.ctx), build_curve(to, q.ctx));
}

/// Same verdict, always through the padded construction (also for shared operators).
template <typename Scalar>
bool can_convert_composed(const ConversionQuery<Scalar>& q) {
  detail::require_valid(q);
  const auto [from, to] = detail::padded_pair(q);
  return dominates(build_curve(from, q.ctx), build_curve(to, q.ctx));
}

template <typename Scalar>
bool is_valid_witness(const Matrix<Scalar>& m, const EquimajorizationProblem<Scalar>& p,
                      Scalar tol = Tolerance<Scalar>::feasibility) {
  if (m.rows() != p.to.size() || m.cols() != p.from.size()) return false;
  if (m.minCoeff() < -tol || m.maxCoeff() > 1 + tol) return false;
  if (((m.colwise().sum().array() - 1).abs() > tol).any()) return false;
  if (((m * p.reference - p.reference).array().abs() > tol).any()) return false;
  return !((m * p.from - p.to).array().abs() > tol).any();
}

namespace detail {

/// Equality rows for the variables vec(M) (column-major, M(i, j) at j * D + i):
/// unit column sums, M g = g, and M r = s.
template <typename Scalar>
void stochastic_rows(const EquimajorizationProblem<Scalar>& p, Index extra_cols, Matrix<Scalar>& a,
                     Vector<Scalar>& b) {
  const Index n = p.from.size();
  a.setZero(3 * n, n * n + extra_cols);
  b.setZero(3 * n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index var = j * n + i;
      a(j, var) = 1;
      a(n + i, var) = p.reference(j);
      a(2 * n + i, var) = p.from(j);
    }
    b(j) = 1;
  }
  b.segment(n, n) = p.reference;
  b.segment(2 * n, n) = p.to;
}

}  // namespace detail

/// Solves the linear feasibility problem behind equimajorization. Among all
/// witnesses it returns one of largest trace (identity when source == target).
template <typename Scalar>
std::optional<WitnessMatrix<Scalar>> feasibility_oracle(const ConversionQuery<Scalar>& q,
                                                        const OracleLimits& limits = {}) {
  detail::require_valid(q);
  detail::require_size(q, limits);
  const auto problem = equimajorization_problem(q);
  const Index n = problem.from.size();

  Matrix<Scalar> a;
  Vector<Scalar> b;
  detail::stochastic_rows(problem, 0, a, b);
  Vector<Scalar> cost = Vector<Scalar>::Zero(n * n);
  for (Index i = 0; i < n; ++i) cost(i * n + i) = -1;

  const auto result = solve_lp(a, b, cost);
  if (result.status != LpStatus::optimal) return std::nullopt;
  WitnessMatrix<Scalar> witness{Matrix<Scalar>(n, n)};
  for (Index j = 0; j < n; ++j) witness.entries.col(j) = result.x.segment(j * n, n);
  return witness;
}

/// min over equistochastic M of (1/2) || M r - s ||_1, in [0, 1].
template <typename Scalar>
Scalar smallest_epsilon(const ConversionQuery<Scalar>& q, const OracleLimits& limits = {}) {
  detail::require_valid(q);
  detail::require_size(q, limits);
  const auto problem = equimajorization_problem(q);
  const Index n = problem.from.size();

  // Extra variables u, v >= 0 with M r - u + v = s; minimize (1/2) sum(u + v).
  Matrix<Scalar> a;
  Vector<Scalar> b;
  detail::stochastic_rows(problem, 2 * n, a, b);
  for (Index i = 0; i < n; ++i) {
    a(2 * n + i, n * n + i) = -1;
    a(2 * n + i, n * n + n + i) = 1;
  }
  Vector<Scalar> cost = Vector<Scalar>::Zero(n * n + 2 * n);
  cost.tail(2 * n).setConstant(Scalar(0.5));

  const auto result = solve_lp(a, b, cost);
  if (result.status != LpStatus::optimal) {
    // M = g 1^T is always feasible, so this signals numerical breakdown.
    throw Error(ErrorCode::InvalidValue, "distance program failed to solve");
  }
  return std::clamp(result.objective, Scalar(0), Scalar(1));
}

}  // namespace thermoflow
