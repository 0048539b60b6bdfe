#pragma once

// Many-copy limits: the free-energy form of D(r || g_R) / beta, per-copy
// hypothesis-testing entropies of i.i.d. powers, asymptotic conversion rates
// and the finite-n gap between work yield and work cost.

#include "thermoflow/error.hpp"
#include "thermoflow/oneshot.hpp"
#include "thermoflow/tensor_power.hpp"
#include "thermoflow/theory.hpp"
#include "thermoflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace thermoflow {

/// <H>_r - T S(r) - sum_i p_i <X_i>_r + T ln Z, which equals D(r || g_R) / beta.
template <typename Scalar>
Scalar free_energy_rate(const QuasiclassicalState<Scalar>& state, const TheoryContext<Scalar>& ctx) {
  ctx.require_energy();
  state.spec().require_compatible(ctx);
  const Scalar t = ctx.temperature();
  const auto& ops = state.spec().operators();
  const auto& r = state.r();
  Scalar rate = ops[0].eigenvalues.dot(r) - t * shannon_entropy(r);
  for (std::size_t i = 0; i < ctx.intensive().size(); ++i) {
    rate -= ctx.intensive()[i].value * ops[i + 1].eigenvalues.dot(r);
  }
  return rate + t * log_partition_function(state.spec(), ctx);
}

/// D(r || g_R) of a state against its own free state.
template <typename Scalar>
Scalar nonequilibrium(const QuasiclassicalState<Scalar>& state, const TheoryContext<Scalar>& ctx) {
  return relative_entropy(state.r(), gibbs_vector(state.spec(), ctx));
}

template <typename Scalar = double>
struct AepRow {
  int n;
  Scalar per_copy_dh;
};

template <typename Scalar = double>
struct AepSweep {
  Scalar epsilon;
  std::vector<AepRow<Scalar>> rows;
  Scalar limit;
};

/// D_H^eps(r^{(x)n} || g^{(x)n}) via type-class compression.
template <typename Scalar>
Scalar d_h_power(const Vector<Scalar>& r, const Vector<Scalar>& g, Scalar epsilon, int copies,
                 double cap = kDefaultTypeClassCap) {
  detail::require_half_open_epsilon(epsilon);
  const auto compressed = tensor_power_compressed(r, g, copies, cap);
  return TypeTwoErrorProfile<Scalar>::from_compressed(compressed).d_h(epsilon);
}

template <typename Scalar>
AepSweep<Scalar> aep_sweep(const QuasiclassicalState<Scalar>& state, const TheoryContext<Scalar>& ctx, Scalar epsilon,
                           std::vector<int> copies, double cap = kDefaultTypeClassCap) {
  detail::require_open_epsilon(epsilon);
  std::sort(copies.begin(), copies.end());
  copies.erase(std::unique(copies.begin(), copies.end()), copies.end());
  const Vector<Scalar> g = gibbs_vector(state.spec(), ctx);
  AepSweep<Scalar> sweep{epsilon, {}, relative_entropy(state.r(), g)};
  for (int n : copies) {
    sweep.rows.push_back({n, d_h_power(state.r(), g, epsilon, n, cap) / Scalar(n)});
  }
  return sweep;
}

/// Optimal asymptotic rate D(r || g_R) / D(s || g_S).
template <typename Scalar>
Scalar conversion_rate(const QuasiclassicalState<Scalar>& source, const QuasiclassicalState<Scalar>& target,
                       const TheoryContext<Scalar>& ctx) {
  const Scalar denominator = nonequilibrium(target, ctx);
  if (!(denominator > Scalar(1e-12))) {
    throw Error(ErrorCode::TargetIsEquilibrium, "target carries no resource, the rate is unbounded");
  }
  return nonequilibrium(source, ctx) / denominator;
}

template <typename Scalar = double>
struct GapReport {
  int n;
  Scalar gain;
  CostBounds<Scalar> cost;
};

/// Work yield and cost bounds of n copies, as totals.
template <typename Scalar>
GapReport<Scalar> finite_n_gap(const QuasiclassicalState<Scalar>& state, const TheoryContext<Scalar>& ctx,
                               Scalar epsilon, int copies, double cap = kDefaultTypeClassCap,
                               int grid = kDefaultDeltaGrid) {
  const Scalar beta = detail::beta_of(ctx);
  detail::require_open_epsilon(epsilon);
  const auto compressed = tensor_power_compressed(state, ctx, copies, cap);
  const auto profile = TypeTwoErrorProfile<Scalar>::from_compressed(compressed);
  auto d_h = [&](Scalar e) { return profile.d_h(e); };
  return {copies, d_h(epsilon) / beta, detail::cost_bounds(d_h, beta, epsilon, grid)};
}

}  // namespace thermoflow
