#pragma once

// One-shot quantities: the optimal Type-II error b_eps(r || g) of a
// commuting hypothesis test, D_H^eps = -ln b_eps, Shannon and relative
// entropies, and the work yield / cost bounds built on them.
//
// For diagonal r and g the test program
//     min sum_a q_a g_a  s.t.  sum_a q_a r_a >= 1 - eps,  0 <= q <= 1
// is a fractional knapsack: fill q = 1 in order of decreasing r_a / g_a and
// stop with at most one fractional entry.

#include "thermoflow/convertibility.hpp"
#include "thermoflow/error.hpp"
#include "thermoflow/tensor_power.hpp"
#include "thermoflow/theory.hpp"
#include "thermoflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace thermoflow {

template <typename Scalar = double>
class HypothesisTest {
 public:
  HypothesisTest(Vector<Scalar> r, Vector<Scalar> g, Scalar epsilon)
      : r_(normalized(std::move(r))), g_(normalized(std::move(g))), epsilon_(epsilon) {
    if (r_.size() != g_.size()) throw Error(ErrorCode::DimensionMismatch, "r and g differ in length");
    if (!(epsilon_ >= 0 && epsilon_ < 1)) {
      throw Error(ErrorCode::EpsilonOutOfRange, "epsilon must lie in [0, 1)");
    }
  }

  const Vector<Scalar>& r() const { return r_; }
  const Vector<Scalar>& g() const { return g_; }
  Scalar epsilon() const { return epsilon_; }

 private:
  static Vector<Scalar> normalized(Vector<Scalar> v) {
    if (v.size() == 0 || !v.allFinite() || (v.array() < 0).any()) {
      throw Error(ErrorCode::InvalidValue, "distribution must be nonempty, finite and nonnegative");
    }
    const Scalar total = v.sum();
    if (std::abs(total - 1) > Tolerance<Scalar>::renormalize) {
      throw Error(ErrorCode::NotNormalized, "distribution sums to " + std::to_string(static_cast<double>(total)));
    }
    return v / total;
  }

  Vector<Scalar> r_;
  Vector<Scalar> g_;
  Scalar epsilon_;
};

/// Greedy solution of the test program over weighted classes, sorted once and
/// queried for any epsilon. A class bundles eigenstates that share the ratio
/// r/g; it is described by its total r-mass and the log of its total g-mass.
template <typename Scalar = double>
class TypeTwoErrorProfile {
 public:
  /// Residual Type-I requirement treated as met.
  static constexpr Scalar kSlack = Scalar(1e-14);

  TypeTwoErrorProfile(const std::vector<Scalar>& log_r_mass, const std::vector<Scalar>& log_g_mass) {
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < log_r_mass.size(); ++k) {
      if (log_r_mass[k] > -std::numeric_limits<Scalar>::infinity()) order.push_back(k);  // r = 0 never helps
    }
    // Decreasing ln(r/g); g = 0 first. Ties keep the lower index first.
    auto key = [&](std::size_t k) { return log_r_mass[k] - log_g_mass[k]; };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });

    cum_log_g_.reserve(order.size() + 1);
    cum_log_g_.push_back(-std::numeric_limits<Scalar>::infinity());
    for (std::size_t k : order) {
      r_mass_.push_back(std::exp(log_r_mass[k]));
      log_g_.push_back(log_g_mass[k]);
      cum_log_g_.push_back(log_add_exp(cum_log_g_.back(), log_g_.back()));
    }
    // Rejected mass is summed from the tail, where the small terms live.
    tail_r_.assign(r_mass_.size() + 1, Scalar(0));
    for (std::size_t k = r_mass_.size(); k-- > 0;) tail_r_[k] = tail_r_[k + 1] + r_mass_[k];
  }

  static TypeTwoErrorProfile from_distributions(const Vector<Scalar>& r, const Vector<Scalar>& g) {
    std::vector<Scalar> lr(static_cast<std::size_t>(r.size()));
    std::vector<Scalar> lg(static_cast<std::size_t>(g.size()));
    for (Index k = 0; k < r.size(); ++k) {
      lr[static_cast<std::size_t>(k)] = std::log(r(k));
      lg[static_cast<std::size_t>(k)] = std::log(g(k));
    }
    return TypeTwoErrorProfile(lr, lg);
  }

  static TypeTwoErrorProfile from_compressed(const CompressedState<Scalar>& state) {
    std::vector<Scalar> lr;
    std::vector<Scalar> lg;
    for (const auto& atom : state.atoms) {
      lr.push_back(atom.log_r_mass());
      lg.push_back(atom.log_g_mass());
    }
    return TypeTwoErrorProfile(lr, lg);
  }

  /// ln b_eps. Returns -inf when the requirement is met by g-free classes alone.
  Scalar log_b(Scalar epsilon) const {
    // The accepted classes form a prefix; the rest may carry at most epsilon of r.
    const Scalar allowed = epsilon + kSlack;
    const auto it = std::partition_point(tail_r_.begin(), tail_r_.end(), [&](Scalar t) { return t > allowed; });
    const auto full = static_cast<std::size_t>(it - tail_r_.begin());
    if (full == 0) return -std::numeric_limits<Scalar>::infinity();
    // Classes [0, full - 1) are taken whole, class full - 1 possibly in part.
    const std::size_t last = full - 1;
    const Scalar missing = tail_r_[last] - epsilon;
    if (missing <= kSlack) return cum_log_g_[last];
    const Scalar fraction = std::min(Scalar(1), missing / r_mass_[last]);
    return log_add_exp(cum_log_g_[last], log_g_[last] + std::log(fraction));
  }

  /// -ln b_eps, as +0 rather than -0 when b = 1.
  Scalar d_h(Scalar epsilon) const { return Scalar(0) - log_b(epsilon); }

 private:
  std::vector<Scalar> r_mass_;
  std::vector<Scalar> log_g_;
  std::vector<Scalar> tail_r_;     // tail_r_[k] = r-mass of classes k and later
  std::vector<Scalar> cum_log_g_;  // ln of the g-mass of the first k classes
};

template <typename Scalar>
Scalar b_epsilon(const HypothesisTest<Scalar>& t) {
  return std::exp(TypeTwoErrorProfile<Scalar>::from_distributions(t.r(), t.g()).log_b(t.epsilon()));
}

/// D_H^eps(r || g) = -ln b_eps(r || g).
template <typename Scalar>
Scalar d_h_epsilon(const HypothesisTest<Scalar>& t) {
  return TypeTwoErrorProfile<Scalar>::from_distributions(t.r(), t.g()).d_h(t.epsilon());
}

/// Exact optimum of the test program by enumerating its vertices: every
/// vertex has q in {0, 1} except for at most one coordinate that makes the
/// Type-I constraint tight. Independent of the greedy ordering.
template <typename Scalar>
Scalar vertex_oracle(const HypothesisTest<Scalar>& t, Index max_dim = 18) {
  const Index d = t.r().size();
  if (d > max_dim) {
    throw Error(ErrorCode::TooLarge, "vertex enumeration limited to dimension " + std::to_string(max_dim));
  }
  const Scalar eps = t.epsilon();
  const auto& r = t.r();
  const auto& g = t.g();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  const std::uint64_t subsets = std::uint64_t{1} << d;
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    Scalar rejected = 0;
    Scalar gs = 0;
    for (Index k = 0; k < d; ++k) {
      if (mask >> k & 1U) {
        gs += g(k);
      } else {
        rejected += r(k);
      }
    }
    if (rejected <= eps + TypeTwoErrorProfile<Scalar>::kSlack) {
      best = std::min(best, gs);
      continue;
    }
    for (Index f = 0; f < d; ++f) {
      if ((mask >> f & 1U) || r(f) <= 0) continue;
      const Scalar q = (rejected - eps) / r(f);
      if (q <= 1) best = std::min(best, gs + q * g(f));
    }
  }
  return best;
}

template <typename Scalar>
Scalar shannon_entropy(const Vector<Scalar>& r) {
  Scalar s = 0;
  for (Index k = 0; k < r.size(); ++k) {
    if (r(k) > 0) s -= r(k) * std::log(r(k));
  }
  return s;
}

/// D(r || g) in nats; +inf when supp(r) is not inside supp(g).
template <typename Scalar>
Scalar relative_entropy(const Vector<Scalar>& r, const Vector<Scalar>& g) {
  if (r.size() != g.size()) throw Error(ErrorCode::DimensionMismatch, "r and g differ in length");
  Scalar d = 0;
  for (Index k = 0; k < r.size(); ++k) {
    if (r(k) <= 0) continue;
    if (g(k) <= 0) return std::numeric_limits<Scalar>::infinity();
    d += r(k) * (std::log(r(k)) - std::log(g(k)));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Work.

template <typename Scalar = double>
struct CostBounds {
  Scalar lower;
  Scalar upper;
};

template <typename Scalar = double>
struct WorkReport {
  Scalar epsilon;
  Scalar w_gain;
  /// Present only for epsilon in (0, 1), where both bounds are finite.
  std::optional<Scalar> w_cost_lower;
  std::optional<Scalar> w_cost_upper;
};

inline constexpr int kDefaultDeltaGrid = 512;

namespace detail {

template <typename Scalar>
Scalar beta_of(const TheoryContext<Scalar>& ctx) {
  ctx.require_energy();
  return *ctx.beta();
}

template <typename Scalar>
void require_open_epsilon(Scalar epsilon) {
  if (!(epsilon > 0 && epsilon < 1)) throw Error(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0, 1)");
}

template <typename Scalar>
void require_half_open_epsilon(Scalar epsilon) {
  if (!(epsilon >= 0 && epsilon < 1)) throw Error(ErrorCode::EpsilonOutOfRange, "epsilon must lie in [0, 1)");
}

/// Upper and lower work-cost bounds from a D_H^eps evaluator.
template <typename Scalar, typename DhFn>
CostBounds<Scalar> cost_bounds(DhFn&& d_h, Scalar beta, Scalar epsilon, int grid) {
  const Scalar upper = (d_h(1 - epsilon) - std::log((1 - epsilon) / epsilon)) / beta;
  // delta on a log-spaced grid over (0, 1 - eps], both ends included.
  const Scalar top = 1 - epsilon;
  const Scalar bottom = top * Scalar(1e-9);
  Scalar lower = -std::numeric_limits<Scalar>::infinity();
  for (int k = 0; k < grid; ++k) {
    const Scalar delta = k == grid - 1 ? top : bottom * std::pow(top / bottom, Scalar(k) / Scalar(grid - 1));
    const Scalar eps_test = std::max(Scalar(0), 1 - epsilon - delta);
    lower = std::max(lower, (d_h(eps_test) - std::log(1 / delta)) / beta);
  }
  return {lower, upper};
}

}  // namespace detail

/// W_gain^eps(R) = D_H^eps(r || g_R) / beta.
template <typename Scalar>
Scalar w_gain(const QuasiclassicalState<Scalar>& state, const TheoryContext<Scalar>& ctx, Scalar epsilon) {
  const Scalar beta = detail::beta_of(ctx);
  detail::require_half_open_epsilon(epsilon);
  return d_h_epsilon(HypothesisTest<Scalar>(state.r(), gibbs_vector(state.spec(), ctx), epsilon)) / beta;
}

/// Bounds on the least work needed to form a state epsilon-close to R.
template <typename Scalar>
CostBounds<Scalar> w_cost_bounds(const QuasiclassicalState<Scalar>& state, const TheoryContext<Scalar>& ctx,
                                 Scalar epsilon, int grid = kDefaultDeltaGrid) {
  const Scalar beta = detail::beta_of(ctx);
  detail::require_open_epsilon(epsilon);
  const auto profile = TypeTwoErrorProfile<Scalar>::from_distributions(state.r(), gibbs_vector(state.spec(), ctx));
  return detail::cost_bounds([&](Scalar e) { return profile.d_h(e); }, beta, epsilon, grid);
}

template <typename Scalar>
WorkReport<Scalar> work_report(const QuasiclassicalState<Scalar>& state, const TheoryContext<Scalar>& ctx,
                               Scalar epsilon, int grid = kDefaultDeltaGrid) {
  WorkReport<Scalar> report{epsilon, w_gain(state, ctx, epsilon), std::nullopt, std::nullopt};
  if (epsilon > 0) {
    const auto bounds = w_cost_bounds(state, ctx, epsilon, grid);
    report.w_cost_lower = bounds.lower;
    report.w_cost_upper = bounds.upper;
  }
  return report;
}

/// Nonuniformity ln d - S(r) of an entropy-theory state.
template <typename Scalar>
Scalar resource_yield(const QuasiclassicalState<Scalar>& state, const TheoryContext<Scalar>& ctx) {
  if (!ctx.is_entropy()) {
    throw Error(ErrorCode::EnergyRepresentation, "resource_yield applies to the entropy theory; use w_gain");
  }
  return std::log(Scalar(state.dim())) - shannon_entropy(state.r());
}

// ---------------------------------------------------------------------------
// Battery.

template <typename Scalar = double>
struct BatteryState {
  Scalar level_energy;
};

/// Two-level battery {E, E + W} carrying the same operator labels as `like`;
/// only the energy operator is nonzero.
template <typename Scalar>
SystemSpec<Scalar> battery_spec(const SystemSpec<Scalar>& like, Scalar level_energy, Scalar work) {
  std::vector<OperatorSpectrum<Scalar>> ops;
  for (std::size_t i = 0; i < like.operators().size(); ++i) {
    Vector<Scalar> v = Vector<Scalar>::Zero(2);
    if (i == 0) v << level_energy, level_energy + work;
    ops.push_back({like.operators()[i].label, std::move(v)});
  }
  std::vector<OperatorSpectrum<Scalar>> nonstate;
  for (const auto& block : like.nonstate()) nonstate.push_back({block.label, Vector<Scalar>::Zero(2)});
  return SystemSpec<Scalar>(2, std::move(ops), std::move(nonstate));
}

/// Whether W units of work can be stored from R into a battery at level E
/// with failure tolerance epsilon.
template <typename Scalar>
bool battery_extract_check(const QuasiclassicalState<Scalar>& state, const BatteryState<Scalar>& battery,
                           Scalar work, const TheoryContext<Scalar>& ctx, Scalar epsilon) {
  if (!std::isfinite(battery.level_energy) || !std::isfinite(work)) {
    throw Error(ErrorCode::InvalidValue, "battery level and work must be finite");
  }
  return work <= w_gain(state, ctx, epsilon) + Tolerance<Scalar>::feasibility;
}

/// Exact (epsilon = 0) check by convertibility: R + B_E -> B_{E+W}.
template <typename Scalar>
bool battery_extract_by_conversion(const QuasiclassicalState<Scalar>& state, const BatteryState<Scalar>& battery,
                                   Scalar work, const TheoryContext<Scalar>& ctx) {
  ctx.require_energy();
  const auto spec = battery_spec(state.spec(), battery.level_energy, work);
  Vector<Scalar> low(2);
  low << 1, 0;
  Vector<Scalar> high(2);
  high << 0, 1;
  const QuasiclassicalState<Scalar> charged(spec, high);
  return can_convert(ConversionQuery<Scalar>{compose(state, QuasiclassicalState<Scalar>(spec, low)), charged, ctx});
}

}  // namespace thermoflow
