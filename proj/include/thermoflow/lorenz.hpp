#pragma once

// Rescaled Lorenz curves. Eigenstates are sorted by decreasing r_a / w_a with
// w_a = exp(-a_a) the unnormalized free weight; the curve joins P_0 = (0, 0)
// and P_m = (sum_{a<=m} w_a, sum_{a<=m} r_a). It ends at (Z, 1) and is concave.

#include "thermoflow/error.hpp"
#include "thermoflow/theory.hpp"
#include "thermoflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <vector>

namespace thermoflow {

template <typename Scalar = double>
struct LorenzCurve {
  Vector<Scalar> x;  // d + 1 breakpoints, x(0) = 0
  Vector<Scalar> y;
  std::vector<Index> source_order;

  Scalar width() const { return x(x.size() - 1); }
  Index breakpoints() const { return x.size(); }
};

template <typename Scalar>
LorenzCurve<Scalar> build_curve(const QuasiclassicalState<Scalar>& state, const TheoryContext<Scalar>& ctx) {
  const Index d = state.dim();
  const Vector<Scalar> a = state.spec().exponents(ctx);
  const Vector<Scalar>& r = state.r();

  // ln(r_a / w_a) = ln r_a + a_a; empty support sorts last.
  std::vector<Scalar> key(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) {
    key[static_cast<std::size_t>(k)] =
        r(k) > Scalar(0) ? std::log(r(k)) + a(k) : -std::numeric_limits<Scalar>::infinity();
  }
  LorenzCurve<Scalar> curve;
  curve.source_order.resize(static_cast<std::size_t>(d));
  std::iota(curve.source_order.begin(), curve.source_order.end(), Index{0});
  std::stable_sort(curve.source_order.begin(), curve.source_order.end(), [&](Index lhs, Index rhs) {
    return key[static_cast<std::size_t>(lhs)] > key[static_cast<std::size_t>(rhs)];
  });

  curve.x.setZero(d + 1);
  curve.y.setZero(d + 1);
  for (Index m = 0; m < d; ++m) {
    const Index src = curve.source_order[static_cast<std::size_t>(m)];
    curve.x(m + 1) = curve.x(m) + std::exp(-a(src));
    curve.y(m + 1) = curve.y(m) + r(src);
  }
  return curve;
}

/// Piecewise-linear interpolation; x may overshoot [0, Z] by the curve tolerance.
template <typename Scalar>
Scalar evaluate(const LorenzCurve<Scalar>& curve, Scalar x) {
  const Scalar width = curve.width();
  const Scalar slack = Tolerance<Scalar>::curve * std::max(Scalar(1), width);
  if (!(x >= -slack && x <= width + slack)) {
    throw Error(ErrorCode::OutOfDomain, "x = " + std::to_string(static_cast<double>(x)) + " outside [0, " +
                                            std::to_string(static_cast<double>(width)) + "]");
  }
  if (x <= 0) return Scalar(0);
  if (x >= width) return curve.y(curve.y.size() - 1);
  const auto* begin = curve.x.data();
  const auto* end = begin + curve.x.size();
  const Index hi = std::upper_bound(begin, end, x) - begin;  // x(hi-1) <= x < x(hi)
  const Index lo = hi - 1;
  const Scalar t = (x - curve.x(lo)) / (curve.x(hi) - curve.x(lo));
  return curve.y(lo) + t * (curve.y(hi) - curve.y(lo));
}

template <typename Scalar = double>
struct DominanceReport {
  bool dominates;
  /// min over all breakpoints of A(x) - B(x).
  Scalar min_margin;
  /// Some interior breakpoint has |A(x) - B(x)| within the feasibility tolerance.
  /// The endpoints are excluded: every pair of curves meets there.
  bool near_tie;
};

template <typename Scalar>
DominanceReport<Scalar> compare_curves(const LorenzCurve<Scalar>& a, const LorenzCurve<Scalar>& b) {
  const Scalar wa = a.width();
  const Scalar wb = b.width();
  if (std::abs(wa - wb) > Tolerance<Scalar>::feasibility * std::max(Scalar(1), std::max(wa, wb))) {
    throw Error(ErrorCode::WidthMismatch, "curves span different widths " + std::to_string(static_cast<double>(wa)) +
                                              " and " + std::to_string(static_cast<double>(wb)));
  }
  const Scalar common = std::min(wa, wb);
  Scalar margin = std::numeric_limits<Scalar>::infinity();
  Scalar interior = std::numeric_limits<Scalar>::infinity();
  auto probe = [&](Scalar x, bool endpoint) {
    x = std::min(x, common);
    const Scalar m = evaluate(a, x) - evaluate(b, x);
    margin = std::min(margin, m);
    if (!endpoint) interior = std::min(interior, std::abs(m));
  };
  for (Index k = 0; k < a.x.size(); ++k) probe(a.x(k), k == 0 || k + 1 == a.x.size());
  for (Index k = 0; k < b.x.size(); ++k) probe(b.x(k), k == 0 || k + 1 == b.x.size());
  return {margin >= -Tolerance<Scalar>::curve, margin, interior <= Tolerance<Scalar>::feasibility};
}

/// A(x) >= B(x) everywhere on the common domain, up to the curve tolerance.
template <typename Scalar>
bool dominates(const LorenzCurve<Scalar>& a, const LorenzCurve<Scalar>& b) {
  return compare_curves(a, b).dominates;
}

/// CSV with header `x,y` and 17 significant digits per value.
template <typename Scalar>
void write_csv(std::ostream& os, const LorenzCurve<Scalar>& curve) {
  os << "x,y\n";
  char buf[64];
  for (Index k = 0; k < curve.x.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", static_cast<double>(curve.x(k)), static_cast<double>(curve.y(k)));
    os << buf;
  }
}

}  // namespace thermoflow
