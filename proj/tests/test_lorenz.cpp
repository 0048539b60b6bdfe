#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace thermoflow;
using namespace thermoflow::testing;

namespace {

State entropy_state(const Vec& r) { return State(bare_spec(r.size()), r); }

}  // namespace

TEST_CASE("free-state curve is the straight chord") {
  const auto spec = grand_spec(vec({0.0, 0.4, 1.3, 0.2}), vec({0, 1, 2, 1}));
  const auto ctx = grand(1.2, 0.3);
  const auto curve = build_curve(gibbs_state(spec, ctx), ctx);
  const double z = partition_function(spec, ctx);
  CHECK(curve.width() == doctest::Approx(z).epsilon(1e-14));
  for (Index k = 0; k < curve.breakpoints(); ++k) CHECK(std::abs(curve.y(k) - curve.x(k) / z) <= 1e-14);
}

TEST_CASE("entropy-theory curves") {
  const auto pure = build_curve(entropy_state(vec({1.0, 0.0})), entropy_ctx());
  CHECK(max_abs_diff(pure.x, vec({0, 1, 2})) == 0.0);
  CHECK(max_abs_diff(pure.y, vec({0, 1, 1})) == 0.0);

  const auto flipped = build_curve(entropy_state(vec({0.0, 1.0})), entropy_ctx());
  CHECK(max_abs_diff(flipped.y, vec({0, 1, 1})) == 0.0);
  CHECK(flipped.source_order == std::vector<Index>{1, 0});

  const auto uniform = build_curve(entropy_state(vec({0.5, 0.5})), entropy_ctx());
  CHECK(max_abs_diff(uniform.y, vec({0, 0.5, 1})) == 0.0);
  // Ties keep the original order.
  CHECK(uniform.source_order == std::vector<Index>{0, 1});
}

TEST_CASE("evaluate") {
  const auto pure = build_curve(entropy_state(vec({1.0, 0.0})), entropy_ctx());
  CHECK(evaluate(pure, 0.0) == 0.0);
  CHECK(evaluate(pure, 2.0) == 1.0);
  CHECK(evaluate(pure, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(evaluate(pure, 1.5) == 1.0);
  CHECK(evaluate(pure, 2.0 + 1e-13) == 1.0);
  try {
    evaluate(pure, 2.1);
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
  CHECK_THROWS_AS(evaluate(pure, -0.01), Error);
}

TEST_CASE("domination") {
  const auto a = build_curve(entropy_state(vec({0.9, 0.1})), entropy_ctx());
  const auto b = build_curve(entropy_state(vec({0.7, 0.3})), entropy_ctx());
  CHECK(dominates(a, a));
  CHECK(dominates(a, b));
  CHECK_FALSE(dominates(b, a));

  const auto report = compare_curves(b, a);
  CHECK(report.min_margin == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK_FALSE(report.near_tie);
  CHECK(compare_curves(a, a).near_tie);

  const auto wide = build_curve(entropy_state(vec({0.5, 0.3, 0.2})), entropy_ctx());
  try {
    dominates(a, wide);
    FAIL("expected WidthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WidthMismatch);
  }
}

TEST_CASE("curve invariants on random states") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto theory = random_theory(rng, trial);
    const Index d = 2 + trial % 5;
    const auto spec = random_spec(rng, theory.labels, d);
    const State state(spec, random_distribution(rng, d, 0.25));
    const auto curve = build_curve(state, theory.ctx);

    CHECK(std::abs(curve.width() - partition_function(spec, theory.ctx)) <= 1e-10);
    CHECK(std::abs(curve.y(d) - 1.0) <= 1e-12);
    Vec slopes(d);
    for (Index m = 0; m < d; ++m) {
      CHECK(curve.x(m + 1) > curve.x(m));
      CHECK(curve.y(m + 1) >= curve.y(m));
      slopes(m) = (curve.y(m + 1) - curve.y(m)) / (curve.x(m + 1) - curve.x(m));
    }
    for (Index m = 1; m < d; ++m) CHECK(slopes(m) <= slopes(m - 1) * (1 + 1e-12) + 1e-15);

    // Above its own free-state chord; the chord dominates back only at equilibrium.
    const auto chord = build_curve(gibbs_state(spec, theory.ctx), theory.ctx);
    CHECK(dominates(curve, chord));
    CHECK_FALSE(dominates(chord, curve));

    // Relabeling the eigenbasis leaves the curve unchanged (breakpoints inside
    // equal-ratio runs may reorder, the shape may not).
    std::vector<Index> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto relabeled = build_curve(state.permuted(perm), theory.ctx);
    CHECK(std::abs(relabeled.width() - curve.width()) <= 1e-12);
    for (Index k = 0; k <= d; ++k) {
      CHECK(std::abs(evaluate(relabeled, curve.x(k)) - curve.y(k)) <= 1e-12);
      CHECK(std::abs(evaluate(curve, relabeled.x(k)) - relabeled.y(k)) <= 1e-12);
    }
  }
}

TEST_CASE("CSV emitter") {
  std::ostringstream os;
  write_csv(os, build_curve(entropy_state(vec({1.0, 0.0})), entropy_ctx()));
  CHECK(os.str() == "x,y\n0,0\n1,1\n2,1\n");

  std::ostringstream thirds;
  write_csv(thirds, build_curve(entropy_state(vec({2.0 / 3.0, 1.0 / 3.0})), entropy_ctx()));
  CHECK(thirds.str() == "x,y\n0,0\n1,0.66666666666666663\n2,1\n");
}
