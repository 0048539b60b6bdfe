#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

#include <cmath>
#include <limits>

using namespace thermoflow;
using namespace thermoflow::testing;

using Mat = Matrix<double>;

namespace {

// Brute force: optimum over all basic feasible solutions.
double best_vertex(const Mat& a, const Vec& b, const Vec& c) {
  const Index m = a.rows();
  const Index n = a.cols();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> pick(static_cast<std::size_t>(m));
  auto recurse = [&](auto&& self, Index pos, Index start) -> void {
    if (pos == m) {
      Mat basis(m, m);
      for (Index k = 0; k < m; ++k) basis.col(k) = a.col(pick[static_cast<std::size_t>(k)]);
      Eigen::FullPivLU<Mat> lu(basis);
      if (lu.rank() < m) return;
      const Vec xb = lu.solve(b);
      if (xb.minCoeff() < -1e-12) return;
      double value = 0;
      for (Index k = 0; k < m; ++k) value += c(pick[static_cast<std::size_t>(k)]) * xb(k);
      best = std::min(best, value);
      return;
    }
    for (Index j = start; j < n; ++j) {
      pick[static_cast<std::size_t>(pos)] = j;
      self(self, pos + 1, j + 1);
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("textbook program") {
  // min -x1 - 2 x2  s.t.  x1 + x2 <= 4,  x1 + 3 x2 <= 6; optimum at (3, 1).
  Mat a(2, 4);
  a << 1, 1, 1, 0, 1, 3, 0, 1;
  const auto result = solve_lp<double>(a, vec({4, 6}), vec({-1, -2, 0, 0}));
  REQUIRE(result.status == LpStatus::optimal);
  CHECK(result.objective == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(result.x(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(result.x(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("infeasible and unbounded programs") {
  Mat a(1, 2);
  a << 1, 1;
  CHECK(solve_lp<double>(a, vec({-1}), vec({0, 0})).status == LpStatus::infeasible);

  Mat b(1, 2);
  b << 1, -1;
  CHECK(solve_lp<double>(b, vec({0}), vec({-1, 0})).status == LpStatus::unbounded);
}

TEST_CASE("redundant equality rows are dropped") {
  Mat a(3, 2);
  a << 1, 1, 2, 2, 3, 3;
  const auto result = solve_lp<double>(a, vec({1, 2, 3}), vec({1, 0}));
  REQUIRE(result.status == LpStatus::optimal);
  CHECK(result.objective == doctest::Approx(0.0));
  CHECK(result.x(1) == doctest::Approx(1.0));
}

TEST_CASE("Beale's cycling example terminates under Bland's rule") {
  Mat a(3, 7);
  a << 0.25, -8, -1, 9, 1, 0, 0,  //
      0.5, -12, -0.5, 3, 0, 1, 0,  //
      0, 0, 1, 0, 0, 0, 1;
  const Vec b = vec({0, 0, 1});
  const Vec c = vec({-0.75, 20, -0.5, 6, 0, 0, 0});
  const auto result = solve_lp<double>(a, b, c);
  REQUIRE(result.status == LpStatus::optimal);
  CHECK(result.objective == doctest::Approx(best_vertex(a, b, c)).epsilon(1e-12));
}

TEST_CASE("random bounded programs match vertex enumeration") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 2 + trial % 3;
    const Index n = m + 3;
    Mat a(m, n);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) a(i, j) = u(rng);
    }
    const Vec x0 = random_values(rng, n, 0.0, 1.0);
    const Vec b = a * x0;
    const Vec c = random_values(rng, n, 0.0, 1.0);
    const auto result = solve_lp<double>(a, b, c);
    REQUIRE(result.status == LpStatus::optimal);
    CHECK((a * result.x - b).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(result.x.minCoeff() >= -1e-12);
    CHECK(result.objective == doctest::Approx(best_vertex(a, b, c)).epsilon(1e-9));
  }
}
