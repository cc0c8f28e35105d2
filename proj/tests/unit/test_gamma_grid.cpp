#include <cmath>
#include <limits>

#include "doctest.h"
#include "fracnoether/error.hpp"
#include "fracnoether/gamma.hpp"
#include "fracnoether/grid.hpp"
#include "oracles.hpp"

using namespace fracnoether;

TEST_CASE("gamma matches the Boost reference on (0, 10]") {
  for (double x = 0.05; x <= 10.0; x += 0.05) {
    const double ref = boost::math::tgamma(x);
    CHECK(std::abs(gamma_fn(x) - ref) <= 1e-13 * std::abs(ref));
  }
}

TEST_CASE("gamma reflection for negative non-integers") {
  for (double x : {-0.5, -1.5, -2.25, -3.7}) {
    const double ref = boost::math::tgamma(x);
    CHECK(std::abs(gamma_fn(x) - ref) <= 1e-12 * std::abs(ref));
  }
}

TEST_CASE("reciprocal gamma vanishes at the poles") {
  for (double x : {0.0, -1.0, -2.0, -5.0}) CHECK(reciprocal_gamma(x) == 0.0);
  CHECK(reciprocal_gamma(0.5) == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
}

TEST_CASE("grid construction rejects degenerate input") {
  CHECK_THROWS_AS(Grid(0.0, 1.0, 1), InputError);
  CHECK_THROWS_AS(Grid(1.0, 1.0, 8), InputError);
  CHECK_THROWS_AS(Grid(0.0, std::numeric_limits<double>::infinity(), 8), InputError);
  CHECK_THROWS_AS(GridFunction(Grid(0.0, 1.0, 4), 0), InputError);
  const Grid g(0.0, 2.0, 4);
  CHECK(g.step() == 0.5);
  CHECK(g.node(4) == 2.0);
}

TEST_CASE("trapezoid integrates linear functions exactly and skips flagged nodes") {
  const Grid g(0.0, 1.0, 10);
  std::vector<double> v(11);
  for (std::size_t i = 0; i <= 10; ++i) v[i] = 3.0 * g.node(i) + 1.0;
  CHECK(trapezoid(g, v) == doctest::Approx(2.5).epsilon(1e-15));
  v[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK(std::isfinite(trapezoid(g, v)));
}

TEST_CASE("non-finite samples are rejected on input") {
  GridFunction f(Grid(0.0, 1.0, 4), 1);
  f(2) = std::numeric_limits<double>::quiet_NaN();
  CHECK(f.flagged(2));
  CHECK_THROWS_AS(f.require_finite("test"), InputError);
}
