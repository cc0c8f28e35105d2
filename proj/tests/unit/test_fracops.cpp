#include <cmath>
#include <random>

#include "doctest.h"
#include "fracnoether/error.hpp"
#include "fracnoether/fracops.hpp"
#include "oracles.hpp"

using namespace fracnoether;

namespace {

double max_err(const GridFunction& v, const std::function<double(double)>& exact, std::size_t first, std::size_t last) {
  double e = 0.0;
  for (std::size_t i = first; i <= last; ++i) e = std::max(e, std::abs(v(i) - exact(v.grid().node(i))));
  return e;
}

}  // namespace

TEST_CASE("left Caputo of (t-a)^2 converges at order 2 - alpha") {
  const double alpha = 0.5;
  const double c = boost::math::tgamma(3.0) / boost::math::tgamma(3.0 - alpha);
  std::vector<double> errs;
  for (std::size_t n : {64, 128, 256, 512}) {
    const Grid g(0.0, 1.0, n);
    const GridFunction d = caputo_left(GridFunction::sample(g, [](double t) { return t * t; }), alpha);
    errs.push_back(max_err(d, [&](double t) { return c * std::pow(t, 1.5); }, 0, n));
  }
  CHECK(errs.back() < 5e-3);
  for (std::size_t k = 1; k < errs.size(); ++k) {
    const double order = std::log2(errs[k - 1] / errs[k]);
    CHECK(order >= 1.3);
    CHECK(order <= 2.0);
  }
}

TEST_CASE("left Caputo of sin matches quadrature oracle") {
  const Grid g(0.0, 2.0, 512);
  for (double alpha : {0.3, 0.5, 0.8}) {
    const GridFunction d = caputo_left(GridFunction::sample(g, [](double t) { return std::sin(t); }), alpha);
    for (std::size_t i = 32; i <= 512; i += 32) {
      const double ref = oracle::caputo_left([](double s) { return std::cos(s); }, 0.0, g.node(i), alpha);
      CHECK(std::abs(d(i) - ref) < 1e-3);
    }
  }
}

TEST_CASE("right Caputo of exp(-t) matches quadrature oracle") {
  const Grid g(0.0, 1.0, 512);
  const double alpha = 0.6;
  const GridFunction d = caputo_right(GridFunction::sample(g, [](double t) { return std::exp(-t); }), alpha);
  for (std::size_t i = 0; i < 512; i += 32) {
    const double ref = oracle::caputo_right([](double s) { return -std::exp(-s); }, 1.0, g.node(i), alpha);
    CHECK(std::abs(d(i) - ref) < 1e-3);
  }
}

TEST_CASE("RL integrals match quadrature oracle at second order") {
  for (double beta : {0.3, 0.7, 1.5}) {
    std::vector<double> errs;
    for (std::size_t n : {128, 256}) {
      const Grid g(0.0, 1.0, n);
      const GridFunction f = GridFunction::sample(g, [](double t) { return std::exp(t); });
      const GridFunction li = rl_integral_left(f, beta);
      const GridFunction ri = rl_integral_right(f, beta);
      double e = 0.0;
      for (std::size_t i = 0; i <= n; i += n / 16) {
        e = std::max(e, std::abs(li(i) - oracle::rl_left([](double s) { return std::exp(s); }, 0.0, g.node(i), beta)));
        e = std::max(e, std::abs(ri(i) - oracle::rl_right([](double s) { return std::exp(s); }, 1.0, g.node(i), beta)));
      }
      errs.push_back(e);
    }
    CHECK(errs.back() < 1e-4);
    CHECK(errs[0] / errs[1] > 3.0);
  }
}

TEST_CASE("RL integral semigroup") {
  // I^0.3 f behaves like t^0.3 near a: the composition converges like h^1.3, and like h^0.7 at node 1.
  auto gap = [](std::size_t n, double& first) {
    const Grid g(0.0, 1.0, n);
    const GridFunction f = GridFunction::sample(g, [](double t) { return std::cos(3.0 * t); });
    const GridFunction twice = rl_integral_left(rl_integral_left(f, 0.3), 0.4);
    const GridFunction once = rl_integral_left(f, 0.7);
    double away = 0.0;
    for (std::size_t i = n / 8; i <= n; ++i) away = std::max(away, std::abs(twice(i) - once(i)));
    first = std::abs(twice(1) - once(1));
    return away;
  };
  double e512 = 0.0, e1024 = 0.0;
  const double coarse = gap(512, e512);
  const double fine = gap(1024, e1024);
  CHECK(fine < 1e-4);
  CHECK(coarse / fine > 2.2);  // h^1.3
  // first-cell error decays like h^0.7
  CHECK(e512 / e1024 > 1.4);
}

TEST_CASE("RL derivative agrees with a Grünwald–Letnikov oracle and flags the singular node") {
  const Grid g(0.0, 1.0, 512);
  const double alpha = 0.4;
  auto f = [](double t) { return 1.0 + t * t; };
  const GridFunction d = rl_derivative_left(GridFunction::sample(g, f), alpha);
  CHECK(d.flagged(0));
  for (std::size_t i = 64; i <= 512; i += 64) {
    CHECK(std::abs(d(i) - oracle::grunwald_left(f, 0.0, g.node(i), alpha, 200000)) < 5e-3);
  }
  const GridFunction r = rl_derivative_right(GridFunction::sample(g, f), alpha);
  CHECK(r.flagged(512));
  CHECK_FALSE(r.flagged(0));

  const GridFunction zero_start = rl_derivative_left(GridFunction::sample(g, [](double t) { return t; }), alpha);
  CHECK_FALSE(zero_start.flagged(0));
}

TEST_CASE("Caputo annihilates constants") {
  const Grid g(0.0, 3.0, 64);
  const GridFunction c = GridFunction::sample(g, [](double) { return 4.2; });
  for (double alpha : {0.2, 0.5, 1.0}) {
    CHECK(interior_max_norm(caputo_left(c, alpha)) == 0.0);
    CHECK(interior_max_norm(caputo_right(c, alpha)) == 0.0);
  }
}

TEST_CASE("alpha = 1 reduces to the classical derivative") {
  const Grid g(-1.0, 2.0, 96);
  const GridFunction f = GridFunction::sample(g, [](double t) { return 0.4 * t * t * t - t + 2.0; });
  const GridFunction d = classical_derivative(f);
  const GridFunction cl = caputo_left(f, 1.0), cr = caputo_right(f, 1.0);
  const GridFunction rl = rl_derivative_left(f, 1.0), rr = rl_derivative_right(f, 1.0);
  const double h = g.step();
  for (std::size_t i = 0; i <= 96; ++i) {
    CHECK(cl(i) == d(i));
    CHECK(rl(i) == d(i));
    CHECK(cr(i) == -d(i));
    CHECK(rr(i) == -d(i));
    if (i > 0 && i < 96) CHECK(std::abs(d(i) - (f(i + 1) - f(i - 1)) / (2.0 * h)) <= 1e-12);
  }
}

TEST_CASE("classical derivative is exact on quadratics and second order at the ends") {
  const Grid g(0.0, 1.0, 16);
  const GridFunction d = classical_derivative(GridFunction::sample(g, [](double t) { return 3.0 * t * t - t; }));
  for (std::size_t i = 0; i <= 16; ++i) CHECK(d(i) == doctest::Approx(6.0 * g.node(i) - 1.0).epsilon(1e-12));
  std::vector<double> end_err;
  for (std::size_t n : {32, 64, 128}) {
    const GridFunction s = classical_derivative(GridFunction::sample(Grid(0.0, 1.0, n), [](double t) { return std::sin(t); }));
    end_err.push_back(std::max(std::abs(s(0) - 1.0), std::abs(s(n) - std::cos(1.0))));
  }
  CHECK(end_err[0] / end_err[1] > 3.5);
  CHECK(end_err[1] / end_err[2] > 3.5);
}

TEST_CASE("operators reject bad orders and non-finite input") {
  const Grid g(0.0, 1.0, 8);
  const GridFunction f = GridFunction::sample(g, [](double t) { return t; });
  CHECK_THROWS_AS(caputo_left(f, 0.0), InputError);
  CHECK_THROWS_AS(caputo_left(f, 1.5), InputError);
  CHECK_THROWS_AS(caputo_right(f, std::nan("")), InputError);
  CHECK_THROWS_AS(rl_integral_left(f, -0.5), InputError);
  GridFunction bad = f;
  bad(3) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(caputo_left(bad, 0.5), InputError);
  CHECK_THROWS_AS(rl_integral_right(bad, 0.5), InputError);
}

TEST_CASE("integration by parts residual shrinks under refinement") {
  std::vector<double> res;
  for (std::size_t n : {64, 128, 256, 512, 1024}) {
    const Grid g(0.0, 1.0, n);
    res.push_back(ibp_residual(GridFunction::sample(g, [](double t) { return t * (1.0 - t); }),
                               GridFunction::sample(g, [](double t) { return t + 1.0; }), 0.5));
  }
  for (std::size_t k = 1; k < res.size(); ++k) CHECK(res[k - 1] / res[k] >= 1.8);
  const Grid g(0.0, 1.0, 16);
  CHECK_THROWS_AS(ibp_residual(GridFunction::sample(g, [](double t) { return t; }),
                               GridFunction::sample(g, [](double) { return 1.0; }), 0.5),
                  InputError);
}

TEST_CASE("midpoint Caputo is exact for linear functions") {
  const Grid g(0.0, 1.0, 32);
  const double alpha = 0.35;
  const std::vector<double> m = caputo_left_midpoints(GridFunction::sample(g, [](double t) { return 2.0 * t; }), alpha);
  for (std::size_t k = 0; k < 32; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * g.step();
    CHECK(m[k] == doctest::Approx(2.0 * std::pow(t, 1.0 - alpha) / boost::math::tgamma(2.0 - alpha)).epsilon(1e-12));
  }
}

TEST_CASE("midpoint Caputo adjoint is the transpose") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid g(0.0, 2.0, 40);
  const std::size_t dim = 2;
  GridFunction f(g, dim);
  for (double& x : f.values()) x = u(rng);
  std::vector<double> y(40 * dim);
  for (double& x : y) x = u(rng);
  const std::vector<double> cf = caputo_left_midpoints(f, 0.6);
  const std::vector<double> aty = caputo_left_midpoints_adjoint(g, dim, y, 0.6);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) lhs += cf[k] * y[k];
  for (std::size_t k = 0; k < aty.size(); ++k) rhs += f.values()[k] * aty[k];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}
