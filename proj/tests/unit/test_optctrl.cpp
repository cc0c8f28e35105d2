#include <cmath>
#include <random>

#include "doctest.h"
#include "fracnoether/error.hpp"
#include "fracnoether/families.hpp"
#include "fracnoether/fracops.hpp"
#include "fracnoether/optctrl.hpp"
#include "oracles.hpp"

using namespace fracnoether;

namespace {

const LagrangianSpec fractional = polynomial_lagrangian({{0.5, 0, 2, 0}, {0.5, 0, 0, 2}});

ControlProblem lq(double a, double b, double Q, double R, double alpha, std::size_t n) {
  ControlFunctions f;
  f.L = [Q, R](double, std::span<const double> q, std::span<const double> u, std::span<const double>) {
    return 0.5 * (Q * q[0] * q[0] + R * u[0] * u[0]);
  };
  f.L_grad = [Q, R](double, std::span<const double> q, std::span<const double> u, std::span<const double>,
                    std::span<double> dq, std::span<double> du, std::span<double>) {
    dq[0] = Q * q[0];
    du[0] = R * u[0];
  };
  f.phi = [a, b](double, std::span<const double> q, std::span<const double> u, std::span<double> o) { o[0] = a * q[0] + b * u[0]; };
  f.phi_jac = [a, b](double, std::span<const double>, std::span<const double>, std::span<double> jq, std::span<double> ju) {
    jq[0] = a;
    ju[0] = b;
  };
  return ControlProblem({1, 1, 0}, std::move(f), alpha, Grid(0.0, 1.0, n), {1.0}, std::nullopt, true);
}

PontryaginState blank(const ControlProblem& cp) {
  const Grid& g = cp.grid();
  PontryaginState s{GridFunction(g, cp.dims().n), GridFunction(g, cp.dims().m), GridFunction(g, cp.mu_width()),
                    GridFunction(g, cp.dims().n), GridFunction(g, cp.dims().n)};
  for (std::size_t k = 0; k < cp.dims().n; ++k) s.q(0, k) = cp.q_a()[k];
  return s;
}

}  // namespace

TEST_CASE("Hamiltonian of the reduction problem") {
  const ControlProblem cp = reduction_problem(polynomial_lagrangian({{0.5, 0, 2, 0}}), 0.5, Grid(0.0, 1.0, 8), {0.0}, std::nullopt);
  PontryaginState s = blank(cp);
  s.u(3) = 0.7;
  s.mu(3) = -0.2;
  s.p(3) = 1.1;
  s.p_alpha(3) = 0.4;
  CHECK(hamiltonian(cp, s, 3) == doctest::Approx(0.5 * 0.49 + 1.1 * 0.7 + 0.4 * -0.2).epsilon(1e-14));
  s.p(3) = s.p_alpha(3) = 0.0;
  CHECK(hamiltonian(cp, s, 3) == doctest::Approx(0.5 * 0.49).epsilon(1e-14));
  CHECK_THROWS_AS(hamiltonian(cp, s, 9), InputError);
}

TEST_CASE("Hamiltonian of a linear-quadratic instance") {
  const ControlProblem cp = lq(-2.0, 3.0, 1.5, 0.5, 1.0, 8);
  PontryaginState s = blank(cp);
  s.q(4) = 0.3;
  s.u(4) = -1.2;
  s.p(4) = 0.8;
  const double expected = 0.5 * (1.5 * 0.09 + 0.5 * 1.44) + 0.8 * (-2.0 * 0.3 + 3.0 * -1.2);
  CHECK(hamiltonian(cp, s, 4) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("state checks: initial value must match exactly") {
  const ControlProblem cp = lq(0.0, 1.0, 1.0, 1.0, 1.0, 8);
  PontryaginState s = blank(cp);
  s.q(0) = 1.0 + 1e-13;
  CHECK_THROWS_AS(hamiltonian(cp, s, 0), InputError);
}

TEST_CASE("partials are validated on construction") {
  ControlFunctions f;
  f.L = [](double, std::span<const double> q, std::span<const double> u, std::span<const double>) { return q[0] * u[0]; };
  f.L_grad = [](double, std::span<const double> q, std::span<const double> u, std::span<const double>,
                std::span<double> dq, std::span<double> du, std::span<double>) {
    dq[0] = u[0];
    du[0] = q[0] + 0.1;
  };
  f.phi = [](double, std::span<const double>, std::span<const double> u, std::span<double> o) { o[0] = u[0]; };
  f.phi_jac = [](double, std::span<const double>, std::span<const double>, std::span<double> jq, std::span<double> ju) {
    jq[0] = 0.0;
    ju[0] = 1.0;
  };
  CHECK_THROWS_AS(ControlProblem({1, 1, 0}, f, 1.0, Grid(0.0, 1.0, 8), {0.0}, std::nullopt, true), InputError);
  CHECK_THROWS_AS(ControlProblem({5, 1, 0}, f, 1.0, Grid(0.0, 1.0, 8), {0.0}, std::nullopt, true), InputError);
}

TEST_CASE("zero problem has zero residuals") {
  ControlFunctions f;
  f.L = [](double, std::span<const double>, std::span<const double>, std::span<const double>) { return 0.0; };
  f.L_grad = [](double, std::span<const double>, std::span<const double>, std::span<const double>, std::span<double> a,
                std::span<double> b, std::span<double> c) {
    a[0] = b[0] = c[0] = 0.0;
  };
  f.phi = [](double, std::span<const double>, std::span<const double>, std::span<double> o) { o[0] = 0.0; };
  f.phi_jac = [](double, std::span<const double>, std::span<const double>, std::span<double> a, std::span<double> b) {
    a[0] = b[0] = 0.0;
  };
  f.rho = f.phi;
  f.rho_jac = f.phi_jac;
  const ControlProblem cp({1, 1, 1}, f, 0.5, Grid(0.0, 1.0, 16), {0.0}, std::nullopt, true);
  const PontryaginResiduals r = pontryagin_residuals(cp, blank(cp));
  for (const GridFunction* g : {&r.dynamics, &r.fractional, &r.adjoint, &r.control, &r.fcontrol}) CHECK(interior_max_norm(*g) == 0.0);
}

TEST_CASE("dynamics residual is u - qdot for phi = u") {
  const ControlProblem cp = reduction_problem(fractional, 0.5, Grid(0.0, 1.0, 32), {0.0}, std::nullopt);
  PontryaginState s = blank(cp);
  for (std::size_t i = 0; i <= 32; ++i) {
    s.q(i) = cp.grid().node(i) * cp.grid().node(i);
    s.u(i) = std::sin(cp.grid().node(i));
  }
  const PontryaginResiduals r = pontryagin_residuals(cp, s);
  const GridFunction qdot = classical_derivative(s.q);
  for (std::size_t i = 1; i < 32; ++i) CHECK(r.dynamics(i) == s.u(i) - qdot(i));
}

TEST_CASE("variational substitution reproduces the EL residual") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double alpha = 0.3 + 0.6 * std::abs(c(rng));
    const LagrangianSpec L = polynomial_lagrangian({{1.0, 0, 2, 0}, {0.5, 0, 0, 2}, {c(rng), 2, 0, 0}, {c(rng), 1, 1, 1}});
    const Grid g(0.0, 1.0, 96);
    const double c1 = c(rng), c2 = c(rng);
    const GridFunction q = GridFunction::sample(g, [&](double t) { return c1 + t + c2 * t * t; });
    const VariationalProblem p{L, g, alpha, {q(0)}, {q(96)}};
    const PontryaginResiduals r = pontryagin_residuals(reduction_problem(p, true), variational_substitution(p, q));
    const GridFunction el = el_residual(p, q);
    const double scale = std::max(1.0, interior_max_norm(el));
    for (std::size_t i = 1; i < 96; ++i) {
      CHECK(std::abs(r.adjoint(i) - el(i)) <= 1e-10 * scale);
      CHECK(std::abs(r.dynamics(i)) <= 1e-10 * scale);
      CHECK(std::abs(r.fractional(i)) <= 1e-10 * scale);
      CHECK(std::abs(r.control(i)) <= 1e-10 * scale);
      CHECK(std::abs(r.fcontrol(i)) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("residuals along a computed extremal stay within 10x the EL residual") {
  const VariationalProblem p{polynomial_lagrangian({{0.5, 0, 2, 0}, {-0.5, 2, 0, 0}}), Grid(0.0, 1.0, 256), 1.0, {1.0}, {0.5}};
  const ExtremalSolution s = solve_extremal(p);
  const PontryaginResiduals r = pontryagin_residuals(reduction_problem(p, true), variational_substitution(p, s.trajectory));
  for (const GridFunction* g : {&r.dynamics, &r.fractional, &r.adjoint, &r.control, &r.fcontrol}) {
    CHECK(interior_max_norm(*g) <= 10.0 * s.el_residual_norm);
  }
}

TEST_CASE("zero-cost problem without fractional part stays at rest") {
  ControlFunctions f;
  f.L = [](double, std::span<const double>, std::span<const double> u, std::span<const double>) { return u[0] * u[0]; };
  f.L_grad = [](double, std::span<const double>, std::span<const double> u, std::span<const double>, std::span<double> dq,
                std::span<double> du, std::span<double>) {
    dq[0] = 0.0;
    du[0] = 2.0 * u[0];
  };
  f.phi = [](double, std::span<const double>, std::span<const double> u, std::span<double> o) { o[0] = u[0]; };
  f.phi_jac = [](double, std::span<const double>, std::span<const double>, std::span<double> jq, std::span<double> ju) {
    jq[0] = 0.0;
    ju[0] = 1.0;
  };
  const ControlProblem cp({1, 1, 0}, f, 1.0, Grid(0.0, 1.0, 64), {0.0}, std::nullopt, true);
  const ControlSolution s = solve_control(cp);
  CHECK(interior_max_norm(s.state.q) < 1e-10);
  CHECK(interior_max_norm(s.state.u) < 1e-10);
  CHECK(std::abs(s.cost) < 1e-12);
}

TEST_CASE("linear-quadratic regulator matches the Riccati solution") {
  for (double a : {0.0, -1.0, 0.5}) {
    const ControlSolution s = solve_control(lq(a, 1.0, 1.0, 1.0, 1.0, 256));
    const double ref = 0.5 * oracle::riccati_p0(a, 1.0, 1.0, 1.0, 1.0);
    CHECK(std::abs(s.cost - ref) < 1e-3);
  }
}

TEST_CASE("classical autonomous control conserves H") {
  const ControlProblem cp = lq(-1.0, 1.0, 1.0, 1.0, 1.0, 256);
  const ControlSolution s = solve_control(cp);
  const GridFunction H = hamiltonian_along(cp, s.state);
  CHECK(drift_report(H) < 1e-3);
  const GridFunction Q = control_noether_quantity(cp, s.state, time_translation(1), 2);
  const GridFunction A = autonomous_control_quantity(cp, s.state);
  for (std::size_t i = 0; i < H.size(); ++i) {
    CHECK(A(i) == H(i));
    CHECK(Q(i) == doctest::Approx(H(i)).epsilon(1e-12));
  }
}

TEST_CASE("control solve agrees with the variational solve of the reduced problem") {
  const VariationalProblem p{fractional, Grid(0.0, 1.0, 128), 0.5, {0.0}, {1.0}};
  const ExtremalSolution v = solve_extremal(p);
  const ControlSolution c = solve_control(reduction_problem(p, true));
  CHECK(std::abs(c.cost - discrete_action(p, v.trajectory)) < 1e-3);
  for (std::size_t i = 0; i <= 128; ++i) CHECK(std::abs(c.state.q(i) - v.trajectory(i)) < 1e-3);
}

TEST_CASE("reduction identity: corrected Hamiltonian equals the variational quantity") {
  const VariationalProblem p{polynomial_lagrangian({{0.5, 0, 2, 0}, {0.3, 0, 0, 2}, {-0.4, 2, 0, 0}}), Grid(0.0, 1.0, 64), 0.6, {0.2}, {1.0}};
  const GridFunction q = GridFunction::sample(p.grid, [](double t) { return 0.2 + 0.8 * t * t; });
  const ControlProblem cp = reduction_problem(p, true);
  const GridFunction A = autonomous_control_quantity(cp, variational_substitution(p, q));
  const GridFunction V = autonomous_quantity(p, describe_trajectory(p, q));
  for (std::size_t i = 0; i <= 64; ++i) CHECK(A(i) == doctest::Approx(V(i)).epsilon(1e-12));
}

TEST_CASE("autonomous control quantity special cases") {
  const ControlProblem cp = reduction_problem(fractional, 0.5, Grid(0.0, 1.0, 16), {0.0}, std::nullopt);
  PontryaginState s = blank(cp);
  for (std::size_t i = 0; i <= 16; ++i) {
    s.q(i) = cp.grid().node(i);
    s.u(i) = 1.0;
    s.p(i) = -1.0;
  }
  const GridFunction A = autonomous_control_quantity(cp, s);
  const GridFunction H = hamiltonian_along(cp, s);
  for (std::size_t i = 0; i <= 16; ++i) CHECK(A(i) == H(i));
  SymmetryGroup only_time = time_translation(1);
  const GridFunction Q = control_noether_quantity(cp, s, only_time, 2);
  for (std::size_t i = 0; i <= 16; ++i) CHECK(Q(i) == doctest::Approx(A(i)).epsilon(1e-12));
}

TEST_CASE("solver output is consistent with the Hamiltonian system" * doctest::may_fail()) {
  const ControlProblem cp = reduction_problem({fractional, Grid(0.0, 1.0, 128), 0.5, {0.0}, {1.0}}, true);
  const ControlSolution s = solve_control(cp);
  const PontryaginResiduals r = pontryagin_residuals(cp, s.state);
  const double defect = std::max(s.phi_defect, s.rho_defect);
  CHECK(interior_max_norm(r.dynamics) < 10.0 * defect);
  CHECK(interior_max_norm(r.fractional) < 10.0 * defect);
}

TEST_CASE("fractional residual of the solver output converges away from t = a") {
  std::vector<double> mid;
  for (std::size_t n : {64, 128, 256}) {
    const ControlProblem cp = reduction_problem({fractional, Grid(0.0, 1.0, n), 0.5, {0.0}, {1.0}}, true);
    const PontryaginResiduals r = pontryagin_residuals(cp, solve_control(cp).state);
    double m = 0.0;
    for (std::size_t i = n / 4; i <= 3 * n / 4; ++i) m = std::max(m, std::abs(r.fractional(i)));
    mid.push_back(m);
  }
  CHECK(mid[1] < mid[0]);
  CHECK(mid[2] < mid[1]);
}

TEST_CASE("corrected Hamiltonian drifts no more than H") {
  for (std::size_t n : {64, 128}) {
    const ControlProblem cp = reduction_problem({fractional, Grid(0.0, 1.0, n), 0.5, {0.0}, {1.0}}, true);
    const ControlSolution s = solve_control(cp);
    CHECK(drift_report(autonomous_control_quantity(cp, s.state)) <= drift_report(hamiltonian_along(cp, s.state)));
  }
}

TEST_CASE("fractional control quantity drift decreases under refinement" * doctest::may_fail()) {
  std::vector<double> d;
  for (std::size_t n : {64, 128, 256}) {
    const ControlProblem cp = reduction_problem({fractional, Grid(0.0, 1.0, n), 0.5, {0.0}, {1.0}}, true);
    d.push_back(drift_report(autonomous_control_quantity(cp, solve_control(cp).state)));
  }
  CHECK(d[0] / d[1] >= 1.5);
  CHECK(d[1] / d[2] >= 1.5);
}

TEST_CASE("autonomous control quantity rejects time-dependent problems") {
  ControlFunctions f;
  f.L = [](double t, std::span<const double>, std::span<const double> u, std::span<const double>) { return t * u[0] * u[0]; };
  f.L_grad = [](double t, std::span<const double>, std::span<const double> u, std::span<const double>, std::span<double> dq,
                std::span<double> du, std::span<double>) {
    dq[0] = 0.0;
    du[0] = 2.0 * t * u[0];
  };
  f.phi = [](double, std::span<const double>, std::span<const double> u, std::span<double> o) { o[0] = u[0]; };
  f.phi_jac = [](double, std::span<const double>, std::span<const double>, std::span<double> jq, std::span<double> ju) {
    jq[0] = 0.0;
    ju[0] = 1.0;
  };
  const ControlProblem cp({1, 1, 0}, f, 1.0, Grid(0.0, 1.0, 8), {0.0}, std::nullopt, false);
  CHECK_THROWS_AS(autonomous_control_quantity(cp, blank(cp)), InputError);
}
