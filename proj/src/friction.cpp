#include "fracnoether/friction.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracnoether/error.hpp"
#include "fracnoether/fracops.hpp"
#include "fracnoether/noether.hpp"

namespace fracnoether {

void FrictionProblem::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InputError("friction: mass must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InputError("friction: gamma must be non-negative");
  }
  if (!potential || !dpotential) throw InputError("friction: potential and its derivative required");
  for (double q : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
    if (!std::isfinite(potential(q)) || !std::isfinite(dpotential(q))) {
      throw InputError("friction: potential is not finite at q = " + std::to_string(q));
    }
  }
}

LagrangianSpec friction_lagrangian(const FrictionProblem& fp) {
  fp.validate();
  const double m = fp.mass;
  const double g = fp.gamma;
  auto U = fp.potential;
  auto dU = fp.dpotential;
  LagrangianFn value = [m, g, U](double, std::span<const double> q, std::span<const double> v,
                                 std::span<const double> w) {
    return 0.5 * m * v[0] * v[0] - U(q[0]) + 0.5 * g * w[0] * w[0];
  };
  LagrangianGradFn grad = [m, g, dU](double, std::span<const double> q, std::span<const double> v,
                                     std::span<const double> w, std::span<double> dq,
                                     std::span<double> dv, std::span<double> dw) {
    dq[0] = -dU(q[0]);
    dv[0] = m * v[0];
    dw[0] = g * w[0];
  };
  return LagrangianSpec(1, value, grad, true);
}

VariationalProblem friction_problem(const FrictionProblem& fp, double q_a, double q_b) {
  VariationalProblem p{friction_lagrangian(fp), fp.window, kFrictionOrder, {q_a}, {q_b}};
  p.validate();
  return p;
}

FrictionDiagnostics friction_diagnostics(const FrictionProblem& fp, const GridFunction& q) {
  fp.validate();
  if (q.dim() != 1) throw InputError("friction_diagnostics: trajectory must be scalar");
  if (!(q.grid() == fp.window)) throw InputError("friction_diagnostics: trajectory is not on the window");
  q.require_finite("friction_diagnostics");
  const GridFunction v = classical_derivative(q);
  const GridFunction w = caputo_left(q, kFrictionOrder);
  FrictionDiagnostics d{GridFunction(q.grid(), 1), GridFunction(q.grid(), 1),
                        GridFunction(q.grid(), 1), GridFunction(q.grid(), 1)};
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double friction = 0.5 * fp.gamma * w(i) * w(i);
    d.p(i) = fp.mass * v(i);
    d.p_half(i) = fp.gamma * w(i);
    d.H(i) = 0.5 * fp.mass * v(i) * v(i) + fp.potential(q(i)) + friction;
    d.noether_defect(i) = friction - d.H(i);
  }
  for (const GridFunction* g : {&d.p, &d.p_half, &d.H, &d.noether_defect}) {
    for (std::size_t i = 1; i + 1 < q.size(); ++i) {
      if (g->flagged(i)) {
        throw NumericalError("friction_diagnostics: non-finite value at node " + std::to_string(i));
      }
    }
  }
  return d;
}

GridFunction friction_eom_residual(const FrictionProblem& fp, const GridFunction& q) {
  fp.validate();
  q.require_finite("friction_eom_residual");
  const GridFunction v = classical_derivative(q);
  GridFunction momentum(q.grid(), 1);
  for (std::size_t i = 0; i < q.size(); ++i) momentum(i) = fp.mass * v(i);
  const GridFunction momentum_dot = classical_derivative(momentum);
  GridFunction pw = caputo_left(q, kFrictionOrder);
  for (double& x : pw.values()) x *= fp.gamma;
  const GridFunction drag = rl_derivative_right(pw, kFrictionOrder);
  GridFunction r(q.grid(), 1);
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    r(i) = momentum_dot(i) - drag(i) - fp.force(q(i));
  }
  return r;
}

std::vector<WindowRow> window_shrink_study(const FrictionProblem& fp,
                                           const std::function<double(double)>& q_global,
                                           const std::vector<Grid>& windows) {
  fp.validate();
  if (windows.empty()) throw InputError("window_shrink_study: no windows given");
  const double mid = 0.5 * (windows.front().a() + windows.front().b());
  const double scale = 1.0 + std::abs(mid) + (windows.front().b() - windows.front().a());
  std::vector<WindowRow> rows;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const Grid& g = windows[k];
    if (std::abs(0.5 * (g.a() + g.b()) - mid) > 1e-12 * scale) {
      throw InputError("window_shrink_study: windows do not share a common midpoint");
    }
    if (k > 0 && (g.a() < windows[k - 1].a() || g.b() > windows[k - 1].b())) {
      throw InputError("window_shrink_study: windows are not nested");
    }
    if (g.intervals() % 2 != 0) {
      throw InputError("window_shrink_study: windows need an even number of intervals");
    }
    const GridFunction q = GridFunction::sample(g, q_global);
    FrictionProblem local = fp;
    local.window = g;
    const FrictionDiagnostics d = friction_diagnostics(local, q);
    const GridFunction v = classical_derivative(q);
    const std::size_t m = g.intervals() / 2;
    const double w = d.p_half(m);
    WindowRow row;
    row.a = g.a();
    row.b = g.b();
    row.dt = g.b() - g.a();
    row.p_half_mid = w;
    row.friction_energy = fp.gamma > 0.0 ? 0.5 * w * w / fp.gamma : 0.0;
    row.first_order = (2.0 / std::numbers::pi) * fp.gamma * v(m) * v(m) * row.dt;
    row.energy_ratio = row.first_order != 0.0 ? row.friction_energy / row.first_order
                                              : std::numeric_limits<double>::quiet_NaN();
    row.halving_ratio = (k > 0 && rows.back().friction_energy != 0.0)
                            ? row.friction_energy / rows.back().friction_energy
                            : std::numeric_limits<double>::quiet_NaN();
    row.h_drift = drift_report(d.H);
    rows.push_back(row);
  }
  return rows;
}

GridFunction simulate_damped_eom(const FrictionProblem& fp, double q0, double v0, double T,
                                 std::size_t steps) {
  fp.validate();
  if (steps < 16) throw InputError("simulate_damped_eom: steps must be at least 16");
  if (!std::isfinite(q0) || !std::isfinite(v0)) throw InputError("simulate_damped_eom: non-finite initial state");
  if (!(T > 0.0) || !std::isfinite(T)) throw InputError("simulate_damped_eom: T must be positive");
  const Grid grid(0.0, T, steps);
  const double h = grid.step();
  auto accel = [&](double q, double v) { return (fp.force(q) - fp.gamma * v) / fp.mass; };
  GridFunction out(grid, 2);
  double q = q0;
  double v = v0;
  out(0, 0) = q;
  out(0, 1) = v;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double k1q = v;
    const double k1v = accel(q, v);
    const double k2q = v + 0.5 * h * k1v;
    const double k2v = accel(q + 0.5 * h * k1q, k2q);
    const double k3q = v + 0.5 * h * k2v;
    const double k3v = accel(q + 0.5 * h * k2q, k3q);
    const double k4q = v + h * k3v;
    const double k4v = accel(q + h * k3q, k4q);
    q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!(std::abs(q) <= 1e12) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "simulate_damped_eom: solution blew up at t = " << grid.node(i) << " (|q| = "
          << std::abs(q) << "); reduce the step size";
      throw NumericalError(msg.str());
    }
    out(i, 0) = q;
    out(i, 1) = v;
  }
  return out;
}

}  // namespace fracnoether
