#pragma once

#include <functional>
#include <vector>

#include "fracnoether/grid.hpp"
#include "fracnoether/lagrangian.hpp"
#include "fracnoether/variational.hpp"

// Particle under linear friction, modelled by a Lagrangian with a Caputo
// half-derivative term.

namespace fracnoether {

struct FrictionProblem {
  double mass = 1.0;
  double gamma = 0.0;
  std::function<double(double)> potential;   ///< U(q)
  std::function<double(double)> dpotential;  ///< U'(q); the force is −U'
  Grid window{0.0, 1.0, 64};

  /// m > 0, γ ≥ 0, U and U' finite on probes.
  void validate() const;
  double force(double q) const { return -dpotential(q); }
};

constexpr double kFrictionOrder = 0.5;

/// L = m v²/2 − U(q) + γ w²/2 (scalar, autonomous).
LagrangianSpec friction_lagrangian(const FrictionProblem& fp);

/// Variational problem on fp.window with α = 1/2.
VariationalProblem friction_problem(const FrictionProblem& fp, double q_a, double q_b);

struct FrictionDiagnostics {
  GridFunction p;               ///< m q̇
  GridFunction p_half;          ///< γ C^{1/2} q
  GridFunction H;               ///< m q̇²/2 + U + (γ/2)(C^{1/2} q)²
  GridFunction noether_defect;  ///< (γ/2)(C^{1/2} q)² − H
};

FrictionDiagnostics friction_diagnostics(const FrictionProblem& fp, const GridFunction& q);

/// m q̈ − γ D_right^{1/2}(C_left^{1/2} q) − F(q) at interior nodes, with q̈ taken
/// as the derivative of the sampled momentum (the code path of el_residual).
/// Along any q this equals −el_residual of friction_problem.
GridFunction friction_eom_residual(const FrictionProblem& fp, const GridFunction& q);

struct WindowRow {
  double a = 0.0;
  double b = 0.0;
  double dt = 0.0;               ///< b − a
  double friction_energy = 0.0;  ///< (γ/2)(C^{1/2} q)² at the midpoint
  double first_order = 0.0;      ///< (2/π) γ q̇² Δt at the midpoint
  double energy_ratio = 0.0;     ///< friction_energy / first_order (NaN if 0/0)
  double halving_ratio = 0.0;    ///< friction_energy / previous row's (NaN on the first row)
  double p_half_mid = 0.0;       ///< γ C^{1/2} q at the midpoint
  double h_drift = 0.0;          ///< drift_report(H) on the window
};

/// Evaluates the friction-energy term on nested windows sharing one midpoint.
/// Each window must have an even number of intervals so the midpoint is a node.
std::vector<WindowRow> window_shrink_study(const FrictionProblem& fp,
                                           const std::function<double(double)>& q_global,
                                           const std::vector<Grid>& windows);

/// RK4 for m q̈ + γ q̇ = F(q) on [0, T]; columns q and q̇.
/// Aborts with NumericalError when |q| exceeds 1e12.
GridFunction simulate_damped_eom(const FrictionProblem& fp, double q0, double v0, double T,
                                 std::size_t steps);

}  // namespace fracnoether
