#pragma once

#include <optional>
#include <vector>

#include "fracnoether/grid.hpp"
#include "fracnoether/lagrangian.hpp"

namespace fracnoether {

/// Minimize ∫_a^b L(t, q, q̇, C_left^α q) dt with q(a) = q_a, q(b) = q_b.
struct VariationalProblem {
  LagrangianSpec lagrangian;
  Grid grid;
  double alpha;
  std::vector<double> q_a;
  std::vector<double> q_b;

  /// Throws InputError on dimension mismatch or alpha outside (0, 1].
  void validate() const;
  std::size_t dim() const { return lagrangian.dim(); }
};

/// Node-wise samples of a Lagrangian and its partials along a trajectory.
struct LagrangianSamples {
  GridFunction velocity;         ///< q̇ by central differences
  GridFunction caputo_velocity;  ///< left Caputo derivative of q
  std::vector<double> value;     ///< L at each node
  GridFunction dq;               ///< ∂₂L
  GridFunction dv;               ///< ∂₃L
  GridFunction dw;               ///< ∂₄L
};

/// Evaluates L and its partials at every node. Non-finite values raise
/// NumericalError naming the node.
LagrangianSamples sample_lagrangian(const VariationalProblem& p, const GridFunction& q);

struct ExtremalSolution {
  GridFunction trajectory;
  GridFunction velocity;
  GridFunction caputo_velocity;
  GridFunction el_residual;
  double action = 0.0;
  double el_residual_norm = 0.0;  ///< max-norm over interior nodes
  double gradient_norm = 0.0;     ///< final max-norm of the discrete gradient
  std::size_t iterations = 0;
};

/// Trapezoidal quadrature of L(t, q, q̇, C q) on the grid.
double action_value(const VariationalProblem& p, const GridFunction& q);

/// ∫ ∂₂L·h + ∂₃L·ḣ + ∂₄L·C h dt on the grid. Requires h(a) = h(b) = 0.
double frechet_differential(const VariationalProblem& p, const GridFunction& q,
                            const GridFunction& h);

/// ∂₂L − d/dt ∂₃L + D_right^α ∂₄L at interior nodes; the endpoints are zero.
GridFunction el_residual(const VariationalProblem& p, const GridFunction& q);

// Discrete action minimized by solve_extremal.
//
// Each cell [t_k, t_{k+1}] contributes h L(t_{k+1/2}, q̄, v, w) with q̄ the cell
// average, v the cell slope and w the exact Caputo derivative of the piecewise-
// linear interpolant at the midpoint. This keeps the discrete problem free of the
// odd/even decoupling that a central-difference velocity would introduce.
double discrete_action(const VariationalProblem& p, const GridFunction& q);

/// Gradient of discrete_action with respect to every node value ((n+1)·dim entries).
std::vector<double> discrete_action_gradient(const VariationalProblem& p, const GridFunction& q);

struct SolveOptions {
  double gradient_tol = 1e-8;
  std::size_t max_iterations = 0;  ///< 0 selects 500 · dim · n
};

/// Minimizes discrete_action over the interior node values (endpoints fixed).
/// Default initial guess: linear interpolation of the boundary values.
/// Throws NumericalError when the gradient tolerance is not reached.
ExtremalSolution solve_extremal(const VariationalProblem& p,
                                const std::optional<GridFunction>& init = std::nullopt,
                                const SolveOptions& options = {});

/// Diagnostics (velocity, Caputo velocity, action, EL residual) for a given trajectory.
ExtremalSolution describe_trajectory(const VariationalProblem& p, const GridFunction& q);

}  // namespace fracnoether
