#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fracnoether/grid.hpp"
#include "fracnoether/lagrangian.hpp"
#include "fracnoether/noether.hpp"
#include "fracnoether/variational.hpp"

// Optimal control with mixed dynamics:
//   minimize ∫ L(t, q, u, μ) dt  subject to  q̇ = φ(t, q, u),  C_left^α q = ρ(t, q, μ),  q(a) = q_a.
// Dimensions: state n, classical control m, fractional control d. With d = 0 the
// fractional constraint is absent; μ is then stored as a single zero column and
// p_α as zeros.

namespace fracnoether {

struct ControlDims {
  std::size_t n = 1;
  std::size_t m = 1;
  std::size_t d = 1;
};

struct ControlFunctions {
  std::function<double(double t, std::span<const double> q, std::span<const double> u,
                       std::span<const double> mu)>
      L;
  /// Writes ∂L/∂q (n), ∂L/∂u (m), ∂L/∂μ (d).
  std::function<void(double t, std::span<const double> q, std::span<const double> u,
                     std::span<const double> mu, std::span<double> dq, std::span<double> du,
                     std::span<double> dmu)>
      L_grad;
  std::function<void(double t, std::span<const double> q, std::span<const double> u,
                     std::span<double> out)>
      phi;
  /// Row-major Jacobians ∂φ/∂q (n×n) and ∂φ/∂u (n×m).
  std::function<void(double t, std::span<const double> q, std::span<const double> u,
                     std::span<double> jq, std::span<double> ju)>
      phi_jac;
  std::function<void(double t, std::span<const double> q, std::span<const double> mu,
                     std::span<double> out)>
      rho;
  /// Row-major Jacobians ∂ρ/∂q (n×n) and ∂ρ/∂μ (n×d).
  std::function<void(double t, std::span<const double> q, std::span<const double> mu,
                     std::span<double> jq, std::span<double> jmu)>
      rho_jac;
};

class ControlProblem {
 public:
  /// Validates dimensions, α, boundary data and every supplied partial against
  /// central finite differences on 100 deterministic probes (1e-5 relative).
  ControlProblem(ControlDims dims, ControlFunctions fns, double alpha, Grid grid,
                 std::vector<double> q_a, std::optional<std::vector<double>> q_b, bool autonomous);

  const ControlDims& dims() const { return dims_; }
  const ControlFunctions& functions() const { return fns_; }
  double alpha() const { return alpha_; }
  const Grid& grid() const { return grid_; }
  const std::vector<double>& q_a() const { return q_a_; }
  /// Terminal state constraint; absent means a free right endpoint.
  const std::optional<std::vector<double>>& q_b() const { return q_b_; }
  bool autonomous() const { return autonomous_; }
  bool fractional() const { return dims_.d > 0; }
  /// Stored width of μ (d, or 1 when d = 0).
  std::size_t mu_width() const { return dims_.d > 0 ? dims_.d : 1; }

 private:
  void validate_partials() const;

  ControlDims dims_;
  ControlFunctions fns_;
  double alpha_;
  Grid grid_;
  std::vector<double> q_a_;
  std::optional<std::vector<double>> q_b_;
  bool autonomous_;
};

/// φ = u, ρ = μ, L(t, q, u, μ) = lagrangian(t, q, u, μ): the control form of a
/// variational problem. Terminal value optional.
ControlProblem reduction_problem(const LagrangianSpec& lagrangian, double alpha, Grid grid,
                                 std::vector<double> q_a, std::optional<std::vector<double>> q_b);
/// Same, taking L, α, grid and q_a from p; q_b becomes a terminal constraint when requested.
ControlProblem reduction_problem(const VariationalProblem& p, bool fix_terminal);

struct PontryaginState {
  GridFunction q;
  GridFunction u;
  GridFunction mu;
  GridFunction p;
  GridFunction p_alpha;
};

/// H = L + p·φ + p_α·ρ at node i.
double hamiltonian(const ControlProblem& cp, const PontryaginState& state, std::size_t i);

/// H at every node.
GridFunction hamiltonian_along(const ControlProblem& cp, const PontryaginState& state);

struct PontryaginResiduals {
  GridFunction dynamics;    ///< ∂₅H − q̇
  GridFunction fractional;  ///< ∂₆H − C q
  GridFunction adjoint;     ///< ∂₂H + ṗ − D_right^α p_α
  GridFunction control;     ///< ∂₃H
  GridFunction fcontrol;    ///< ∂₄H
};

/// Interior-node residuals of the Hamiltonian system and stationarity conditions.
/// Endpoints are zero by convention.
PontryaginResiduals pontryagin_residuals(const ControlProblem& cp, const PontryaginState& state);

/// u = q̇, μ = C q, p = −∂₃L, p_α = −∂₄L along q (the state matching reduction_problem(p)).
PontryaginState variational_substitution(const VariationalProblem& p, const GridFunction& q);

struct ControlSolveOptions {
  double initial_weight = 1e3;
  std::size_t rounds = 3;
  double weight_factor = 10.0;
  double gradient_tol = 1e-8;  ///< relative to the current penalty weight
  std::size_t max_iterations = 0;  ///< per round; 0 selects 500 · unknowns
};

struct ControlSolution {
  PontryaginState state;
  double cost = 0.0;          ///< discrete ∫ L without penalties
  double phi_defect = 0.0;    ///< max cell |φ − q̇| after the last round
  double rho_defect = 0.0;    ///< max cell |ρ − C q| after the last round
  std::vector<double> round_defects;
  std::size_t iterations = 0;
  double weight = 0.0;        ///< final penalty weight
};

/// Direct transcription with quadratic penalties on the dynamics, evaluated at
/// cell midpoints (cell-average state, cell slope, exact midpoint Caputo of the
/// piecewise-linear state, one control value per cell). Multipliers are
/// recovered as p = W (φ − q̇) and p_α = W (ρ − C q); they are first-order
/// accurate in 1/W. Cell values are carried to nodes by averaging neighbours and
/// linear extrapolation at the ends.
ControlSolution solve_control(const ControlProblem& cp, const ControlSolveOptions& options = {});

/// −f₂·p − Σ_r [(−1)^r p_α^{(r)} I_left^{r+1−α}(f₂ − f₂(a)) + f₂^{(r)} I_right^{r+1−α} p_α]
/// + τ (H − (1−α) p_α·C q), node-wise.
GridFunction control_noether_quantity(const ControlProblem& cp, const PontryaginState& state,
                                      const SymmetryGroup& s, std::size_t R);

/// H − (1−α) p_α·C q, node-wise. Requires an autonomous problem.
GridFunction autonomous_control_quantity(const ControlProblem& cp, const PontryaginState& state);

}  // namespace fracnoether
