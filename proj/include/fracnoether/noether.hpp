#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "fracnoether/grid.hpp"
#include "fracnoether/variational.hpp"

namespace fracnoether {

/// One-parameter group (ψ₁, ψ₂) acting on time and state, with its
/// ε-derivatives at ε = 0: τ(t) = ∂ψ₁/∂ε and f₂(t, q) = ∂ψ₂/∂ε.
struct SymmetryGroup {
  std::string name;
  std::size_t dim = 1;
  std::function<double(double eps, double t)> psi1;
  std::function<void(double eps, std::span<const double> q, std::span<double> out)> psi2;
  std::function<double(double t)> tau;
  std::function<void(double t, std::span<const double> q, std::span<double> out)> f2;

  /// Checks identity at ε = 0 (1e-12), the group law (1e-8) and that τ, f₂
  /// match central ε-differences of ψ₁, ψ₂ (1e-6) on deterministic probes.
  void validate() const;
};

SymmetryGroup time_translation(std::size_t dim);
SymmetryGroup space_translation(std::vector<double> direction);
/// Planar rotation q -> R(εω) q; dim is 2.
SymmetryGroup rotation(double omega);

/// Truncated transfer-formula series; terms has R + 1 components per node.
struct InvariantSeries {
  std::size_t truncation_order = 0;
  GridFunction terms;
  double tail_estimate = 0.0;  ///< max-norm of term R over all nodes

  /// Σ_r terms(i, r) at every node.
  GridFunction sum() const;
};

constexpr std::size_t kMaxTruncation = 6;

/// r-th classical derivative by repeated application of classical_derivative.
GridFunction repeated_derivative(const GridFunction& f, std::size_t r);

/// Term r = Σ_k (−1)^r g_k^{(r)} I_left^{r+1−α}(f_k − f_k(a)) + f_k^{(r)} I_right^{r+1−α} g_k.
/// Integrals of order zero (α = 1, r = 0) are the identity.
InvariantSeries transfer_series(const GridFunction& f2, const GridFunction& g, double alpha,
                                std::size_t R);

struct InvarianceOptions {
  double epsilon = 1e-4;
  /// When set, the trajectory's interior EL residual must not exceed this.
  std::optional<double> residual_threshold;
};

/// Max over a fixed panel of 8 nested subintervals of |d/dε| at ε = 0 of the
/// transformed action restricted to the subinterval.
///
/// Without a time transform the state map is applied node-wise and the Caputo
/// derivative keeps the lower terminal a. With a time transform, ψ₁ must be
/// affine and increasing in t; the transformed integral is pulled back to the
/// original time, which rescales q̇ by 1/ψ̇₁ and the Caputo derivative by ψ̇₁^{-α}.
double invariance_defect(const VariationalProblem& p, const GridFunction& q,
                         const SymmetryGroup& s, bool time_transform,
                         const InvarianceOptions& options = {});

/// f₂·d/dt ∂₃L + ∂₃L·d/dt f₂ + ∂₄L·C_left^α f₂ − f₂·D_right^α ∂₄L at interior nodes.
GridFunction invariance_necessary_residual(const VariationalProblem& p, const GridFunction& q,
                                           const SymmetryGroup& s);

/// f₂ and τ tabulated along q: columns tau, f2_0, ..., f2_{dim-1}.
GridFunction tabulate_generators(const SymmetryGroup& s, const GridFunction& q);

/// f₂·∂₃L + transfer series (g = ∂₄L) + τ (L − q̇·∂₃L − α ∂₄L·C q), node-wise.
GridFunction noether_quantity(const VariationalProblem& p, const ExtremalSolution& sol,
                              const SymmetryGroup& s, std::size_t R);

/// L − q̇·∂₃L − α ∂₄L·C q, node-wise. Requires an autonomous Lagrangian.
GridFunction autonomous_quantity(const VariationalProblem& p, const ExtremalSolution& sol);

/// max |C(t_i) − C(t_1)| / (1 + |C(t_1)|) over interior nodes i, all components.
double drift_report(const GridFunction& c);

}  // namespace fracnoether
