#pragma once

#include <vector>

#include "fracnoether/grid.hpp"

// Fractional integrals and derivatives on uniform grids.
//
// Left operators use the lower terminal a, right operators the upper terminal b.
// Right operators are computed from the left ones by reflecting t -> a + b - t,
// so the two sides share one set of kernel weights.
//
// Riemann-Liouville integrals use product-trapezoidal quadrature: f is replaced by
// its piecewise-linear interpolant and the weakly singular kernel is integrated
// exactly against it. Caputo derivatives use the L1 scheme (same interpolant,
// exact kernel moments), which converges at order 2 - alpha for smooth f.
// Vector-valued functions are processed component by component.

namespace fracnoether {

/// Rejects orders outside (0, 1] for derivatives.
void require_derivative_order(double alpha);

/// Left RL integral of order beta > 0 at every node.
GridFunction rl_integral_left(const GridFunction& f, double beta);
/// Right RL integral of order beta > 0 at every node.
GridFunction rl_integral_right(const GridFunction& f, double beta);

/// Left Caputo derivative, 0 < alpha <= 1. At alpha = 1 returns classical_derivative.
GridFunction caputo_left(const GridFunction& f, double alpha);
/// Right Caputo derivative. At alpha = 1 this is -d/dt.
GridFunction caputo_right(const GridFunction& f, double alpha);

/// Left RL derivative via caputo_left + f(a) (t-a)^{-alpha} / Γ(1-alpha).
/// The node t = a is set to NaN (flagged) when f(a) != 0 and alpha < 1.
GridFunction rl_derivative_left(const GridFunction& f, double alpha);
/// Right RL derivative; node t = b flagged when f(b) != 0 and alpha < 1.
GridFunction rl_derivative_right(const GridFunction& f, double alpha);

/// Classical derivative: central differences inside, second-order one-sided at a and b.
/// With n >= 3 the four-point end stencils share the central difference's leading
/// error term, so a second application stays second-order next to the ends.
GridFunction classical_derivative(const GridFunction& f);

/// |∫ g·C_left^α f dt − ∫ f·D_right^α g dt| by the trapezoidal rule.
/// Requires f(a) = f(b) = 0.
double ibp_residual(const GridFunction& f, const GridFunction& g, double alpha);

// Cell-midpoint Caputo values (used by the direct-transcription solvers).
//
// For a piecewise-linear f, caputo_left_midpoints returns the exact left Caputo
// derivative at t_{k+1/2}, k = 0..n-1. Values are stored cell-major with the same
// component layout as GridFunction.
std::vector<double> caputo_left_midpoints(const GridFunction& f, double alpha);

/// Transpose of caputo_left_midpoints: given cell cotangents y (n * dim values),
/// returns the node cotangents (n + 1) * dim.
std::vector<double> caputo_left_midpoints_adjoint(const Grid& grid, std::size_t dim,
                                                  const std::vector<double>& y, double alpha);

}  // namespace fracnoether
