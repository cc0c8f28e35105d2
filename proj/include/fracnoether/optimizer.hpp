#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracnoether {

/// Returns f(x) and writes ∇f(x) into grad.
using ObjectiveFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Applies an approximate inverse Hessian: out = P g.
using Preconditioner = std::function<void(std::span<const double> g, std::span<double> out)>;

struct LbfgsOptions {
  double gradient_tol = 1e-8;      ///< stop when max |∇f| falls below this
  std::size_t max_iterations = 10000;
  std::size_t memory = 10;
  int max_halvings = 60;           ///< backtracking budget per line search
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;      ///< max-norm of the final gradient
  std::size_t iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with backtracking (Armijo) line search.
///
/// A preconditioner, when given, replaces the identity as the initial inverse
/// Hessian (scaled each iteration by the usual s'y / y'Py factor). Non-finite
/// trial values shrink the step; running out of halvings throws NumericalError.
/// Hitting the iteration cap is reported through `converged = false`.
LbfgsResult minimize_lbfgs(const ObjectiveFn& objective, std::vector<double> x0,
                           const LbfgsOptions& options, const Preconditioner& preconditioner = {});

/// Inverse of a dense forward-difference Hessian built from the analytic
/// gradient at x, Cholesky-factored with a diagonal shift if not positive definite.
/// Costs x.size() gradient evaluations.
Preconditioner dense_hessian_preconditioner(const ObjectiveFn& objective,
                                            std::span<const double> x);

/// Inverse of the block tridiagonal matrix (1/h) tridiag(-1, 2, -1) acting on
/// `blocks` consecutive node values with `dim` components each (Dirichlet ends).
Preconditioner stiffness_preconditioner(std::size_t blocks, std::size_t dim, double h);

}  // namespace fracnoether
