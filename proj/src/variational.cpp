#include "fracnoether/variational.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "fracnoether/error.hpp"
#include "fracnoether/fracops.hpp"
#include "fracnoether/optimizer.hpp"

namespace fracnoether {

namespace {

void require_trajectory(const VariationalProblem& p, const GridFunction& q, const char* what) {
  if (!(q.grid() == p.grid)) throw InputError(std::string(what) + ": trajectory grid mismatch");
  if (q.dim() != p.dim()) throw InputError(std::string(what) + ": trajectory dimension mismatch");
  q.require_finite(what);
}

[[noreturn]] void throw_non_finite(const char* what, std::size_t node, double t) {
  std::ostringstream msg;
  msg << what << ": non-finite Lagrangian evaluation at node " << node << " (t = " << t << ")";
  throw NumericalError(msg.str());
}

// Dense Hessians get expensive beyond this many unknowns; fall back to the
// kinetic stiffness operator.
constexpr std::size_t kDenseLimit = 1600;

}  // namespace

void VariationalProblem::validate() const {
  require_derivative_order(alpha);
  if (q_a.size() != dim() || q_b.size() != dim()) {
    throw InputError("boundary values must have dimension " + std::to_string(dim()));
  }
  for (double v : q_a) {
    if (!std::isfinite(v)) throw InputError("boundary value q_a is not finite");
  }
  for (double v : q_b) {
    if (!std::isfinite(v)) throw InputError("boundary value q_b is not finite");
  }
}

LagrangianSamples sample_lagrangian(const VariationalProblem& p, const GridFunction& q) {
  p.validate();
  require_trajectory(p, q, "sample_lagrangian");
  LagrangianSamples s{classical_derivative(q),
                      caputo_left(q, p.alpha),
                      std::vector<double>(q.size()),
                      GridFunction(p.grid, p.dim()),
                      GridFunction(p.grid, p.dim()),
                      GridFunction(p.grid, p.dim())};
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double t = p.grid.node(i);
    s.value[i] = p.lagrangian(t, q.row(i), s.velocity.row(i), s.caputo_velocity.row(i));
    if (!std::isfinite(s.value[i])) throw_non_finite("sample_lagrangian", i, t);
    p.lagrangian.partials(t, q.row(i), s.velocity.row(i), s.caputo_velocity.row(i), s.dq.row(i),
                          s.dv.row(i), s.dw.row(i));
  }
  if (!s.dq.all_finite() || !s.dv.all_finite() || !s.dw.all_finite()) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (s.dq.flagged(i) || s.dv.flagged(i) || s.dw.flagged(i)) {
        throw_non_finite("sample_lagrangian (partials)", i, p.grid.node(i));
      }
    }
  }
  return s;
}

double action_value(const VariationalProblem& p, const GridFunction& q) {
  p.validate();
  require_trajectory(p, q, "action_value");
  const GridFunction v = classical_derivative(q);
  const GridFunction w = caputo_left(q, p.alpha);
  std::vector<double> integrand(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double t = p.grid.node(i);
    integrand[i] = p.lagrangian(t, q.row(i), v.row(i), w.row(i));
    if (!std::isfinite(integrand[i])) throw_non_finite("action_value", i, t);
  }
  return trapezoid(p.grid, integrand);
}

double frechet_differential(const VariationalProblem& p, const GridFunction& q,
                            const GridFunction& h) {
  const LagrangianSamples s = sample_lagrangian(p, q);
  require_trajectory(p, h, "frechet_differential variation");
  const std::size_t last = h.size() - 1;
  double scale = 1.0;
  for (double v : h.values()) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < h.dim(); ++k) {
    if (std::abs(h(0, k)) > 1e-12 * scale || std::abs(h(last, k)) > 1e-12 * scale) {
      throw InputError("frechet_differential: variation must vanish at both endpoints");
    }
  }
  const GridFunction hdot = classical_derivative(h);
  const GridFunction hcap = caputo_left(h, p.alpha);
  std::vector<double> integrand(h.size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t k = 0; k < h.dim(); ++k) {
      integrand[i] += s.dq(i, k) * h(i, k) + s.dv(i, k) * hdot(i, k) + s.dw(i, k) * hcap(i, k);
    }
  }
  return trapezoid(p.grid, integrand);
}

GridFunction el_residual(const VariationalProblem& p, const GridFunction& q) {
  const LagrangianSamples s = sample_lagrangian(p, q);
  const GridFunction dv_dot = classical_derivative(s.dv);
  const GridFunction dw_rl = rl_derivative_right(s.dw, p.alpha);
  GridFunction r(p.grid, p.dim());
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    for (std::size_t k = 0; k < p.dim(); ++k) {
      r(i, k) = s.dq(i, k) - dv_dot(i, k) + dw_rl(i, k);
    }
  }
  return r;
}

namespace {

struct CellState {
  std::vector<double> mean;   // q̄ per cell
  std::vector<double> slope;  // (q_{k+1} - q_k)/h per cell
  std::vector<double> cap;    // midpoint Caputo per cell
};

CellState cell_state(const VariationalProblem& p, const GridFunction& q) {
  const std::size_t n = p.grid.intervals();
  const std::size_t dim = p.dim();
  const double h = p.grid.step();
  CellState c{std::vector<double>(n * dim), std::vector<double>(n * dim),
              caputo_left_midpoints(q, p.alpha)};
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t d = 0; d < dim; ++d) {
      c.mean[k * dim + d] = 0.5 * (q(k, d) + q(k + 1, d));
      c.slope[k * dim + d] = (q(k + 1, d) - q(k, d)) / h;
    }
  }
  return c;
}

double midpoint_time(const Grid& g, std::size_t k) {
  return g.a() + (static_cast<double>(k) + 0.5) * g.step();
}

}  // namespace

double discrete_action(const VariationalProblem& p, const GridFunction& q) {
  p.validate();
  require_trajectory(p, q, "discrete_action");
  const std::size_t n = p.grid.intervals();
  const std::size_t dim = p.dim();
  const CellState c = cell_state(p, q);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = midpoint_time(p.grid, k);
    const double value = p.lagrangian(t, {c.mean.data() + k * dim, dim},
                                      {c.slope.data() + k * dim, dim}, {c.cap.data() + k * dim, dim});
    if (!std::isfinite(value)) return std::numeric_limits<double>::quiet_NaN();
    sum += value;
  }
  return sum * p.grid.step();
}

std::vector<double> discrete_action_gradient(const VariationalProblem& p, const GridFunction& q) {
  p.validate();
  require_trajectory(p, q, "discrete_action_gradient");
  const std::size_t n = p.grid.intervals();
  const std::size_t dim = p.dim();
  const double h = p.grid.step();
  const CellState c = cell_state(p, q);
  std::vector<double> grad((n + 1) * dim, 0.0);
  std::vector<double> cap_cotangent(n * dim);
  std::vector<double> dq(dim), dv(dim), dw(dim);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = midpoint_time(p.grid, k);
    p.lagrangian.partials(t, {c.mean.data() + k * dim, dim}, {c.slope.data() + k * dim, dim},
                          {c.cap.data() + k * dim, dim}, dq, dv, dw);
    for (std::size_t d = 0; d < dim; ++d) {
      grad[k * dim + d] += 0.5 * h * dq[d] - dv[d];
      grad[(k + 1) * dim + d] += 0.5 * h * dq[d] + dv[d];
      cap_cotangent[k * dim + d] = h * dw[d];
    }
  }
  const std::vector<double> back = caputo_left_midpoints_adjoint(p.grid, dim, cap_cotangent, p.alpha);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += back[i];
  return grad;
}

ExtremalSolution describe_trajectory(const VariationalProblem& p, const GridFunction& q) {
  const LagrangianSamples s = sample_lagrangian(p, q);
  GridFunction residual = el_residual(p, q);
  ExtremalSolution sol{q, s.velocity, s.caputo_velocity, residual};
  sol.action = trapezoid(p.grid, s.value);
  sol.el_residual_norm = interior_max_norm(residual);
  return sol;
}

ExtremalSolution solve_extremal(const VariationalProblem& p, const std::optional<GridFunction>& init,
                                const SolveOptions& options) {
  p.validate();
  const std::size_t n = p.grid.intervals();
  const std::size_t dim = p.dim();

  GridFunction start(p.grid, dim);
  if (init) {
    require_trajectory(p, *init, "solve_extremal initial guess");
    for (std::size_t d = 0; d < dim; ++d) {
      if ((*init)(0, d) != p.q_a[d] || (*init)(n, d) != p.q_b[d]) {
        throw InputError("solve_extremal: initial guess does not match the boundary values");
      }
    }
    start = *init;
  } else {
    for (std::size_t i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(n);
      for (std::size_t d = 0; d < dim; ++d) start(i, d) = (1.0 - s) * p.q_a[d] + s * p.q_b[d];
    }
    for (std::size_t d = 0; d < dim; ++d) {
      start(0, d) = p.q_a[d];
      start(n, d) = p.q_b[d];
    }
  }

  const std::size_t unknowns = (n - 1) * dim;
  GridFunction work = start;
  ObjectiveFn objective = [&](std::span<const double> x, std::span<double> grad) {
    std::copy(x.begin(), x.end(), work.values().begin() + static_cast<std::ptrdiff_t>(dim));
    for (double v : x) {
      if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
    }
    const double value = discrete_action(p, work);
    if (!std::isfinite(value)) return value;
    const std::vector<double> full = discrete_action_gradient(p, work);
    std::copy(full.begin() + static_cast<std::ptrdiff_t>(dim),
              full.begin() + static_cast<std::ptrdiff_t>(dim + unknowns), grad.begin());
    return value;
  };

  std::vector<double> x0(start.values().begin() + static_cast<std::ptrdiff_t>(dim),
                         start.values().begin() + static_cast<std::ptrdiff_t>(dim + unknowns));
  LbfgsOptions lbfgs;
  lbfgs.gradient_tol = options.gradient_tol;
  lbfgs.max_iterations = options.max_iterations ? options.max_iterations : 500 * dim * n;
  const Preconditioner precond = unknowns <= kDenseLimit
                                     ? dense_hessian_preconditioner(objective, x0)
                                     : stiffness_preconditioner(n - 1, dim, p.grid.step());
  const LbfgsResult result = minimize_lbfgs(objective, std::move(x0), lbfgs, precond);
  if (!result.converged) {
    std::ostringstream msg;
    msg << "solve_extremal did not converge in " << result.iterations
        << " iterations; final gradient norm " << result.gradient_norm;
    throw NumericalError(msg.str());
  }

  GridFunction q = start;
  std::copy(result.x.begin(), result.x.end(), q.values().begin() + static_cast<std::ptrdiff_t>(dim));
  ExtremalSolution sol = describe_trajectory(p, q);
  sol.gradient_norm = result.gradient_norm;
  sol.iterations = result.iterations;
  return sol;
}

}  // namespace fracnoether
