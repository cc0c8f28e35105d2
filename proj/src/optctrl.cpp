#include "fracnoether/optctrl.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "fracnoether/error.hpp"
#include "fracnoether/fracops.hpp"
#include "fracnoether/optimizer.hpp"

namespace fracnoether {

namespace {

constexpr std::size_t kMaxDim = 4;
constexpr std::size_t kMaxNodes = 2048;
constexpr std::size_t kDenseLimit = 2400;

using Vec = std::vector<double>;

// y += Jᵀ x for a row-major rows×cols matrix J.
void add_transpose_product(const Vec& J, std::size_t rows, std::size_t cols, std::span<const double> x,
                           std::span<double> y, double scale = 1.0) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) y[c] += scale * J[r * cols + c] * x[r];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void require_state(const ControlProblem& cp, const PontryaginState& st) {
  const auto& d = cp.dims();
  auto check = [&](const GridFunction& g, std::size_t dim, const char* name) {
    if (!(g.grid() == cp.grid()) || g.dim() != dim) {
      throw InputError(std::string("Pontryagin state: ") + name + " has the wrong grid or dimension");
    }
  };
  check(st.q, d.n, "q");
  check(st.u, d.m, "u");
  check(st.mu, cp.mu_width(), "mu");
  check(st.p, d.n, "p");
  check(st.p_alpha, d.n, "p_alpha");
  for (std::size_t k = 0; k < d.n; ++k) {
    if (st.q(0, k) != cp.q_a()[k]) throw InputError("Pontryagin state: q(a) differs from q_a");
  }
}

// Evaluations of L, φ, ρ and their derivatives at one point.
struct PointEval {
  double L = 0.0;
  Vec Lq, Lu, Lmu;
  Vec phi, phi_q, phi_u;
  Vec rho, rho_q, rho_mu;

  explicit PointEval(const ControlDims& d)
      : Lq(d.n), Lu(d.m), Lmu(std::max<std::size_t>(d.d, 1)), phi(d.n), phi_q(d.n * d.n),
        phi_u(d.n * d.m), rho(d.n), rho_q(d.n * d.n), rho_mu(d.n * d.d) {}

  void evaluate(const ControlProblem& cp, double t, std::span<const double> q,
                std::span<const double> u, std::span<const double> mu) {
    const auto& f = cp.functions();
    const auto& d = cp.dims();
    L = f.L(t, q, u, mu);
    f.L_grad(t, q, u, mu, Lq, Lu, std::span<double>(Lmu.data(), d.d));
    f.phi(t, q, u, phi);
    f.phi_jac(t, q, u, phi_q, phi_u);
    if (cp.fractional()) {
      f.rho(t, q, mu, rho);
      f.rho_jac(t, q, mu, rho_q, rho_mu);
    }
  }
};

}  // namespace

ControlProblem::ControlProblem(ControlDims dims, ControlFunctions fns, double alpha, Grid grid,
                               std::vector<double> q_a, std::optional<std::vector<double>> q_b,
                               bool autonomous)
    : dims_(dims), fns_(std::move(fns)), alpha_(alpha), grid_(grid), q_a_(std::move(q_a)),
      q_b_(std::move(q_b)), autonomous_(autonomous) {
  if (dims_.n == 0 || dims_.m == 0) throw InputError("control problem: n and m must be positive");
  if (dims_.n > kMaxDim || dims_.m > kMaxDim || dims_.d > kMaxDim) {
    throw InputError("control problem: dimensions are limited to 4");
  }
  require_derivative_order(alpha_);
  if (!fns_.L || !fns_.L_grad || !fns_.phi || !fns_.phi_jac) {
    throw InputError("control problem: L, its gradient, phi and its Jacobian are required");
  }
  if (fractional() && (!fns_.rho || !fns_.rho_jac)) {
    throw InputError("control problem: rho and its Jacobian are required when d > 0");
  }
  if (q_a_.size() != dims_.n) throw InputError("control problem: q_a must have dimension n");
  if (q_b_ && q_b_->size() != dims_.n) throw InputError("control problem: q_b must have dimension n");
  for (double v : q_a_) {
    if (!std::isfinite(v)) throw InputError("control problem: q_a is not finite");
  }
  if (q_b_) {
    for (double v : *q_b_) {
      if (!std::isfinite(v)) throw InputError("control problem: q_b is not finite");
    }
  }
  validate_partials();
}

void ControlProblem::validate_partials() const {
  const auto& d = dims_;
  const std::size_t dm = mu_width();
  std::mt19937_64 rng(0xc0417e);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vec q(d.n), u(d.m), mu(dm, 0.0);
  PointEval e(d);
  Vec up(d.n), down(d.n);
  constexpr double kRelTol = 1e-5;

  auto check = [](double analytic, double numeric, const std::string& name) {
    const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    if (!(std::abs(analytic - numeric) <= kRelTol * scale)) {
      std::ostringstream msg;
      msg << "control problem: " << name << " disagrees with finite differences (analytic "
          << analytic << ", numeric " << numeric << ")";
      throw InputError(msg.str());
    }
  };

  for (int probe = 0; probe < 100; ++probe) {
    const double t = grid_.a() + 0.5 * (1.0 + unit(rng)) * (grid_.b() - grid_.a());
    for (double& x : q) x = 1.5 * unit(rng);
    for (double& x : u) x = 1.5 * unit(rng);
    for (std::size_t k = 0; k < d.d; ++k) mu[k] = 1.5 * unit(rng);
    e.evaluate(*this, t, q, u, mu);

    auto scalar_fd = [&](Vec& x, std::size_t k) {
      const double x0 = x[k];
      const double step = fd_step(x0);
      x[k] = x0 + step;
      const double hi = fns_.L(t, q, u, mu);
      x[k] = x0 - step;
      const double lo = fns_.L(t, q, u, mu);
      x[k] = x0;
      return (hi - lo) / (2.0 * step);
    };
    for (std::size_t k = 0; k < d.n; ++k) check(e.Lq[k], scalar_fd(q, k), "dL/dq");
    for (std::size_t k = 0; k < d.m; ++k) check(e.Lu[k], scalar_fd(u, k), "dL/du");
    for (std::size_t k = 0; k < d.d; ++k) check(e.Lmu[k], scalar_fd(mu, k), "dL/dmu");

    // Column k of a Jacobian by central differences of a vector map.
    auto vector_fd = [&](const auto& map, Vec& x, std::size_t k) {
      const double x0 = x[k];
      const double step = fd_step(x0);
      x[k] = x0 + step;
      map(up);
      x[k] = x0 - step;
      map(down);
      x[k] = x0;
      Vec col(d.n);
      for (std::size_t r = 0; r < d.n; ++r) col[r] = (up[r] - down[r]) / (2.0 * step);
      return col;
    };
    auto phi_map = [&](Vec& out) { fns_.phi(t, q, u, out); };
    for (std::size_t k = 0; k < d.n; ++k) {
      const Vec col = vector_fd(phi_map, q, k);
      for (std::size_t r = 0; r < d.n; ++r) check(e.phi_q[r * d.n + k], col[r], "dphi/dq");
    }
    for (std::size_t k = 0; k < d.m; ++k) {
      const Vec col = vector_fd(phi_map, u, k);
      for (std::size_t r = 0; r < d.n; ++r) check(e.phi_u[r * d.m + k], col[r], "dphi/du");
    }
    if (fractional()) {
      auto rho_map = [&](Vec& out) { fns_.rho(t, q, std::span<const double>(mu.data(), d.d), out); };
      for (std::size_t k = 0; k < d.n; ++k) {
        const Vec col = vector_fd(rho_map, q, k);
        for (std::size_t r = 0; r < d.n; ++r) check(e.rho_q[r * d.n + k], col[r], "drho/dq");
      }
      for (std::size_t k = 0; k < d.d; ++k) {
        const Vec col = vector_fd(rho_map, mu, k);
        for (std::size_t r = 0; r < d.n; ++r) check(e.rho_mu[r * d.d + k], col[r], "drho/dmu");
      }
    }
  }
}

ControlProblem reduction_problem(const LagrangianSpec& lagrangian, double alpha, Grid grid,
                                 std::vector<double> q_a, std::optional<std::vector<double>> q_b) {
  const std::size_t n = lagrangian.dim();
  ControlFunctions f;
  f.L = [lagrangian](double t, std::span<const double> q, std::span<const double> u,
                     std::span<const double> mu) { return lagrangian(t, q, u, mu); };
  f.L_grad = [lagrangian](double t, std::span<const double> q, std::span<const double> u,
                          std::span<const double> mu, std::span<double> dq, std::span<double> du,
                          std::span<double> dmu) { lagrangian.partials(t, q, u, mu, dq, du, dmu); };
  auto identity_map = [](double, std::span<const double>, std::span<const double> x,
                         std::span<double> out) { std::copy(x.begin(), x.end(), out.begin()); };
  auto identity_jac = [n](double, std::span<const double>, std::span<const double>,
                          std::span<double> jq, std::span<double> jx) {
    std::fill(jq.begin(), jq.end(), 0.0);
    std::fill(jx.begin(), jx.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) jx[k * n + k] = 1.0;
  };
  f.phi = identity_map;
  f.phi_jac = identity_jac;
  f.rho = identity_map;
  f.rho_jac = identity_jac;
  return ControlProblem({n, n, n}, std::move(f), alpha, grid, std::move(q_a), std::move(q_b),
                        lagrangian.autonomous());
}

ControlProblem reduction_problem(const VariationalProblem& p, bool fix_terminal) {
  p.validate();
  return reduction_problem(p.lagrangian, p.alpha, p.grid, p.q_a,
                           fix_terminal ? std::optional<std::vector<double>>(p.q_b) : std::nullopt);
}

double hamiltonian(const ControlProblem& cp, const PontryaginState& state, std::size_t i) {
  require_state(cp, state);
  if (i >= cp.grid().nodes()) throw InputError("hamiltonian: node index out of range");
  PointEval e(cp.dims());
  e.evaluate(cp, cp.grid().node(i), state.q.row(i), state.u.row(i), state.mu.row(i));
  double H = e.L + dot(state.p.row(i), e.phi);
  if (cp.fractional()) H += dot(state.p_alpha.row(i), e.rho);
  return H;
}

GridFunction hamiltonian_along(const ControlProblem& cp, const PontryaginState& state) {
  GridFunction H(cp.grid(), 1);
  for (std::size_t i = 0; i < H.size(); ++i) H(i) = hamiltonian(cp, state, i);
  return H;
}

PontryaginResiduals pontryagin_residuals(const ControlProblem& cp, const PontryaginState& state) {
  require_state(cp, state);
  const auto& d = cp.dims();
  const Grid& g = cp.grid();
  const GridFunction qdot = classical_derivative(state.q);
  const GridFunction cq = caputo_left(state.q, cp.alpha());
  const GridFunction pdot = classical_derivative(state.p);
  const GridFunction dpa = rl_derivative_right(state.p_alpha, cp.alpha());
  PontryaginResiduals r{GridFunction(g, d.n), GridFunction(g, d.n), GridFunction(g, d.n),
                        GridFunction(g, d.m), GridFunction(g, cp.mu_width())};
  PointEval e(d);
  Vec adj(d.n), ctl(d.m), fctl(cp.mu_width());
  for (std::size_t i = 1; i + 1 < g.nodes(); ++i) {
    e.evaluate(cp, g.node(i), state.q.row(i), state.u.row(i), state.mu.row(i));
    adj = e.Lq;
    add_transpose_product(e.phi_q, d.n, d.n, state.p.row(i), adj);
    ctl = e.Lu;
    add_transpose_product(e.phi_u, d.n, d.m, state.p.row(i), ctl);
    if (cp.fractional()) {
      add_transpose_product(e.rho_q, d.n, d.n, state.p_alpha.row(i), adj);
      fctl = e.Lmu;
      add_transpose_product(e.rho_mu, d.n, d.d, state.p_alpha.row(i), fctl);
    }
    for (std::size_t k = 0; k < d.n; ++k) {
      r.dynamics(i, k) = e.phi[k] - qdot(i, k);
      r.fractional(i, k) = cp.fractional() ? e.rho[k] - cq(i, k) : 0.0;
      r.adjoint(i, k) = adj[k] + pdot(i, k) - dpa(i, k);
    }
    for (std::size_t k = 0; k < d.m; ++k) r.control(i, k) = ctl[k];
    for (std::size_t k = 0; k < d.d; ++k) r.fcontrol(i, k) = fctl[k];
  }
  for (const GridFunction* x : {&r.dynamics, &r.fractional, &r.adjoint, &r.control, &r.fcontrol}) {
    if (!x->all_finite()) throw NumericalError("pontryagin_residuals: non-finite residual");
  }
  return r;
}

PontryaginState variational_substitution(const VariationalProblem& p, const GridFunction& q) {
  const LagrangianSamples s = sample_lagrangian(p, q);
  PontryaginState st{q, s.velocity, s.caputo_velocity, s.dv, s.dw};
  for (double& x : st.p.values()) x = -x;
  for (double& x : st.p_alpha.values()) x = -x;
  return st;
}

ControlSolution solve_control(const ControlProblem& cp, const ControlSolveOptions& options) {
  const auto& d = cp.dims();
  const Grid& grid = cp.grid();
  const std::size_t n = grid.intervals();
  if (grid.nodes() > kMaxNodes + 1) throw InputError("solve_control: grids are limited to 2048 intervals");
  if (options.rounds == 0 || !(options.initial_weight > 0.0) || !(options.weight_factor > 1.0)) {
    throw InputError("solve_control: invalid penalty schedule");
  }
  const double h = grid.step();
  const bool fixed_end = cp.q_b().has_value();
  const std::size_t free_nodes = fixed_end ? n - 1 : n;
  const std::size_t nq = free_nodes * d.n;
  const std::size_t nu = n * d.m;
  const std::size_t nmu = n * d.d;
  const std::size_t unknowns = nq + nu + nmu;
  const std::size_t dm = cp.mu_width();

  GridFunction Q(grid, d.n);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n);
    for (std::size_t k = 0; k < d.n; ++k) {
      Q(i, k) = fixed_end ? (1.0 - s) * cp.q_a()[k] + s * (*cp.q_b())[k] : cp.q_a()[k];
    }
  }
  for (std::size_t k = 0; k < d.n; ++k) {
    Q(0, k) = cp.q_a()[k];
    if (fixed_end) Q(n, k) = (*cp.q_b())[k];
  }

  auto midpoint = [&](std::size_t c) { return grid.a() + (static_cast<double>(c) + 0.5) * h; };

  // Unpacks x into Q (free nodes), U and M (cell values).
  Vec U(nu, 0.0), M(n * dm, 0.0);
  auto unpack = [&](std::span<const double> x) {
    for (std::size_t j = 0; j < free_nodes; ++j) {
      for (std::size_t k = 0; k < d.n; ++k) Q(j + 1, k) = x[j * d.n + k];
    }
    std::copy(x.begin() + static_cast<std::ptrdiff_t>(nq),
              x.begin() + static_cast<std::ptrdiff_t>(nq + nu), U.begin());
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t k = 0; k < d.d; ++k) M[c * dm + k] = x[nq + nu + c * d.d + k];
    }
  };

  // Cell state and residuals for the current Q, U, M.
  struct Cells {
    Vec mean, slope, cap, r1, r2;
  };
  auto cells = [&]() {
    Cells cs{Vec(n * d.n), Vec(n * d.n), Vec(), Vec(n * d.n, 0.0), Vec(n * d.n, 0.0)};
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t k = 0; k < d.n; ++k) {
        cs.mean[c * d.n + k] = 0.5 * (Q(c, k) + Q(c + 1, k));
        cs.slope[c * d.n + k] = (Q(c + 1, k) - Q(c, k)) / h;
      }
    }
    if (cp.fractional()) cs.cap = caputo_left_midpoints(Q, cp.alpha());
    return cs;
  };

  PointEval e(d);
  double weight = options.initial_weight;

  ObjectiveFn objective = [&](std::span<const double> x, std::span<double> grad) {
    for (double v : x) {
      if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
    }
    unpack(x);
    Cells cs = cells();
    Vec gnode((n + 1) * d.n, 0.0);
    Vec cap_cot(cp.fractional() ? n * d.n : 0, 0.0);
    std::fill(grad.begin(), grad.end(), 0.0);
    Vec gmean(d.n), gu(d.m), gmu(dm);
    double J = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      std::span<const double> mean(cs.mean.data() + c * d.n, d.n);
      std::span<const double> u(U.data() + c * d.m, d.m);
      std::span<const double> mu(M.data() + c * dm, dm);
      e.evaluate(cp, midpoint(c), mean, u, mu);
      double penalty = 0.0;
      for (std::size_t k = 0; k < d.n; ++k) {
        cs.r1[c * d.n + k] = e.phi[k] - cs.slope[c * d.n + k];
        penalty += cs.r1[c * d.n + k] * cs.r1[c * d.n + k];
        if (cp.fractional()) {
          cs.r2[c * d.n + k] = e.rho[k] - cs.cap[c * d.n + k];
          penalty += cs.r2[c * d.n + k] * cs.r2[c * d.n + k];
        }
      }
      J += h * (e.L + 0.5 * weight * penalty);
      std::span<const double> r1(cs.r1.data() + c * d.n, d.n);
      std::span<const double> r2(cs.r2.data() + c * d.n, d.n);

      gmean = e.Lq;
      add_transpose_product(e.phi_q, d.n, d.n, r1, gmean, weight);
      gu = e.Lu;
      add_transpose_product(e.phi_u, d.n, d.m, r1, gu, weight);
      if (cp.fractional()) {
        add_transpose_product(e.rho_q, d.n, d.n, r2, gmean, weight);
        std::copy(e.Lmu.begin(), e.Lmu.end(), gmu.begin());
        add_transpose_product(e.rho_mu, d.n, d.d, r2, gmu, weight);
      }
      for (std::size_t k = 0; k < d.n; ++k) {
        gnode[c * d.n + k] += 0.5 * h * gmean[k] + weight * r1[k];
        gnode[(c + 1) * d.n + k] += 0.5 * h * gmean[k] - weight * r1[k];
        if (cp.fractional()) cap_cot[c * d.n + k] = -h * weight * r2[k];
      }
      for (std::size_t k = 0; k < d.m; ++k) grad[nq + c * d.m + k] = h * gu[k];
      for (std::size_t k = 0; k < d.d; ++k) grad[nq + nu + c * d.d + k] = h * gmu[k];
    }
    if (!std::isfinite(J)) return J;
    if (cp.fractional()) {
      const Vec back = caputo_left_midpoints_adjoint(grid, d.n, cap_cot, cp.alpha());
      for (std::size_t i = 0; i < back.size(); ++i) gnode[i] += back[i];
    }
    std::copy(gnode.begin() + static_cast<std::ptrdiff_t>(d.n),
              gnode.begin() + static_cast<std::ptrdiff_t>(d.n + nq), grad.begin());
    return J;
  };

  Vec x(unknowns, 0.0);
  for (std::size_t j = 0; j < free_nodes; ++j) {
    for (std::size_t k = 0; k < d.n; ++k) x[j * d.n + k] = Q(j + 1, k);
  }

  ControlSolution sol{PontryaginState{Q, GridFunction(grid, d.m), GridFunction(grid, dm),
                                      GridFunction(grid, d.n), GridFunction(grid, d.n)},
                      0.0, 0.0, 0.0, {}, 0, 0.0};
  double previous = 0.0;
  for (std::size_t round = 0; round < options.rounds; ++round) {
    LbfgsOptions lo;
    lo.gradient_tol = options.gradient_tol * weight * h;
    lo.max_iterations = options.max_iterations ? options.max_iterations : 500 * unknowns;
    Preconditioner precond;
    if (unknowns <= kDenseLimit) precond = dense_hessian_preconditioner(objective, x);
    const LbfgsResult res = minimize_lbfgs(objective, x, lo, precond);
    x = res.x;
    sol.iterations += res.iterations;
    unpack(x);
    Vec dummy(unknowns);
    objective(x, dummy);  // refresh residuals at the accepted point
    Cells cs = cells();
    double phi_defect = 0.0;
    double rho_defect = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      e.evaluate(cp, midpoint(c), std::span<const double>(cs.mean.data() + c * d.n, d.n),
                 std::span<const double>(U.data() + c * d.m, d.m),
                 std::span<const double>(M.data() + c * dm, dm));
      for (std::size_t k = 0; k < d.n; ++k) {
        phi_defect = std::max(phi_defect, std::abs(e.phi[k] - cs.slope[c * d.n + k]));
        if (cp.fractional()) {
          rho_defect = std::max(rho_defect, std::abs(e.rho[k] - cs.cap[c * d.n + k]));
        }
      }
    }
    const double defect = std::max(phi_defect, rho_defect);
    if (!res.converged) {
      std::ostringstream msg;
      msg << "solve_control did not converge in round " << round + 1 << " (weight " << weight
          << "): gradient norm " << res.gradient_norm << ", phi defect " << phi_defect
          << ", rho defect " << rho_defect;
      throw NumericalError(msg.str());
    }
    if (round > 0 && previous > 1e-12 && defect > 0.5 * previous) {
      std::ostringstream msg;
      msg << "solve_control: penalty defect not decreasing (" << previous << " -> " << defect
          << " at weight " << weight << "); the dynamics look infeasible";
      throw NumericalError(msg.str());
    }
    sol.round_defects.push_back(defect);
    sol.phi_defect = phi_defect;
    sol.rho_defect = rho_defect;
    sol.weight = weight;
    previous = defect;

    if (round + 1 == options.rounds) {
      // Nodal reconstruction of controls and multipliers.
      auto to_nodes = [&](const Vec& cellv, std::size_t width, GridFunction& out) {
        for (std::size_t k = 0; k < width; ++k) {
          for (std::size_t i = 1; i < n; ++i) {
            out(i, k) = 0.5 * (cellv[(i - 1) * width + k] + cellv[i * width + k]);
          }
          out(0, k) = 1.5 * cellv[k] - 0.5 * cellv[width + k];
          out(n, k) = 1.5 * cellv[(n - 1) * width + k] - 0.5 * cellv[(n - 2) * width + k];
        }
      };
      Vec pc(n * d.n), pac(n * d.n, 0.0);
      double cost = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        e.evaluate(cp, midpoint(c), std::span<const double>(cs.mean.data() + c * d.n, d.n),
                   std::span<const double>(U.data() + c * d.m, d.m),
                   std::span<const double>(M.data() + c * dm, dm));
        cost += h * e.L;
        for (std::size_t k = 0; k < d.n; ++k) {
          pc[c * d.n + k] = weight * (e.phi[k] - cs.slope[c * d.n + k]);
          if (cp.fractional()) pac[c * d.n + k] = weight * (e.rho[k] - cs.cap[c * d.n + k]);
        }
      }
      sol.cost = cost;
      sol.state.q = Q;
      to_nodes(U, d.m, sol.state.u);
      if (cp.fractional()) to_nodes(M, dm, sol.state.mu);
      to_nodes(pc, d.n, sol.state.p);
      to_nodes(pac, d.n, sol.state.p_alpha);
    } else {
      weight *= options.weight_factor;
    }
  }
  return sol;
}

GridFunction control_noether_quantity(const ControlProblem& cp, const PontryaginState& state,
                                      const SymmetryGroup& s, std::size_t R) {
  require_state(cp, state);
  s.validate();
  if (s.dim != cp.dims().n) throw InputError("control_noether_quantity: symmetry dimension mismatch");
  const std::size_t n = cp.dims().n;
  GridFunction f(cp.grid(), n);
  for (std::size_t i = 0; i < f.size(); ++i) s.f2(cp.grid().node(i), state.q.row(i), f.row(i));
  const GridFunction series = transfer_series(f, state.p_alpha, cp.alpha(), R).sum();
  const GridFunction H = hamiltonian_along(cp, state);
  const GridFunction cq = caputo_left(state.q, cp.alpha());
  GridFunction c(cp.grid(), 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double corrected = H(i) - (1.0 - cp.alpha()) * dot(state.p_alpha.row(i), cq.row(i));
    c(i) = -dot(f.row(i), state.p.row(i)) - series(i) + s.tau(cp.grid().node(i)) * corrected;
  }
  return c;
}

GridFunction autonomous_control_quantity(const ControlProblem& cp, const PontryaginState& state) {
  if (!cp.autonomous()) throw InputError("autonomous_control_quantity requires an autonomous problem");
  const GridFunction H = hamiltonian_along(cp, state);
  const GridFunction cq = caputo_left(state.q, cp.alpha());
  GridFunction c(cp.grid(), 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    c(i) = H(i) - (1.0 - cp.alpha()) * dot(state.p_alpha.row(i), cq.row(i));
  }
  return c;
}

}  // namespace fracnoether
