#include "fracnoether/noether.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "fracnoether/error.hpp"
#include "fracnoether/fracops.hpp"

namespace fracnoether {

namespace {

bool close(double x, double y, double tol) { return std::abs(x - y) <= tol * (1.0 + std::abs(y)); }

[[noreturn]] void symmetry_error(const SymmetryGroup& s, const std::string& what) {
  throw InputError("symmetry group '" + s.name + "': " + what);
}

GridFunction generator_along(const SymmetryGroup& s, const GridFunction& q) {
  GridFunction f(q.grid(), q.dim());
  for (std::size_t i = 0; i < q.size(); ++i) s.f2(q.grid().node(i), q.row(i), f.row(i));
  return f;
}

void require_matching_dim(const SymmetryGroup& s, std::size_t dim) {
  if (s.dim != dim) {
    throw InputError("symmetry group '" + s.name + "' acts on dimension " + std::to_string(s.dim) +
                     ", problem has dimension " + std::to_string(dim));
  }
}

}  // namespace

void SymmetryGroup::validate() const {
  if (!psi1 || !psi2 || !tau || !f2) symmetry_error(*this, "all four maps must be provided");
  if (dim == 0) symmetry_error(*this, "dimension must be positive");
  std::mt19937_64 rng(0x5e11a9);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> q(dim), a(dim), b(dim), c(dim), plus(dim), minus(dim), f(dim);
  const double delta = 1e-5;
  for (int probe = 0; probe < 16; ++probe) {
    const double t = 2.0 * unit(rng);
    const double e1 = 0.5 * unit(rng);
    const double e2 = 0.5 * unit(rng);
    for (double& x : q) x = 2.0 * unit(rng);

    if (!close(psi1(0.0, t), t, 1e-12)) symmetry_error(*this, "psi1(0, t) is not the identity");
    psi2(0.0, q, a);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!close(a[k], q[k], 1e-12)) symmetry_error(*this, "psi2(0, q) is not the identity");
    }

    if (!close(psi1(e1, psi1(e2, t)), psi1(e1 + e2, t), 1e-8)) {
      symmetry_error(*this, "psi1 violates the group law");
    }
    psi2(e2, q, a);
    psi2(e1, a, b);
    psi2(e1 + e2, q, c);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!close(b[k], c[k], 1e-8)) symmetry_error(*this, "psi2 violates the group law");
    }

    const double tau_fd = (psi1(delta, t) - psi1(-delta, t)) / (2.0 * delta);
    if (!close(tau(t), tau_fd, 1e-6)) symmetry_error(*this, "tau does not match d psi1/d eps");
    psi2(delta, q, plus);
    psi2(-delta, q, minus);
    f2(t, q, f);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!close(f[k], (plus[k] - minus[k]) / (2.0 * delta), 1e-6)) {
        symmetry_error(*this, "f2 does not match d psi2/d eps");
      }
    }
  }
}

SymmetryGroup time_translation(std::size_t dim) {
  SymmetryGroup s;
  s.name = "time-translation";
  s.dim = dim;
  s.psi1 = [](double eps, double t) { return t + eps; };
  s.psi2 = [](double, std::span<const double> q, std::span<double> out) {
    std::copy(q.begin(), q.end(), out.begin());
  };
  s.tau = [](double) { return 1.0; };
  s.f2 = [](double, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  return s;
}

SymmetryGroup space_translation(std::vector<double> direction) {
  if (direction.empty()) throw InputError("space translation needs a direction vector");
  SymmetryGroup s;
  s.name = "space-translation";
  s.dim = direction.size();
  s.psi1 = [](double, double t) { return t; };
  s.psi2 = [direction](double eps, std::span<const double> q, std::span<double> out) {
    for (std::size_t k = 0; k < q.size(); ++k) out[k] = q[k] + eps * direction[k];
  };
  s.tau = [](double) { return 0.0; };
  s.f2 = [direction](double, std::span<const double>, std::span<double> out) {
    std::copy(direction.begin(), direction.end(), out.begin());
  };
  return s;
}

SymmetryGroup rotation(double omega) {
  if (!std::isfinite(omega)) throw InputError("rotation rate must be finite");
  SymmetryGroup s;
  s.name = "rotation";
  s.dim = 2;
  s.psi1 = [](double, double t) { return t; };
  s.psi2 = [omega](double eps, std::span<const double> q, std::span<double> out) {
    const double c = std::cos(eps * omega);
    const double sn = std::sin(eps * omega);
    const double x = q[0];
    const double y = q[1];
    out[0] = c * x - sn * y;
    out[1] = sn * x + c * y;
  };
  s.tau = [](double) { return 0.0; };
  s.f2 = [omega](double, std::span<const double> q, std::span<double> out) {
    const double x = q[0];
    out[0] = -omega * q[1];
    out[1] = omega * x;
  };
  return s;
}

GridFunction InvariantSeries::sum() const {
  GridFunction out(terms.grid(), 1);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double acc = 0.0;
    for (std::size_t r = 0; r < terms.dim(); ++r) acc += terms(i, r);
    out(i) = acc;
  }
  return out;
}

GridFunction repeated_derivative(const GridFunction& f, std::size_t r) {
  GridFunction out = f;
  for (std::size_t k = 0; k < r; ++k) out = classical_derivative(out);
  return out;
}

InvariantSeries transfer_series(const GridFunction& f2, const GridFunction& g, double alpha,
                                std::size_t R) {
  require_derivative_order(alpha);
  require_compatible(f2, g, "transfer_series");
  f2.require_finite("transfer_series f2");
  g.require_finite("transfer_series g");
  if (R > kMaxTruncation) {
    throw InputError("truncation order " + std::to_string(R) + " exceeds the limit of " +
                     std::to_string(kMaxTruncation));
  }
  const std::size_t dim = f2.dim();
  GridFunction shifted = f2;
  for (std::size_t i = 0; i < f2.size(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) shifted(i, k) = f2(i, k) - f2(0, k);
  }

  InvariantSeries series{R, GridFunction(f2.grid(), R + 1), 0.0};
  GridFunction g_r = g;
  GridFunction f_r = f2;
  for (std::size_t r = 0; r <= R; ++r) {
    if (r > 0) {
      g_r = classical_derivative(g_r);
      f_r = classical_derivative(f_r);
    }
    const double order = static_cast<double>(r) + 1.0 - alpha;
    const GridFunction left = order == 0.0 ? shifted : rl_integral_left(shifted, order);
    const GridFunction right = order == 0.0 ? g : rl_integral_right(g, order);
    const double sign = r % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < f2.size(); ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        acc += sign * g_r(i, k) * left(i, k) + f_r(i, k) * right(i, k);
      }
      series.terms(i, r) = acc;
    }
  }
  for (std::size_t i = 0; i < f2.size(); ++i) {
    series.tail_estimate = std::max(series.tail_estimate, std::abs(series.terms(i, R)));
  }
  if (!std::isfinite(series.tail_estimate)) {
    throw NumericalError("transfer_series: non-finite series terms");
  }
  return series;
}

double invariance_defect(const VariationalProblem& p, const GridFunction& q,
                         const SymmetryGroup& s, bool time_transform,
                         const InvarianceOptions& options) {
  p.validate();
  s.validate();
  require_matching_dim(s, p.dim());
  if (!(options.epsilon > 0.0)) throw InputError("invariance_defect: epsilon must be positive");
  if (options.residual_threshold) {
    const double r = interior_max_norm(el_residual(p, q));
    if (!(r <= *options.residual_threshold)) {
      std::ostringstream msg;
      msg << "invariance_defect: trajectory EL residual " << r << " exceeds threshold "
          << *options.residual_threshold;
      throw InputError(msg.str());
    }
  }
  sample_lagrangian(p, q);  // grid, dimension and finiteness checks

  const Grid& grid = p.grid;
  const std::size_t n = grid.intervals();
  const std::size_t dim = p.dim();

  // Transformed integrand at every node for a given ε.
  auto integrand = [&](double eps) {
    GridFunction moved(grid, dim);
    for (std::size_t i = 0; i <= n; ++i) s.psi2(eps, q.row(i), moved.row(i));
    const GridFunction v = classical_derivative(moved);
    const GridFunction w = caputo_left(moved, p.alpha);
    double slope = 1.0;
    if (time_transform) {
      const double t0 = s.psi1(eps, grid.a());
      slope = (s.psi1(eps, grid.b()) - t0) / (grid.b() - grid.a());
      if (!(slope > 0.0)) throw InputError("invariance_defect: time map must be increasing");
      for (std::size_t i = 0; i <= n; ++i) {
        const double affine = t0 + slope * (grid.node(i) - grid.a());
        if (!close(s.psi1(eps, grid.node(i)), affine, 1e-9)) {
          throw InputError("invariance_defect: time map must be affine in t");
        }
      }
    }
    const double v_scale = 1.0 / slope;
    const double w_scale = std::pow(slope, -p.alpha);
    std::vector<double> vs(dim), ws(dim), out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = time_transform ? s.psi1(eps, grid.node(i)) : grid.node(i);
      for (std::size_t k = 0; k < dim; ++k) {
        vs[k] = v(i, k) * v_scale;
        ws[k] = w(i, k) * w_scale;
      }
      out[i] = p.lagrangian(t, moved.row(i), vs, ws) * slope;
      if (!std::isfinite(out[i])) {
        throw NumericalError("invariance_defect: non-finite transformed Lagrangian at node " +
                             std::to_string(i));
      }
    }
    return out;
  };

  const std::vector<double> plus = integrand(options.epsilon);
  const std::vector<double> minus = integrand(-options.epsilon);
  double defect = 0.0;
  for (std::size_t k = 1; k <= 8; ++k) {
    const std::size_t first = (8 - k) * n / 16;
    const std::size_t last = n - first;
    const double d = (trapezoid(grid, plus, first, last) - trapezoid(grid, minus, first, last)) /
                     (2.0 * options.epsilon);
    defect = std::max(defect, std::abs(d));
  }
  return defect;
}

GridFunction invariance_necessary_residual(const VariationalProblem& p, const GridFunction& q,
                                           const SymmetryGroup& s) {
  s.validate();
  require_matching_dim(s, p.dim());
  const LagrangianSamples ls = sample_lagrangian(p, q);
  const GridFunction f = generator_along(s, q);
  const GridFunction dv_dot = classical_derivative(ls.dv);
  const GridFunction f_dot = classical_derivative(f);
  const GridFunction f_cap = caputo_left(f, p.alpha);
  const GridFunction dw_rl = rl_derivative_right(ls.dw, p.alpha);
  GridFunction r(p.grid, 1);
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.dim(); ++k) {
      acc += f(i, k) * dv_dot(i, k) + ls.dv(i, k) * f_dot(i, k) + ls.dw(i, k) * f_cap(i, k) -
             f(i, k) * dw_rl(i, k);
    }
    r(i) = acc;
  }
  return r;
}

GridFunction tabulate_generators(const SymmetryGroup& s, const GridFunction& q) {
  require_matching_dim(s, q.dim());
  GridFunction out(q.grid(), q.dim() + 1);
  std::vector<double> f(q.dim());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double t = q.grid().node(i);
    out(i, 0) = s.tau(t);
    s.f2(t, q.row(i), f);
    for (std::size_t k = 0; k < q.dim(); ++k) out(i, k + 1) = f[k];
  }
  return out;
}

GridFunction noether_quantity(const VariationalProblem& p, const ExtremalSolution& sol,
                              const SymmetryGroup& s, std::size_t R) {
  s.validate();
  require_matching_dim(s, p.dim());
  const GridFunction& q = sol.trajectory;
  const LagrangianSamples ls = sample_lagrangian(p, q);
  const GridFunction f = generator_along(s, q);
  const GridFunction series = transfer_series(f, ls.dw, p.alpha, R).sum();
  GridFunction c(p.grid, 1);
  for (std::size_t i = 0; i < q.size(); ++i) {
    double momentum = 0.0;
    double energy = ls.value[i];
    for (std::size_t k = 0; k < p.dim(); ++k) {
      momentum += f(i, k) * ls.dv(i, k);
      energy -= ls.velocity(i, k) * ls.dv(i, k) +
                p.alpha * ls.dw(i, k) * ls.caputo_velocity(i, k);
    }
    c(i) = momentum + series(i) + s.tau(p.grid.node(i)) * energy;
  }
  return c;
}

GridFunction autonomous_quantity(const VariationalProblem& p, const ExtremalSolution& sol) {
  if (!p.lagrangian.autonomous()) {
    throw InputError("autonomous_quantity requires a time-independent Lagrangian");
  }
  const LagrangianSamples ls = sample_lagrangian(p, sol.trajectory);
  GridFunction c(p.grid, 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    double value = ls.value[i];
    for (std::size_t k = 0; k < p.dim(); ++k) {
      value -= ls.velocity(i, k) * ls.dv(i, k) + p.alpha * ls.dw(i, k) * ls.caputo_velocity(i, k);
    }
    c(i) = value;
  }
  return c;
}

double drift_report(const GridFunction& c) {
  const std::size_t last = c.size() - 1;
  for (std::size_t i = 1; i < last; ++i) {
    if (c.flagged(i)) throw InputError("drift_report: non-finite value at interior node " +
                                       std::to_string(i));
  }
  double drift = 0.0;
  for (std::size_t k = 0; k < c.dim(); ++k) {
    const double ref = c(1, k);
    for (std::size_t i = 1; i < last; ++i) {
      drift = std::max(drift, std::abs(c(i, k) - ref) / (1.0 + std::abs(ref)));
    }
  }
  return drift;
}

}  // namespace fracnoether
