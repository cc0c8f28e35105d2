#include "fracnoether/optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "fracnoether/error.hpp"

namespace fracnoether {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

LbfgsResult minimize_lbfgs(const ObjectiveFn& objective, std::vector<double> x0,
                           const LbfgsOptions& options, const Preconditioner& preconditioner) {
  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n), trial(n), trial_grad(n), dir(n), work(n), scratch(n);

  result.value = objective(result.x, grad);
  if (!std::isfinite(result.value)) throw NumericalError("objective is non-finite at the initial point");
  result.gradient_norm = max_norm(grad);

  std::deque<CurvaturePair> history;
  double gamma = 1.0;

  while (result.gradient_norm >= options.gradient_tol) {
    if (result.iterations >= options.max_iterations) return result;

    // Two-loop recursion: dir = -H grad.
    std::copy(grad.begin(), grad.end(), work.begin());
    std::vector<double> alphas(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
      alphas[i] = history[i].rho * dot(history[i].s, work);
      for (std::size_t j = 0; j < n; ++j) work[j] -= alphas[i] * history[i].y[j];
    }
    if (preconditioner) {
      preconditioner(work, scratch);
      std::copy(scratch.begin(), scratch.end(), work.begin());
    }
    for (double& v : work) v *= gamma;
    for (std::size_t i = 0; i < history.size(); ++i) {
      const double beta = history[i].rho * dot(history[i].y, work);
      for (std::size_t j = 0; j < n; ++j) work[j] += history[i].s[j] * (alphas[i] - beta);
    }
    for (std::size_t j = 0; j < n; ++j) dir[j] = -work[j];

    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      // Lost descent: restart from the (preconditioned) gradient.
      history.clear();
      gamma = 1.0;
      if (preconditioner) {
        preconditioner(grad, dir);
      } else {
        std::copy(grad.begin(), grad.end(), dir.begin());
      }
      for (double& v : dir) v = -v;
      slope = dot(grad, dir);
      if (!(slope < 0.0)) {
        throw NumericalError("no descent direction available; gradient norm " +
                             std::to_string(result.gradient_norm));
      }
    }

    constexpr double kArmijo = 1e-4;
    double step = 1.0;
    double trial_value = 0.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = result.x[j] + step * dir[j];
      trial_value = objective(trial, trial_grad);
      if (std::isfinite(trial_value)) {
        const bool armijo = trial_value <= result.value + kArmijo * step * slope;
        // Near the optimum the decrease drops below rounding; accept when the
        // value is unchanged to working precision and the gradient shrank.
        const bool flat = std::abs(trial_value - result.value) <=
                              4.0 * std::numeric_limits<double>::epsilon() *
                                  std::max(1.0, std::abs(result.value)) &&
                          max_norm(trial_grad) < result.gradient_norm;
        if (armijo || flat) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      throw NumericalError("line search failed after " + std::to_string(options.max_halvings) +
                           " halvings; gradient norm " + std::to_string(result.gradient_norm));
    }

    CurvaturePair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      pair.s[j] = trial[j] - result.x[j];
      pair.y[j] = trial_grad[j] - grad[j];
    }
    const double sy = dot(pair.s, pair.y);
    std::swap(result.x, trial);
    std::swap(grad, trial_grad);
    result.value = trial_value;
    result.gradient_norm = max_norm(grad);
    ++result.iterations;

    if (sy > 1e-300) {
      double ypy = 0.0;
      if (preconditioner) {
        preconditioner(pair.y, scratch);
        ypy = dot(pair.y, scratch);
      } else {
        ypy = dot(pair.y, pair.y);
      }
      if (ypy > 0.0) gamma = sy / ypy;
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (history.size() > options.memory) history.pop_front();
    }
  }
  result.converged = true;
  return result;
}

Preconditioner dense_hessian_preconditioner(const ObjectiveFn& objective,
                                            std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> base(n), shifted(n), point(x.begin(), x.end());
  objective(point, base);
  Eigen::MatrixXd hessian(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = 1e-6 * (1.0 + std::abs(point[j]));
    const double saved = point[j];
    point[j] = saved + step;
    objective(point, shifted);
    point[j] = saved;
    for (std::size_t i = 0; i < n; ++i) hessian(i, j) = (shifted[i] - base[i]) / step;
  }
  Eigen::MatrixXd sym = 0.5 * (hessian + hessian.transpose());
  const double diag_scale = std::max(sym.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  auto factor = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>();
  double shift = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::MatrixXd trial = sym;
    trial.diagonal().array() += shift;
    factor->compute(trial);
    if (factor->info() == Eigen::Success) break;
    shift = shift == 0.0 ? 1e-10 * diag_scale : shift * 10.0;
  }
  if (factor->info() != Eigen::Success) {
    throw NumericalError("could not factor the Hessian preconditioner");
  }
  return [factor, n](std::span<const double> g, std::span<double> out) {
    Eigen::Map<const Eigen::VectorXd> rhs(g.data(), static_cast<Eigen::Index>(n));
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(n)) = factor->solve(rhs);
  };
}

Preconditioner stiffness_preconditioner(std::size_t blocks, std::size_t dim, double h) {
  if (blocks == 0) throw InputError("stiffness preconditioner needs at least one block");
  // Thomas algorithm per component on (1/h) tridiag(-1, 2, -1).
  return [blocks, dim, h](std::span<const double> g, std::span<double> out) {
    std::vector<double> c(blocks), d(blocks);
    for (std::size_t k = 0; k < dim; ++k) {
      double denom = 2.0;
      c[0] = -1.0 / denom;
      d[0] = g[k] * h / denom;
      for (std::size_t i = 1; i < blocks; ++i) {
        denom = 2.0 + c[i - 1];
        c[i] = -1.0 / denom;
        d[i] = (g[i * dim + k] * h + d[i - 1]) / denom;
      }
      out[(blocks - 1) * dim + k] = d[blocks - 1];
      for (std::size_t i = blocks - 1; i-- > 0;) {
        out[i * dim + k] = d[i] - c[i] * out[(i + 1) * dim + k];
      }
    }
  };
}

}  // namespace fracnoether
