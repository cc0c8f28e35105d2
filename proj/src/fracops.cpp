#include "fracnoether/fracops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fracnoether/error.hpp"
#include "fracnoether/gamma.hpp"

namespace fracnoether {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GridFunction reflect(const GridFunction& f) {
  GridFunction out(f.grid(), f.dim());
  const std::size_t last = f.size() - 1;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t k = 0; k < f.dim(); ++k) out(i, k) = f(last - i, k);
  }
  return out;
}

void require_integral_order(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InputError("fractional integral order must be positive, got " + std::to_string(beta));
  }
}

// Product-trapezoidal weights for the left RL integral of order beta:
// I(t_k) = h^beta / Γ(beta + 2) * sum_j a_{j,k} f_j.
// The interior weights depend only on m = k - j, so they are tabulated once.
GridFunction rl_integral_left_impl(const GridFunction& f, double beta) {
  const std::size_t n = f.grid().intervals();
  const double scale = std::pow(f.grid().step(), beta) * reciprocal_gamma(beta + 2.0);

  std::vector<double> pw1(n + 1);  // m^{beta+1}
  std::vector<double> pw(n + 1);   // m^{beta}
  for (std::size_t m = 0; m <= n; ++m) {
    pw1[m] = std::pow(static_cast<double>(m), beta + 1.0);
    pw[m] = std::pow(static_cast<double>(m), beta);
  }
  std::vector<double> interior(n + 1, 0.0);  // weight for k - j = m, 1 <= m <= k-1
  for (std::size_t m = 1; m < n; ++m) interior[m] = pw1[m + 1] - 2.0 * pw1[m] + pw1[m - 1];

  GridFunction out(f.grid(), f.dim());
  for (std::size_t k = 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    const double w0 = pw1[k - 1] - (kd - 1.0 - beta) * pw[k];
    for (std::size_t c = 0; c < f.dim(); ++c) {
      double sum = w0 * f(0, c);
      for (std::size_t j = 1; j < k; ++j) sum += interior[k - j] * f(j, c);
      sum += f(k, c);
      out(k, c) = scale * sum;
    }
  }
  return out;
}

// L1 scheme: C(t_k) = h^{-alpha} / Γ(2 - alpha) * sum_{j<k} b_{k-1-j} (f_{j+1} - f_j),
// b_m = (m+1)^{1-alpha} - m^{1-alpha}.
GridFunction caputo_left_l1(const GridFunction& f, double alpha) {
  const std::size_t n = f.grid().intervals();
  const double scale = std::pow(f.grid().step(), -alpha) * reciprocal_gamma(2.0 - alpha);
  std::vector<double> b(n);
  for (std::size_t m = 0; m < n; ++m) {
    b[m] = std::pow(static_cast<double>(m + 1), 1.0 - alpha) -
           std::pow(static_cast<double>(m), 1.0 - alpha);
  }
  GridFunction out(f.grid(), f.dim());
  for (std::size_t c = 0; c < f.dim(); ++c) {
    std::vector<double> diff(n);
    for (std::size_t j = 0; j < n; ++j) diff[j] = f(j + 1, c) - f(j, c);
    for (std::size_t k = 1; k <= n; ++k) {
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) sum += b[k - 1 - j] * diff[j];
      out(k, c) = scale * sum;
    }
  }
  return out;
}

}  // namespace

void require_derivative_order(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InputError("derivative order alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
}

GridFunction classical_derivative(const GridFunction& f) {
  f.require_finite("classical_derivative input");
  const std::size_t n = f.grid().intervals();
  const double h = f.grid().step();
  GridFunction out(f.grid(), f.dim());
  for (std::size_t c = 0; c < f.dim(); ++c) {
    if (n >= 3) {
      // Second-order one-sided ends whose leading error, h² f'''/6, equals that of
      // the central difference, so differencing the result again stays O(h²)
      // at nodes 1 and n-1.
      out(0, c) = (-4.0 * f(0, c) + 7.0 * f(1, c) - 4.0 * f(2, c) + f(3, c)) / (2.0 * h);
      out(n, c) = (4.0 * f(n, c) - 7.0 * f(n - 1, c) + 4.0 * f(n - 2, c) - f(n - 3, c)) / (2.0 * h);
    } else {
      out(0, c) = (-3.0 * f(0, c) + 4.0 * f(1, c) - f(2, c)) / (2.0 * h);
      out(n, c) = (3.0 * f(n, c) - 4.0 * f(n - 1, c) + f(n - 2, c)) / (2.0 * h);
    }
    for (std::size_t i = 1; i < n; ++i) out(i, c) = (f(i + 1, c) - f(i - 1, c)) / (2.0 * h);
  }
  return out;
}

GridFunction rl_integral_left(const GridFunction& f, double beta) {
  require_integral_order(beta);
  f.require_finite("rl_integral_left input");
  return rl_integral_left_impl(f, beta);
}

GridFunction rl_integral_right(const GridFunction& f, double beta) {
  require_integral_order(beta);
  f.require_finite("rl_integral_right input");
  return reflect(rl_integral_left_impl(reflect(f), beta));
}

GridFunction caputo_left(const GridFunction& f, double alpha) {
  require_derivative_order(alpha);
  f.require_finite("caputo_left input");
  if (alpha == 1.0) return classical_derivative(f);
  return caputo_left_l1(f, alpha);
}

GridFunction caputo_right(const GridFunction& f, double alpha) {
  require_derivative_order(alpha);
  f.require_finite("caputo_right input");
  if (alpha == 1.0) {
    GridFunction d = classical_derivative(f);
    for (double& v : d.values()) v = -v;
    return d;
  }
  return reflect(caputo_left_l1(reflect(f), alpha));
}

GridFunction rl_derivative_left(const GridFunction& f, double alpha) {
  GridFunction out = caputo_left(f, alpha);
  const double shift_scale = reciprocal_gamma(1.0 - alpha);
  if (shift_scale == 0.0) return out;
  const Grid& g = f.grid();
  for (std::size_t c = 0; c < f.dim(); ++c) {
    const double fa = f(0, c);
    if (fa == 0.0) continue;
    out(0, c) = kNaN;
    for (std::size_t i = 1; i < f.size(); ++i) {
      out(i, c) += fa * shift_scale * std::pow(g.node(i) - g.a(), -alpha);
    }
  }
  return out;
}

GridFunction rl_derivative_right(const GridFunction& f, double alpha) {
  GridFunction out = caputo_right(f, alpha);
  const double shift_scale = reciprocal_gamma(1.0 - alpha);
  if (shift_scale == 0.0) return out;
  const Grid& g = f.grid();
  const std::size_t last = f.size() - 1;
  for (std::size_t c = 0; c < f.dim(); ++c) {
    const double fb = f(last, c);
    if (fb == 0.0) continue;
    out(last, c) = kNaN;
    for (std::size_t i = 0; i < last; ++i) {
      out(i, c) += fb * shift_scale * std::pow(g.b() - g.node(i), -alpha);
    }
  }
  return out;
}

double ibp_residual(const GridFunction& f, const GridFunction& g, double alpha) {
  require_compatible(f, g, "ibp_residual");
  require_derivative_order(alpha);
  f.require_finite("ibp_residual f");
  g.require_finite("ibp_residual g");
  const std::size_t last = f.size() - 1;
  double scale = 1.0;
  for (double v : f.values()) scale = std::max(scale, std::abs(v));
  for (std::size_t c = 0; c < f.dim(); ++c) {
    if (std::abs(f(0, c)) > 1e-12 * scale || std::abs(f(last, c)) > 1e-12 * scale) {
      throw InputError("ibp_residual requires f(a) = f(b) = 0");
    }
  }
  const GridFunction cf = caputo_left(f, alpha);
  const GridFunction dg = rl_derivative_right(g, alpha);
  std::vector<double> lhs(f.size(), 0.0);
  std::vector<double> rhs(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t c = 0; c < f.dim(); ++c) {
      lhs[i] += g(i, c) * cf(i, c);
      rhs[i] += dg.flagged(i) ? kNaN : f(i, c) * dg(i, c);
    }
  }
  return std::abs(trapezoid(f.grid(), lhs) - trapezoid(f.grid(), rhs));
}

std::vector<double> caputo_left_midpoints(const GridFunction& f, double alpha) {
  require_derivative_order(alpha);
  f.require_finite("caputo_left_midpoints input");
  const std::size_t n = f.grid().intervals();
  const std::size_t dim = f.dim();
  const double scale = std::pow(f.grid().step(), -alpha) * reciprocal_gamma(2.0 - alpha);
  // e_0 = (1/2)^{1-alpha}, e_m = (m+1/2)^{1-alpha} - (m-1/2)^{1-alpha}
  std::vector<double> e(n);
  e[0] = std::pow(0.5, 1.0 - alpha);
  for (std::size_t m = 1; m < n; ++m) {
    const double md = static_cast<double>(m);
    e[m] = std::pow(md + 0.5, 1.0 - alpha) - std::pow(md - 0.5, 1.0 - alpha);
  }
  std::vector<double> out(n * dim, 0.0);
  std::vector<double> diff(n);
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t j = 0; j < n; ++j) diff[j] = f(j + 1, c) - f(j, c);
    for (std::size_t k = 0; k < n; ++k) {
      double sum = 0.0;
      for (std::size_t j = 0; j <= k; ++j) sum += e[k - j] * diff[j];
      out[k * dim + c] = scale * sum;
    }
  }
  return out;
}

std::vector<double> caputo_left_midpoints_adjoint(const Grid& grid, std::size_t dim,
                                                  const std::vector<double>& y, double alpha) {
  require_derivative_order(alpha);
  const std::size_t n = grid.intervals();
  if (y.size() != n * dim) throw InputError("caputo_left_midpoints_adjoint: length mismatch");
  const double scale = std::pow(grid.step(), -alpha) * reciprocal_gamma(2.0 - alpha);
  std::vector<double> e(n);
  e[0] = std::pow(0.5, 1.0 - alpha);
  for (std::size_t m = 1; m < n; ++m) {
    const double md = static_cast<double>(m);
    e[m] = std::pow(md + 0.5, 1.0 - alpha) - std::pow(md - 0.5, 1.0 - alpha);
  }
  std::vector<double> out((n + 1) * dim, 0.0);
  std::vector<double> z(n);
  for (std::size_t c = 0; c < dim; ++c) {
    // z_j = scale * sum_{k>=j} e_{k-j} y_k is the cotangent of diff_j.
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = j; k < n; ++k) sum += e[k - j] * y[k * dim + c];
      z[j] = scale * sum;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      const double from_left = i > 0 ? z[i - 1] : 0.0;
      const double from_right = i < n ? z[i] : 0.0;
      out[i * dim + c] = from_left - from_right;
    }
  }
  return out;
}

}  // namespace fracnoether
