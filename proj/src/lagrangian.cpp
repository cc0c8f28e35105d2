#include "fracnoether/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fracnoether/error.hpp"

namespace fracnoether {

double fd_step(double x) { return 1e-6 * (1.0 + std::abs(x)); }

LagrangianSpec::LagrangianSpec(std::size_t dim, LagrangianFn value,
                               std::optional<LagrangianGradFn> partials, bool autonomous)
    : dim_(dim), value_(std::move(value)), analytic_(std::move(partials)), autonomous_(autonomous) {
  if (dim_ == 0) throw InputError("Lagrangian dimension must be positive");
  if (!value_) throw InputError("Lagrangian value function is empty");
  if (analytic_ && !*analytic_) analytic_.reset();
  if (analytic_) validate();
}

void LagrangianSpec::partials(double t, std::span<const double> q, std::span<const double> v,
                              std::span<const double> w, std::span<double> dq,
                              std::span<double> dv, std::span<double> dw) const {
  if (analytic_) {
    (*analytic_)(t, q, v, w, dq, dv, dw);
  } else {
    finite_difference_partials(t, q, v, w, dq, dv, dw);
  }
}

void LagrangianSpec::finite_difference_partials(double t, std::span<const double> q,
                                                std::span<const double> v,
                                                std::span<const double> w, std::span<double> dq,
                                                std::span<double> dv,
                                                std::span<double> dw) const {
  std::vector<double> qq(q.begin(), q.end());
  std::vector<double> vv(v.begin(), v.end());
  std::vector<double> ww(w.begin(), w.end());
  auto diff = [&](std::vector<double>& x, std::size_t k) {
    const double x0 = x[k];
    const double step = fd_step(x0);
    x[k] = x0 + step;
    const double up = value_(t, qq, vv, ww);
    x[k] = x0 - step;
    const double down = value_(t, qq, vv, ww);
    x[k] = x0;
    return (up - down) / (2.0 * step);
  };
  for (std::size_t k = 0; k < dim_; ++k) {
    dq[k] = diff(qq, k);
    dv[k] = diff(vv, k);
    dw[k] = diff(ww, k);
  }
}

void LagrangianSpec::validate() const {
  std::mt19937_64 rng(0x5eed1a9);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> q(dim_), v(dim_), w(dim_);
  std::vector<double> aq(dim_), av(dim_), aw(dim_);
  std::vector<double> fq(dim_), fv(dim_), fw(dim_);
  constexpr int kProbes = 16;
  constexpr double kRelTol = 1e-5;
  for (int probe = 0; probe < kProbes; ++probe) {
    const double t = unit(rng);
    for (std::size_t k = 0; k < dim_; ++k) {
      q[k] = unit(rng);
      v[k] = unit(rng);
      w[k] = unit(rng);
    }
    (*analytic_)(t, q, v, w, aq, av, aw);
    finite_difference_partials(t, q, v, w, fq, fv, fw);
    auto check = [&](const std::vector<double>& a, const std::vector<double>& f, const char* name) {
      for (std::size_t k = 0; k < dim_; ++k) {
        const double scale = std::max({1.0, std::abs(a[k]), std::abs(f[k])});
        if (!(std::abs(a[k] - f[k]) <= kRelTol * scale)) {
          throw InputError(std::string("Lagrangian partial ") + name + "[" + std::to_string(k) +
                           "] disagrees with finite differences: analytic " + std::to_string(a[k]) +
                           ", numeric " + std::to_string(f[k]));
        }
      }
    };
    check(aq, fq, "dL/dq");
    check(av, fv, "dL/dv");
    check(aw, fw, "dL/dw");
  }
}

}  // namespace fracnoether
