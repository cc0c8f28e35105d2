#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

namespace fracnoether {

/// L(t, q, v, w) where v stands for q̇ and w for the left Caputo derivative of q.
using LagrangianFn = std::function<double(double t, std::span<const double> q,
                                          std::span<const double> v, std::span<const double> w)>;

/// Writes ∂L/∂q, ∂L/∂v, ∂L/∂w (each of length dim).
using LagrangianGradFn =
    std::function<void(double t, std::span<const double> q, std::span<const double> v,
                       std::span<const double> w, std::span<double> dq, std::span<double> dv,
                       std::span<double> dw)>;

/// Evaluation contract for a Lagrangian with classical and Caputo velocities.
///
/// Analytic partials, when supplied, are checked against central finite
/// differences of the value on deterministic random probes at construction
/// (relative tolerance 1e-5). Without analytic partials it falls back
/// to central differences with step 1e-6 (1 + |x|).
class LagrangianSpec {
 public:
  LagrangianSpec(std::size_t dim, LagrangianFn value, std::optional<LagrangianGradFn> partials,
                 bool autonomous);

  std::size_t dim() const { return dim_; }
  bool autonomous() const { return autonomous_; }
  bool has_analytic_partials() const { return analytic_.has_value(); }

  double operator()(double t, std::span<const double> q, std::span<const double> v,
                    std::span<const double> w) const {
    return value_(t, q, v, w);
  }

  void partials(double t, std::span<const double> q, std::span<const double> v,
                std::span<const double> w, std::span<double> dq, std::span<double> dv,
                std::span<double> dw) const;

  /// Central-difference partials of the value, regardless of analytic ones.
  void finite_difference_partials(double t, std::span<const double> q, std::span<const double> v,
                                  std::span<const double> w, std::span<double> dq,
                                  std::span<double> dv, std::span<double> dw) const;

 private:
  void validate() const;

  std::size_t dim_;
  LagrangianFn value_;
  std::optional<LagrangianGradFn> analytic_;
  bool autonomous_;
};

/// Central-difference step used by the fallback partials.
double fd_step(double x);

}  // namespace fracnoether
