#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracnoether {

/// Uniform grid on [a, b] with n intervals (n + 1 nodes).
class Grid {
 public:
  Grid(double a, double b, std::size_t n);

  double a() const { return a_; }
  double b() const { return b_; }
  std::size_t intervals() const { return n_; }
  std::size_t nodes() const { return n_ + 1; }
  double step() const { return (b_ - a_) / static_cast<double>(n_); }
  double node(std::size_t i) const;

  bool operator==(const Grid& other) const = default;

 private:
  double a_;
  double b_;
  std::size_t n_;
};

/// Samples of a vector-valued function at the nodes of a Grid.
///
/// Values are stored row-major: node i, component k lives at i * dim + k.
/// Non-finite entries are reserved for nodes an operator flags as singular
/// (see rl_derivative_left); every public operator rejects them on input.
class GridFunction {
 public:
  GridFunction(Grid grid, std::size_t dim);
  GridFunction(Grid grid, std::size_t dim, std::vector<double> values);

  /// Samples a scalar function.
  static GridFunction sample(const Grid& grid, const std::function<double(double)>& f);
  /// Samples a vector function; f writes dim components for node time t.
  static GridFunction sample(const Grid& grid, std::size_t dim,
                             const std::function<void(double, std::span<double>)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return grid_.nodes(); }

  double& operator()(std::size_t i, std::size_t k = 0) { return values_[i * dim_ + k]; }
  double operator()(std::size_t i, std::size_t k = 0) const { return values_[i * dim_ + k]; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

  std::vector<double> component(std::size_t k) const;
  void set_component(std::size_t k, std::span<const double> values);

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// True when node i carries a non-finite (singular) value in any component.
  bool flagged(std::size_t i) const;
  bool all_finite() const;

  /// Throws InputError naming `what` when any value is non-finite.
  void require_finite(const char* what) const;

 private:
  Grid grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// Throws InputError if the two functions do not live on the same grid with the same dim.
void require_compatible(const GridFunction& x, const GridFunction& y, const char* what);

/// Trapezoidal rule over all nodes; nodes flagged non-finite get weight zero.
double trapezoid(const Grid& grid, std::span<const double> values);

/// Trapezoidal rule restricted to nodes [first, last].
double trapezoid(const Grid& grid, std::span<const double> values, std::size_t first,
                 std::size_t last);

/// Max-norm over interior nodes 1..n-1, all components.
double interior_max_norm(const GridFunction& f);

}  // namespace fracnoether
