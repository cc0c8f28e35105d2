#include "fracnoether/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracnoether/error.hpp"

namespace fracnoether {

Grid::Grid(double a, double b, std::size_t n) : a_(a), b_(b), n_(n) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw InputError("grid requires finite a < b");
  }
  if (n < 2) throw InputError("grid requires at least 2 intervals");
}

double Grid::node(std::size_t i) const {
  if (i == n_) return b_;
  return a_ + static_cast<double>(i) * step();
}

GridFunction::GridFunction(Grid grid, std::size_t dim)
    : grid_(grid), dim_(dim), values_(grid.nodes() * dim, 0.0) {
  if (dim == 0) throw InputError("grid function dimension must be positive");
}

GridFunction::GridFunction(Grid grid, std::size_t dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
  if (dim == 0) throw InputError("grid function dimension must be positive");
  if (values_.size() != grid_.nodes() * dim_) {
    throw InputError("grid function has " + std::to_string(values_.size()) +
                     " values, expected " + std::to_string(grid_.nodes() * dim_));
  }
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(double)>& f) {
  GridFunction out(grid, 1);
  for (std::size_t i = 0; i < grid.nodes(); ++i) out(i) = f(grid.node(i));
  return out;
}

GridFunction GridFunction::sample(const Grid& grid, std::size_t dim,
                                  const std::function<void(double, std::span<double>)>& f) {
  GridFunction out(grid, dim);
  for (std::size_t i = 0; i < grid.nodes(); ++i) f(grid.node(i), out.row(i));
  return out;
}

std::vector<double> GridFunction::component(std::size_t k) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = (*this)(i, k);
  return out;
}

void GridFunction::set_component(std::size_t k, std::span<const double> values) {
  if (values.size() != size()) throw InputError("component length mismatch");
  for (std::size_t i = 0; i < size(); ++i) (*this)(i, k) = values[i];
}

bool GridFunction::flagged(std::size_t i) const {
  const auto r = row(i);
  return std::any_of(r.begin(), r.end(), [](double v) { return !std::isfinite(v); });
}

bool GridFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void GridFunction::require_finite(const char* what) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (flagged(i)) {
      throw InputError(std::string(what) + ": non-finite value at node " + std::to_string(i));
    }
  }
}

void require_compatible(const GridFunction& x, const GridFunction& y, const char* what) {
  if (!(x.grid() == y.grid())) throw InputError(std::string(what) + ": grids differ");
  if (x.dim() != y.dim()) throw InputError(std::string(what) + ": dimensions differ");
}

double trapezoid(const Grid& grid, std::span<const double> values) {
  return trapezoid(grid, values, 0, grid.intervals());
}

double trapezoid(const Grid& grid, std::span<const double> values, std::size_t first,
                 std::size_t last) {
  if (values.size() != grid.nodes()) throw InputError("trapezoid: length mismatch");
  if (first >= last || last > grid.intervals()) throw InputError("trapezoid: bad node range");
  double sum = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    if (!std::isfinite(values[i])) continue;
    const double w = (i == first || i == last) ? 0.5 : 1.0;
    sum += w * values[i];
  }
  return sum * grid.step();
}

double interior_max_norm(const GridFunction& f) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    for (double v : f.row(i)) {
      if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
      m = std::max(m, std::abs(v));
    }
  }
  return m;
}

}  // namespace fracnoether
