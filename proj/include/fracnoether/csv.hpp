#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fracnoether/grid.hpp"

namespace fracnoether {

/// Column-named numeric table, written as CSV with 17 significant digits.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::string to_csv() const;
};

/// %.17g; NaN and infinities as nan, inf, -inf.
std::string format_double(double x);

/// Table with a leading t column and one column per component of each function.
/// Column names: prefix for dim 1, prefix0, prefix1, ... otherwise.
Table grid_table(const Grid& grid, const std::vector<std::pair<std::string, const GridFunction*>>& cols);

/// Writes text to path, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fracnoether
