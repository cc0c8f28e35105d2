#include "fracnoether/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fracnoether/error.hpp"

namespace fracnoether {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw InputError("table row has " + std::to_string(row.size()) + " values for " +
                     std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

Table grid_table(const Grid& grid,
                 const std::vector<std::pair<std::string, const GridFunction*>>& cols) {
  Table t;
  t.columns.push_back("t");
  for (const auto& [name, f] : cols) {
    if (!(f->grid() == grid)) throw InputError("grid_table: column '" + name + "' is on another grid");
    if (f->dim() == 1) {
      t.columns.push_back(name);
    } else {
      for (std::size_t k = 0; k < f->dim(); ++k) t.columns.push_back(name + std::to_string(k));
    }
  }
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    std::vector<double> row{grid.node(i)};
    for (const auto& [name, f] : cols) {
      for (std::size_t k = 0; k < f->dim(); ++k) row.push_back((*f)(i, k));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace fracnoether
