#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracnoether/config.hpp"

// Scenario runner behind the command-line tool.
//
// A scenario file names its kind in [scenario] and describes the problem in the
// other sections (see scenarios/ for one file per kind):
//
//   [scenario] kind = operator-test | extremal | noether | friction | control
//   [grid]     a, b, n
//   [problem]  Lagrangian family keys plus alpha, q_a, q_b
//   [operator] name, alpha, power, grids          (operator-test)
//   [symmetry] family, direction, omega           (noether, optional for control)
//   [noether]  truncation
//   [friction] q0, v0, T, steps, centre, width, levels, window_n
//   [control]  control family keys
//   [solver]   tol
//   [output]   dir
//
// Every run writes its CSV files, summary.csv (metric,value) and manifest.json.

namespace fracnoether {

inline constexpr const char* kSoftwareVersion = "0.1.0";

struct RunOptions {
  std::optional<std::filesystem::path> out;  ///< overrides [output] dir
  std::optional<std::size_t> truncation;     ///< overrides [noether] truncation
  std::optional<double> tol;                 ///< overrides [solver] tol
};

struct EmittedFile {
  std::string name;  ///< relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string scenario_text;
  std::string kind;
  std::string version;
  std::string started_utc;
  double wall_seconds = 0.0;
  std::filesystem::path output_dir;
  std::vector<EmittedFile> files;
  std::vector<std::pair<std::string, double>> metrics;

  std::string to_json() const;
};

/// Parses and runs a scenario file.
RunManifest run_scenario(const std::filesystem::path& file, const RunOptions& options = {});
RunManifest run_scenario_text(const std::string& text, const RunOptions& options = {});

/// Re-runs the scenario at each n and writes study.csv with the kind's headline
/// metric and, with two or more grids, log2 of successive ratios.
RunManifest convergence_study(const std::filesystem::path& file, const std::vector<std::size_t>& grids,
                              const RunOptions& options = {});
RunManifest convergence_study_text(const std::string& text, const std::vector<std::size_t>& grids,
                                   const RunOptions& options = {});

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace fracnoether
