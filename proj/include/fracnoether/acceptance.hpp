#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fracnoether {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;  ///< measured values and thresholds
  double seconds = 0.0;
  double limit = 0.0;  ///< runtime limit in seconds; exceeding it fails the criterion
};

/// Runs criteria 1-11. Criterion 11 writes scenario outputs under work_dir.
std::vector<CriterionResult> run_acceptance(const std::filesystem::path& work_dir);

/// One line: PASS|FAIL, id, title, detail, runtime.
std::string format_result(const CriterionResult& r);

}  // namespace fracnoether
