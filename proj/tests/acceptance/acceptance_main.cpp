// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <filesystem>
#include <iostream>

#include "fracnoether/acceptance.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path work =
      argc > 1 ? std::filesystem::path(argv[1]) : std::filesystem::temp_directory_path() / "fracnoether-acceptance";
  bool all = true;
  for (const auto& r : fracnoether::run_acceptance(work)) {
    std::cout << fracnoether::format_result(r) << std::endl;
    all = all && r.passed;
  }
  return all ? 0 : 1;
}
