// fracnoether: run scenarios, convergence studies and the acceptance suite.
//
//   fracnoether run <file> [--out DIR] [--truncation R] [--tol X]
//   fracnoether study <file> --grids 64,128,256,512 [--out DIR] ...
//   fracnoether accept [--out DIR]
//
// Exit codes: 0 success, 1 user error, 2 numerical failure, 3 acceptance failure.
// Errors are printed to stderr as one JSON object.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracnoether/acceptance.hpp"
#include "fracnoether/config.hpp"
#include "fracnoether/error.hpp"
#include "fracnoether/scenario.hpp"
#include "json.hpp"

namespace fn = fracnoether;

namespace {

int report(const std::string& kind, const std::string& message, int code, const fn::ConfigError* ce = nullptr) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  if (ce != nullptr) {
    if (!ce->key().empty()) j["key"] = ce->key();
    if (ce->line() > 0) {
      j["line"] = ce->line();
      j["column"] = ce->column();
    }
  }
  std::cerr << j.dump() << "\n";
  return code;
}

void print_manifest(const fn::RunManifest& m) {
  std::cout << "kind: " << m.kind << "\noutput: " << m.output_dir.string() << "\n";
  for (const auto& [k, v] : m.metrics) std::cout << "  " << k << " = " << v << "\n";
  for (const auto& f : m.files) std::cout << "  wrote " << f.name << " (" << f.bytes << " bytes)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional variational problems, Noether quantities and optimal control"};
  app.require_subcommand(1);

  std::string file;
  std::string out;
  std::size_t truncation = 0;
  double tol = 0.0;
  std::vector<std::size_t> grids;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", out, "output directory (overrides [output] dir)");
    c->add_option("--truncation", truncation, "series truncation order R")->check(CLI::Range(0, 6));
    c->add_option("--tol", tol, "solver gradient tolerance")->check(CLI::PositiveNumber);
  };
  CLI::App* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("file", file, "scenario file")->required();
  add_common(run);
  CLI::App* study = app.add_subcommand("study", "convergence study over grid sizes");
  study->add_option("file", file, "scenario file")->required();
  study->add_option("--grids", grids, "grid sizes, e.g. 64,128,256,512")->required()->delimiter(',');
  add_common(study);
  CLI::App* accept = app.add_subcommand("accept", "run the acceptance suite");
  accept->add_option("--out", out, "work directory for scenario outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), 1);
  }

  fn::RunOptions opt;
  if (!out.empty()) opt.out = out;
  if (run->count("--truncation") || study->count("--truncation")) opt.truncation = truncation;
  if (run->count("--tol") || study->count("--tol")) opt.tol = tol;

  try {
    if (*run) {
      print_manifest(fn::run_scenario(file, opt));
      return 0;
    }
    if (*study) {
      print_manifest(fn::convergence_study(file, grids, opt));
      return 0;
    }
    const std::filesystem::path work = out.empty() ? std::filesystem::path("acceptance-work") : std::filesystem::path(out);
    bool all = true;
    for (const fn::CriterionResult& r : fn::run_acceptance(work)) {
      std::cout << fn::format_result(r) << std::endl;
      all = all && r.passed;
    }
    return all ? 0 : 3;
  } catch (const fn::ConfigError& e) {
    return report("config", e.what(), 1, &e);
  } catch (const fn::InputError& e) {
    return report("input", e.what(), 1);
  } catch (const fn::NumericalError& e) {
    return report("numerical", e.what(), 2);
  } catch (const std::filesystem::filesystem_error& e) {
    return report("io", e.what(), 1);
  } catch (const std::exception& e) {
    return report("numerical", e.what(), 2);
  }
}
