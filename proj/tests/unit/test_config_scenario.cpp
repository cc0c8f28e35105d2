#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fracnoether/config.hpp"
#include "fracnoether/csv.hpp"
#include "fracnoether/families.hpp"
#include "fracnoether/scenario.hpp"
#include "json.hpp"

using namespace fracnoether;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracnoether-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream b;
  b << in.rdbuf();
  return b.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parser: sections, comments and typed values") {
  const Config c = Config::parse("# top\n[problem]\nalpha = 0.5   # inline\nq_a = 1, 2 3\n\n[grid]\nn=64\nflag = yes\n");
  const ConfigSection& p = c.section("problem");
  CHECK(p.get_double("alpha") == 0.5);
  CHECK(p.get_list("q_a") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.section("grid").get_size("n") == 64);
  CHECK(c.section("grid").get_bool("flag", false));
  CHECK(p.get_double("missing", 7.0) == 7.0);
}

TEST_CASE("config parser: errors carry line, column and key") {
  auto error_of = [](const std::string& text) -> ConfigError {
    try {
      Config::parse(text);
    } catch (const ConfigError& e) {
      return e;
    }
    FAIL("no error");
    return ConfigError("", "", 0, 0);
  };
  ConfigError e = error_of("[a]\nx = 1\n[b\n");
  CHECK(e.line() == 3);
  e = error_of("[a]\nx = 1\nx = 2\n");
  CHECK(e.line() == 3);
  CHECK(e.key() == "x");
  e = error_of("y = 1\n");
  CHECK(e.line() == 1);
  e = error_of("[a]\n  bad key = 1\n");
  CHECK(e.line() == 2);
  CHECK(e.column() == 6);
  e = error_of("[a]\nx =\n");
  CHECK(e.line() == 2);

  const Config c = Config::parse("[p]\nalpha = abc\nlist = 1, x\n");
  try {
    c.section("p").get_double("alpha");
    FAIL("expected error");
  } catch (const ConfigError& err) {
    CHECK(err.key() == "alpha");
    CHECK(err.line() == 2);
    CHECK(err.column() == 9);
  }
  try {
    c.section("p").get_list("list");
    FAIL("expected error");
  } catch (const ConfigError& err) {
    CHECK(err.line() == 3);
    CHECK(err.column() == 11);
  }
  try {
    c.section("p").get_double("beta");
    FAIL("expected error");
  } catch (const ConfigError& err) {
    CHECK(err.key() == "beta");
    CHECK(std::string(err.what()).find("beta") != std::string::npos);
  }
}

TEST_CASE("families build consistent Lagrangians") {
  const Config c = Config::parse(
      "[h]\nfamily = harmonic\nstiffness = 4\nmass = 2\n"
      "[p]\nfamily = potential-polynomial\npotential = 0, 0, 0.5\n"
      "[c]\nfamily = custom-coefficients\nterms = 0.5 0 2 0 | -0.5 2 0 0\n"
      "[bad]\nfamily = nope\n"
      "[badterms]\nfamily = custom-coefficients\nterms = 1 2\n");
  std::array<double, 1> q{0.3}, v{-0.7}, w{0.2};
  CHECK(make_lagrangian(c.section("h"))(0.0, q, v, w) == doctest::Approx(0.49 - 2.0 * 0.09));
  const LagrangianSpec p = make_lagrangian(c.section("p"));
  const LagrangianSpec cc = make_lagrangian(c.section("c"));
  CHECK(p(0.0, q, v, w) == doctest::Approx(cc(0.0, q, v, w)));
  CHECK_THROWS_AS(make_lagrangian(c.section("bad")), ConfigError);
  CHECK_THROWS_AS(make_lagrangian(c.section("badterms")), ConfigError);
  CHECK(polynomial({1.0, 2.0, 3.0}, 2.0) == 17.0);
  CHECK(polynomial_derivative({1.0, 2.0, 3.0}, 2.0) == 14.0);
}

TEST_CASE("symmetry and control families") {
  const Config c = Config::parse(
      "[s]\nfamily = space-translation\ndirection = 1, 2\n"
      "[r]\nfamily = rotation\n"
      "[lq]\nfamily = linear-quadratic\nq_a = 1\n"
      "[cp]\nfamily = custom-polynomial\nalpha = 0.5\nterms = 0.5 0 2 0 | 0.5 0 0 2\nq_a = 0\n");
  CHECK(make_symmetry(c.section("s"), 2).dim == 2);
  CHECK_THROWS_AS(make_symmetry(c.section("s"), 1), ConfigError);
  CHECK_THROWS_AS(make_symmetry(c.section("r"), 1), ConfigError);
  const Grid g(0.0, 1.0, 16);
  CHECK_FALSE(make_control(c.section("lq"), nullptr, g).fractional());
  CHECK(make_control(c.section("cp"), nullptr, g).fractional());
}

TEST_CASE("csv formatting keeps full precision") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  Table t;
  t.columns = {"a", "b"};
  t.add_row({1.0, 2.5});
  CHECK(t.to_csv() == "a,b\n1,2.5\n");
  CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("sha256 of known input") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("operator-test scenario writes an order column") {
  const fs::path out = scratch("operator");
  RunOptions opt;
  opt.out = out;
  const RunManifest m = run_scenario_text(
      "[scenario]\nkind = operator-test\n[operator]\nname = caputo-left\nalpha = 0.5\npower = 2\ngrids = 64,128,256,512\n", opt);
  const auto rows = read_csv(out / "convergence.csv");
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"n", "error", "order"});
  for (std::size_t k = 2; k < rows.size(); ++k) {
    const double order = std::stod(rows[k][2]);
    CHECK(order > 1.3);
    CHECK(order < 2.0);
  }
  // every file in the directory is listed
  std::size_t on_disk = 0;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") ++on_disk;
  }
  CHECK(m.files.size() == on_disk);
  const auto j = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(j["files"].size() == on_disk);
  CHECK(j["software_version"] == kSoftwareVersion);
  for (const auto& f : j["files"]) CHECK(sha256_hex(slurp(out / f["name"].get<std::string>())) == f["sha256"]);
}

TEST_CASE("extremal scenario: missing alpha names the key") {
  RunOptions opt;
  opt.out = scratch("missing-alpha");
  try {
    run_scenario_text("[scenario]\nkind = extremal\n[problem]\nfamily = free\nq_a = 0\nq_b = 1\n", opt);
    FAIL("expected error");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "alpha");
  }
  CHECK_THROWS_AS(run_scenario_text("[scenario]\nkind = spin\n", opt), ConfigError);
  CHECK_THROWS_AS(run_scenario_text("[scenario]\nkind = extremal\n[problem]\nfamily = free\nalpha = 2\nq_a = 0\nq_b = 1\n", opt),
                  ConfigError);
}

TEST_CASE("friction scenario emits three CSVs and a manifest, deterministically") {
  const std::string text =
      "[scenario]\nkind = friction\n[problem]\nfamily = friction\ngamma = 1\n[friction]\nsteps = 256\n";
  RunOptions a, b;
  a.out = scratch("friction-a");
  b.out = scratch("friction-b");
  const RunManifest ma = run_scenario_text(text, a);
  const RunManifest mb = run_scenario_text(text, b);
  for (const char* f : {"trajectory.csv", "diagnostics.csv", "windows.csv", "manifest.json"}) CHECK(fs::exists(*a.out / f));
  CHECK(read_csv(*a.out / "diagnostics.csv")[0] == std::vector<std::string>{"t", "p", "p_half", "H", "noether_defect"});
  REQUIRE(ma.files.size() == mb.files.size());
  for (std::size_t k = 0; k < ma.files.size(); ++k) CHECK(ma.files[k].sha256 == mb.files[k].sha256);
}

TEST_CASE("control scenario columns") {
  RunOptions opt;
  opt.out = scratch("control");
  run_scenario_text("[scenario]\nkind = control\n[grid]\nn = 32\n[control]\nfamily = linear-quadratic\na = -1\nq_a = 1\n", opt);
  CHECK(read_csv(*opt.out / "control.csv")[0] ==
        std::vector<std::string>{"t", "q", "u", "mu", "p", "p_alpha", "H", "invariant"});
}

TEST_CASE("convergence studies") {
  const std::string op = "[scenario]\nkind = operator-test\n[operator]\nname = caputo-left\nalpha = 0.5\n";
  RunOptions opt;
  opt.out = scratch("study");
  convergence_study_text(op, {64, 128, 256, 512}, opt);
  auto rows = read_csv(*opt.out / "study.csv");
  CHECK(rows[0] == std::vector<std::string>{"n", "error", "log2_ratio"});
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::abs(std::stod(rows[k][2]) - 1.5) < 0.2);

  opt.out = scratch("study-single");
  convergence_study_text(op, {128}, opt);
  rows = read_csv(*opt.out / "study.csv");
  CHECK(rows[0] == std::vector<std::string>{"n", "error"});

  opt.out = scratch("study-noether");
  convergence_study_text(
      "[scenario]\nkind = noether\n[problem]\nfamily = free\nkappa = 1\nalpha = 0.5\nq_a = 0\nq_b = 1\n"
      "[symmetry]\nfamily = space-translation\n",
      {128, 256, 512}, opt);
  rows = read_csv(*opt.out / "study.csv");
  CHECK(rows[0][1] == "drift");
  CHECK(std::stod(rows[2][1]) < std::stod(rows[1][1]));
  CHECK(std::stod(rows[3][1]) < std::stod(rows[2][1]));
}
