#include "fracnoether/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "fracnoether/csv.hpp"
#include "fracnoether/error.hpp"
#include "fracnoether/families.hpp"
#include "fracnoether/fracops.hpp"
#include "fracnoether/friction.hpp"
#include "fracnoether/gamma.hpp"
#include "fracnoether/noether.hpp"
#include "fracnoether/optctrl.hpp"
#include "fracnoether/variational.hpp"
#include "json.hpp"

namespace fracnoether {

namespace {

namespace fs = std::filesystem;

using Metrics = std::vector<std::pair<std::string, double>>;

struct Outcome {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  Metrics metrics;
  std::string headline;  // metric used by convergence studies
};

double metric(const Metrics& m, const std::string& name) {
  for (const auto& [k, v] : m) {
    if (k == name) return v;
  }
  throw NumericalError("metric '" + name + "' was not produced");
}

std::string summary_csv(const Metrics& m) {
  std::string out = "metric,value\n";
  for (const auto& [k, v] : m) out += k + "," + format_double(v) + "\n";
  return out;
}

const ConfigSection& optional_section(const Config& cfg, const std::string& name) {
  static const ConfigSection empty;
  return cfg.has(name) ? cfg.section(name) : empty;
}

Grid scenario_grid(const Config& cfg, std::optional<std::size_t> n_override) {
  const ConfigSection& s = optional_section(cfg, "grid");
  const double a = s.get_double("a", 0.0);
  const double b = s.get_double("b", 1.0);
  if (!(b > a)) s.fail("b", "key 'b' must exceed 'a'");
  const std::size_t n = n_override ? *n_override : s.get_size("n", 256);
  if (n < 2) s.fail("n", "key 'n' must be at least 2");
  return Grid(a, b, n);
}

double solver_tol(const Config& cfg, const RunOptions& opt) {
  if (opt.tol) {
    if (!(*opt.tol > 0.0)) throw InputError("--tol must be positive");
    return *opt.tol;
  }
  const ConfigSection& s = optional_section(cfg, "solver");
  const double tol = s.get_double("tol", 1e-8);
  if (!(tol > 0.0)) s.fail("tol", "key 'tol' must be positive");
  return tol;
}

double derivative_order(const ConfigSection& s) {
  const double alpha = s.get_double("alpha");
  if (!(alpha > 0.0 && alpha <= 1.0)) s.fail("alpha", "key 'alpha' must lie in (0, 1]");
  return alpha;
}

VariationalProblem scenario_problem(const Config& cfg, const Grid& grid) {
  const ConfigSection& s = cfg.section("problem");
  const double alpha = derivative_order(s);
  if (s.get_string("family") == "friction" && alpha != kFrictionOrder) {
    s.fail("alpha", "friction problems use alpha = 0.5");
  }
  VariationalProblem p{make_lagrangian(s), grid, alpha, s.get_list("q_a"), s.get_list("q_b")};
  if (p.q_a.size() != p.dim()) s.fail("q_a", "key 'q_a' must have " + std::to_string(p.dim()) + " entries");
  if (p.q_b.size() != p.dim()) s.fail("q_b", "key 'q_b' must have " + std::to_string(p.dim()) + " entries");
  p.validate();
  return p;
}

// ---- operator-test ----

struct PowerRule {
  std::function<GridFunction(const GridFunction&)> apply;
  double shift = 0.0;  // exponent change: result ~ coefficient (distance)^{power + shift}
  double coefficient = 0.0;
  bool right = false;
};

PowerRule power_rule(const ConfigSection& s, double alpha, double power) {
  const std::string name = s.get_string("name");
  PowerRule r;
  const bool integral = name.rfind("rl-integral", 0) == 0;
  if (!integral && !(alpha > 0.0 && alpha <= 1.0)) s.fail("alpha", "key 'alpha' must lie in (0, 1]");
  if (integral && !(alpha > 0.0)) s.fail("alpha", "key 'alpha' must be positive");
  r.shift = integral ? alpha : -alpha;
  r.coefficient = gamma_fn(power + 1.0) * reciprocal_gamma(power + 1.0 + r.shift);
  if (name == "caputo-left" || name == "caputo-right") {
    if (power == 0.0) r.coefficient = 0.0;
  }
  if (name == "caputo-left") {
    r.apply = [alpha](const GridFunction& f) { return caputo_left(f, alpha); };
  } else if (name == "caputo-right") {
    r.apply = [alpha](const GridFunction& f) { return caputo_right(f, alpha); };
    r.right = true;
  } else if (name == "rl-derivative-left") {
    r.apply = [alpha](const GridFunction& f) { return rl_derivative_left(f, alpha); };
  } else if (name == "rl-derivative-right") {
    r.apply = [alpha](const GridFunction& f) { return rl_derivative_right(f, alpha); };
    r.right = true;
  } else if (name == "rl-integral-left") {
    r.apply = [alpha](const GridFunction& f) { return rl_integral_left(f, alpha); };
  } else if (name == "rl-integral-right") {
    r.apply = [alpha](const GridFunction& f) { return rl_integral_right(f, alpha); };
    r.right = true;
  } else {
    s.fail("name", "unknown operator '" + name +
                       "' (expected caputo-left, caputo-right, rl-derivative-left, rl-derivative-right, "
                       "rl-integral-left, rl-integral-right)");
  }
  return r;
}

// Max error against the power rule at finite, non-singular nodes.
double power_rule_error(const PowerRule& r, const Grid& grid, double power) {
  auto dist = [&](double t) { return r.right ? grid.b() - t : t - grid.a(); };
  const GridFunction f = GridFunction::sample(grid, [&](double t) { return std::pow(dist(t), power); });
  const GridFunction v = r.apply(f);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const double d = dist(grid.node(i));
    if (v.flagged(i) || (d == 0.0 && power + r.shift < 0.0)) continue;
    const double exact = r.coefficient == 0.0 ? 0.0 : r.coefficient * std::pow(d, power + r.shift);
    err = std::max(err, std::abs(v(i) - exact));
  }
  return err;
}

Outcome run_operator_test(const Config& cfg, const std::vector<std::size_t>& grids) {
  const ConfigSection& s = cfg.section("operator");
  const double alpha = s.get_double("alpha");
  const double power = s.get_double("power", 2.0);
  if (!(power >= 0.0)) s.fail("power", "key 'power' must be non-negative");
  const PowerRule rule = power_rule(s, alpha, power);
  const ConfigSection& gs = optional_section(cfg, "grid");
  const double a = gs.get_double("a", 0.0), b = gs.get_double("b", 1.0);
  if (!(b > a)) gs.fail("b", "key 'b' must exceed 'a'");

  Table t;
  t.columns = {"n", "error", "order"};
  double prev = NAN;
  for (std::size_t n : grids) {
    const double err = power_rule_error(rule, Grid(a, b, n), power);
    const double order = std::isnan(prev) ? NAN : std::log2(prev / err);
    t.add_row({static_cast<double>(n), err, order});
    prev = err;
  }
  Outcome o;
  o.files.emplace_back("convergence.csv", t.to_csv());
  o.metrics = {{"error", prev}};
  if (grids.size() > 1) o.metrics.emplace_back("order", t.rows.back()[2]);
  o.headline = "error";
  return o;
}

std::vector<std::size_t> operator_grids(const Config& cfg) {
  const ConfigSection& s = cfg.section("operator");
  std::vector<std::size_t> grids =
      s.has("grids") ? s.get_size_list("grids") : std::vector<std::size_t>{64, 128, 256, 512};
  for (std::size_t n : grids) {
    if (n < 2) s.fail("grids", "every grid needs at least 2 intervals");
  }
  return grids;
}

// ---- extremal / noether ----

Table extremal_table(const ExtremalSolution& sol) {
  return grid_table(sol.trajectory.grid(), {{"q", &sol.trajectory},
                                           {"qdot", &sol.velocity},
                                           {"caputo_q", &sol.caputo_velocity},
                                           {"el_residual", &sol.el_residual}});
}

Outcome run_extremal(const Config& cfg, const RunOptions& opt, std::optional<std::size_t> n) {
  const VariationalProblem p = scenario_problem(cfg, scenario_grid(cfg, n));
  const ExtremalSolution sol = solve_extremal(p, std::nullopt, SolveOptions{solver_tol(cfg, opt), 0});
  Outcome o;
  o.files.emplace_back("extremal.csv", extremal_table(sol).to_csv());
  o.metrics = {{"action", sol.action},
               {"discrete_action", discrete_action(p, sol.trajectory)},
               {"el_residual_norm", sol.el_residual_norm},
               {"gradient_norm", sol.gradient_norm},
               {"iterations", static_cast<double>(sol.iterations)}};
  o.headline = "el_residual_norm";
  return o;
}

std::size_t truncation(const Config& cfg, const RunOptions& opt) {
  std::size_t R = 0;
  if (opt.truncation) {
    R = *opt.truncation;
    if (R > kMaxTruncation) throw InputError("--truncation must not exceed " + std::to_string(kMaxTruncation));
    return R;
  }
  const ConfigSection& s = optional_section(cfg, "noether");
  R = s.get_size("truncation", 2);
  if (R > kMaxTruncation) s.fail("truncation", "key 'truncation' must not exceed " + std::to_string(kMaxTruncation));
  return R;
}

bool moves_time(const SymmetryGroup& s, const Grid& grid) {
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    if (s.tau(grid.node(i)) != 0.0) return true;
  }
  return false;
}

Outcome run_noether(const Config& cfg, const RunOptions& opt, std::optional<std::size_t> n) {
  const VariationalProblem p = scenario_problem(cfg, scenario_grid(cfg, n));
  const SymmetryGroup sym = make_symmetry(cfg.section("symmetry"), p.dim());
  const std::size_t R = truncation(cfg, opt);
  const ExtremalSolution sol = solve_extremal(p, std::nullopt, SolveOptions{solver_tol(cfg, opt), 0});

  const GridFunction quantity = noether_quantity(p, sol, sym, R);
  const GridFunction gens = tabulate_generators(sym, sol.trajectory);
  GridFunction tau(p.grid, 1), f2(p.grid, p.dim());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    tau(i) = gens(i, 0);
    for (std::size_t k = 0; k < p.dim(); ++k) f2(i, k) = gens(i, k + 1);
  }
  const LagrangianSamples ls = sample_lagrangian(p, sol.trajectory);
  const InvariantSeries series = transfer_series(f2, ls.dw, p.alpha, R);
  const double defect = invariance_defect(p, sol.trajectory, sym, moves_time(sym, p.grid));

  Outcome o;
  o.files.emplace_back("extremal.csv", extremal_table(sol).to_csv());
  o.files.emplace_back("quantity.csv", grid_table(p.grid, {{"q", &sol.trajectory}, {"quantity", &quantity}}).to_csv());
  o.files.emplace_back("generators.csv", grid_table(p.grid, {{"tau", &tau}, {"f2_", &f2}}).to_csv());
  o.metrics = {{"drift", drift_report(quantity)},
               {"invariance_defect", defect},
               {"tail_estimate", series.tail_estimate},
               {"truncation", static_cast<double>(R)},
               {"el_residual_norm", sol.el_residual_norm}};
  if (p.lagrangian.autonomous()) o.metrics.emplace_back("autonomous_drift", drift_report(autonomous_quantity(p, sol)));
  o.headline = "drift";
  return o;
}

// ---- friction ----

// Cubic Hermite interpolation of a simulated (q, q̇) trajectory.
std::function<double(double)> hermite(const GridFunction& sim) {
  return [sim](double t) {
    const Grid& g = sim.grid();
    const double h = g.step();
    const double x = (t - g.a()) / h;
    const std::size_t k = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(x))), g.intervals() - 1);
    const double s = x - static_cast<double>(k);
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * sim(k, 0) + h10 * h * sim(k, 1) + h01 * sim(k + 1, 0) + h11 * h * sim(k + 1, 1);
  };
}

Outcome run_friction(const Config& cfg, std::optional<std::size_t> n) {
  const ConfigSection& ps = cfg.section("problem");
  if (ps.get_string("family") != "friction") ps.fail("family", "friction scenarios need family = friction");
  if (ps.has("alpha") && ps.get_double("alpha") != kFrictionOrder) ps.fail("alpha", "friction problems use alpha = 0.5");
  FrictionProblem fp = make_friction(ps);

  const ConfigSection& s = optional_section(cfg, "friction");
  const double q0 = s.get_double("q0", 0.0), v0 = s.get_double("v0", 1.0);
  const double T = s.get_double("T", 1.0);
  if (!(T > 0.0)) s.fail("T", "key 'T' must be positive");
  const std::size_t steps = n ? *n : s.get_size("steps", 1024);
  if (steps < 16) s.fail("steps", "key 'steps' must be at least 16");
  const double centre = s.get_double("centre", 0.5 * T);
  const double width = s.get_double("width", 0.5 * T);
  const std::size_t levels = s.get_size("levels", 5);
  const std::size_t window_n = s.get_size("window_n", 64);
  if (!(width > 0.0) || centre - 0.5 * width < 0.0 || centre + 0.5 * width > T) {
    s.fail("width", "window [centre - width/2, centre + width/2] must lie inside [0, T]");
  }
  if (levels == 0) s.fail("levels", "key 'levels' must be positive");
  if (window_n < 2 || window_n % 2 != 0) s.fail("window_n", "key 'window_n' must be even and at least 2");

  const GridFunction sim = simulate_damped_eom(fp, q0, v0, T, steps);
  GridFunction q(sim.grid(), 1), v(sim.grid(), 1);
  for (std::size_t i = 0; i < sim.size(); ++i) {
    q(i) = sim(i, 0);
    v(i) = sim(i, 1);
  }
  fp.window = sim.grid();
  const FrictionDiagnostics d = friction_diagnostics(fp, q);

  std::vector<Grid> windows;
  for (std::size_t k = 0; k < levels; ++k) {
    const double w = width * std::ldexp(1.0, -static_cast<int>(k));
    windows.emplace_back(centre - 0.5 * w, centre + 0.5 * w, window_n);
  }
  const std::vector<WindowRow> rows = window_shrink_study(fp, hermite(sim), windows);
  Table wt;
  wt.columns = {"a", "b", "dt", "friction_energy", "first_order", "energy_ratio", "halving_ratio", "p_half_mid", "h_drift"};
  for (const WindowRow& r : rows) {
    wt.add_row({r.a, r.b, r.dt, r.friction_energy, r.first_order, r.energy_ratio, r.halving_ratio, r.p_half_mid, r.h_drift});
  }

  Outcome o;
  o.files.emplace_back("trajectory.csv", grid_table(sim.grid(), {{"q", &q}, {"qdot", &v}}).to_csv());
  o.files.emplace_back("diagnostics.csv", grid_table(sim.grid(), {{"p", &d.p},
                                                                  {"p_half", &d.p_half},
                                                                  {"H", &d.H},
                                                                  {"noether_defect", &d.noether_defect}})
                                              .to_csv());
  o.files.emplace_back("windows.csv", wt.to_csv());
  o.metrics = {{"q_end", q(q.size() - 1)},
               {"h_drift", drift_report(d.H)},
               {"noether_defect_drift", drift_report(d.noether_defect)},
               {"last_halving_ratio", rows.size() > 1 ? rows.back().halving_ratio : NAN},
               {"last_energy_ratio", rows.back().energy_ratio}};
  o.headline = "h_drift";
  return o;
}

// ---- control ----

Outcome run_control(const Config& cfg, const RunOptions& opt, std::optional<std::size_t> n) {
  const Grid grid = scenario_grid(cfg, n);
  const ConfigSection* problem = cfg.has("problem") ? &cfg.section("problem") : nullptr;
  const ControlProblem cp = make_control(cfg.section("control"), problem, grid);
  ControlSolveOptions so;
  so.gradient_tol = solver_tol(cfg, opt);
  const ControlSolution sol = solve_control(cp, so);
  const PontryaginState& st = sol.state;

  const GridFunction H = hamiltonian_along(cp, st);
  GridFunction invariant(grid, 1);
  if (cfg.has("symmetry")) {
    const SymmetryGroup sym = make_symmetry(cfg.section("symmetry"), cp.dims().n);
    invariant = control_noether_quantity(cp, st, sym, truncation(cfg, opt));
  } else if (cp.autonomous()) {
    invariant = autonomous_control_quantity(cp, st);
  } else {
    throw InputError("non-autonomous control scenarios need a [symmetry] section");
  }

  Outcome o;
  o.files.emplace_back("control.csv", grid_table(grid, {{"q", &st.q},
                                                        {"u", &st.u},
                                                        {"mu", &st.mu},
                                                        {"p", &st.p},
                                                        {"p_alpha", &st.p_alpha},
                                                        {"H", &H},
                                                        {"invariant", &invariant}})
                                          .to_csv());
  o.metrics = {{"cost", sol.cost},
               {"phi_defect", sol.phi_defect},
               {"rho_defect", sol.rho_defect},
               {"h_drift", drift_report(H)},
               {"invariant_drift", drift_report(invariant)},
               {"weight", sol.weight},
               {"iterations", static_cast<double>(sol.iterations)}};
  o.headline = "invariant_drift";
  return o;
}

// ---- plumbing ----

std::string scenario_kind(const Config& cfg) {
  const ConfigSection& s = cfg.section("scenario");
  const std::string kind = s.get_string("kind");
  static const char* kinds[] = {"operator-test", "extremal", "noether", "friction", "control"};
  for (const char* k : kinds) {
    if (kind == k) return kind;
  }
  s.fail("kind", "unknown scenario kind '" + kind + "' (expected operator-test, extremal, noether, friction, control)");
}

Outcome dispatch(const Config& cfg, const std::string& kind, const RunOptions& opt, std::optional<std::size_t> n) {
  if (kind == "operator-test") return run_operator_test(cfg, n ? std::vector<std::size_t>{*n} : operator_grids(cfg));
  if (kind == "extremal") return run_extremal(cfg, opt, n);
  if (kind == "noether") return run_noether(cfg, opt, n);
  if (kind == "friction") return run_friction(cfg, n);
  return run_control(cfg, opt, n);
}

fs::path output_dir(const Config& cfg, const RunOptions& opt) {
  if (opt.out) return *opt.out;
  return optional_section(cfg, "output").get_string("dir", "output");
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes the outcome, then lists every file under dir (manifest excluded) in name order.
RunManifest finish(const std::string& text, const std::string& kind, const fs::path& dir, const Outcome& o,
                   const std::string& started, std::chrono::steady_clock::time_point t0) {
  for (const auto& [name, contents] : o.files) write_text_file(dir / name, contents);
  write_text_file(dir / "summary.csv", summary_csv(o.metrics));

  RunManifest m;
  m.scenario_text = text;
  m.kind = kind;
  m.version = kSoftwareVersion;
  m.started_utc = started;
  m.output_dir = dir;
  m.metrics = o.metrics;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == "manifest.json") continue;
    const std::string bytes = read_file(entry.path());
    m.files.push_back({rel, sha256_hex(bytes), bytes.size()});
  }
  std::sort(m.files.begin(), m.files.end(), [](const EmittedFile& x, const EmittedFile& y) { return x.name < y.name; });
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text_file(dir / "manifest.json", m.to_json());
  return m;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("sha256 digest failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return out.str();
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario_text;
  j["kind"] = kind;
  j["software_version"] = version;
  j["started_utc"] = started_utc;
  j["wall_clock_seconds"] = wall_seconds;
  nlohmann::ordered_json mj = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metrics) mj[k] = v;
  j["metrics"] = mj;
  nlohmann::ordered_json fj = nlohmann::ordered_json::array();
  for (const EmittedFile& f : files) fj.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["files"] = fj;
  return j.dump(2) + "\n";
}

RunManifest run_scenario_text(const std::string& text, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  const Config cfg = Config::parse(text);
  const std::string kind = scenario_kind(cfg);
  const fs::path dir = output_dir(cfg, options);
  const Outcome o = dispatch(cfg, kind, options, std::nullopt);
  return finish(text, kind, dir, o, started, t0);
}

RunManifest run_scenario(const fs::path& file, const RunOptions& options) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot read scenario file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_scenario_text(buf.str(), options);
}

RunManifest convergence_study_text(const std::string& text, const std::vector<std::size_t>& grids,
                                   const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  if (grids.empty()) throw InputError("study needs at least one grid");
  for (std::size_t n : grids) {
    if (n < 2) throw InputError("study grids need at least 2 intervals, got " + std::to_string(n));
  }
  const Config cfg = Config::parse(text);
  const std::string kind = scenario_kind(cfg);
  const fs::path dir = output_dir(cfg, options);

  Table t;
  std::vector<double> values;
  std::string name;
  for (std::size_t n : grids) {
    const Outcome o = dispatch(cfg, kind, options, n);
    name = o.headline;
    values.push_back(metric(o.metrics, o.headline));
  }
  t.columns = {"n", name};
  if (grids.size() > 1) t.columns.push_back("log2_ratio");
  for (std::size_t k = 0; k < grids.size(); ++k) {
    std::vector<double> row{static_cast<double>(grids[k]), values[k]};
    if (grids.size() > 1) row.push_back(k == 0 ? NAN : std::log2(values[k - 1] / values[k]));
    t.add_row(std::move(row));
  }
  Outcome study;
  study.files.emplace_back("study.csv", t.to_csv());
  study.metrics = {{name + "_finest", values.back()}};
  if (grids.size() > 1) study.metrics.emplace_back("log2_ratio_last", t.rows.back()[2]);
  return finish(text, kind, dir, study, started, t0);
}

RunManifest convergence_study(const fs::path& file, const std::vector<std::size_t>& grids,
                              const RunOptions& options) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot read scenario file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return convergence_study_text(buf.str(), grids, options);
}

}  // namespace fracnoether
