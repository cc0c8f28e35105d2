#include "fracnoether/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "fracnoether/families.hpp"
#include "fracnoether/fracops.hpp"
#include "fracnoether/friction.hpp"
#include "fracnoether/noether.hpp"
#include "fracnoether/optctrl.hpp"
#include "fracnoether/scenario.hpp"
#include "fracnoether/variational.hpp"

namespace fracnoether {

namespace {

namespace fs = std::filesystem;

std::string sci(double x) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << x;
  return out.str();
}

std::string fixed(double x, int digits = 3) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << x;
  return out.str();
}

std::string list(const std::vector<double>& xs, bool scientific) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + (scientific ? sci(xs[i]) : fixed(xs[i]));
  return s + "]";
}

struct Check {
  bool ok = false;
  std::string detail;
};

CriterionResult timed(int id, std::string title, double limit, const std::function<Check()>& body) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  r.limit = limit;
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c = {false, std::string("error: ") + e.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.passed = c.ok && r.seconds <= limit;
  r.detail = c.detail;
  return r;
}

LagrangianSpec quadratic(double kq, double kw) {
  // v²/2 − kq q²/2 + kw w²/2
  return LagrangianSpec(
      1,
      [kq, kw](double, std::span<const double> q, std::span<const double> v, std::span<const double> w) {
        return 0.5 * v[0] * v[0] - 0.5 * kq * q[0] * q[0] + 0.5 * kw * w[0] * w[0];
      },
      LagrangianGradFn([kq, kw](double, std::span<const double> q, std::span<const double> v,
                                std::span<const double> w, std::span<double> dq, std::span<double> dv,
                                std::span<double> dw) {
        dq[0] = -kq * q[0];
        dv[0] = v[0];
        dw[0] = kw * w[0];
      }),
      true);
}

VariationalProblem fractional_problem(std::size_t n) {
  return VariationalProblem{quadratic(0.0, 1.0), Grid(0.0, 1.0, n), 0.5, {0.0}, {1.0}};
}

Check operator_accuracy() {
  const double alpha = 0.5;
  const double c = std::tgamma(3.0) / std::tgamma(3.0 - alpha);
  std::vector<double> errs, orders;
  for (std::size_t n : {64, 128, 256, 512}) {
    const Grid g(0.0, 1.0, n);
    const GridFunction d = caputo_left(GridFunction::sample(g, [](double t) { return t * t; }), alpha);
    double e = 0.0;
    for (std::size_t i = 0; i < g.nodes(); ++i) e = std::max(e, std::abs(d(i) - c * std::pow(g.node(i), 2.0 - alpha)));
    if (!errs.empty()) orders.push_back(std::log2(errs.back() / e));
    errs.push_back(e);
  }
  bool ok = errs.back() < 5e-3;
  for (double o : orders) ok = ok && o >= 1.3 && o <= 2.0;
  return {ok, "err(512)=" + sci(errs.back()) + " (< 5e-3), orders=" + list(orders, false) + " (in [1.3, 2.0])"};
}

Check classical_limit() {
  const std::vector<double> coeffs{1.3, -0.7, 2.1, 0.4};
  double worst = 0.0;
  for (std::size_t deg = 0; deg <= 3; ++deg) {
    const Grid g(0.0, 1.0, 64);
    const double h = g.step();
    auto p = [&](double t) {
      double s = 0.0;
      for (std::size_t j = 0; j <= deg; ++j) s += coeffs[j] * std::pow(t, static_cast<double>(j));
      return s;
    };
    const GridFunction f = GridFunction::sample(g, p);
    const GridFunction cl = caputo_left(f, 1.0), cr = caputo_right(f, 1.0);
    const GridFunction rl = rl_derivative_left(f, 1.0), rr = rl_derivative_right(f, 1.0);
    for (std::size_t i = 1; i < g.intervals(); ++i) {
      const double central = (p(g.node(i + 1)) - p(g.node(i - 1))) / (2.0 * h);
      worst = std::max({worst, std::abs(cl(i) - central), std::abs(rl(i) - central), std::abs(cr(i) + central),
                        std::abs(rr(i) + central)});
    }
  }
  return {worst <= 1e-10, "max |operator - central difference| = " + sci(worst) + " (<= 1e-10)"};
}

Check integration_by_parts() {
  std::vector<double> res, ratios;
  for (std::size_t n : {64, 128, 256, 512, 1024}) {
    const Grid g(0.0, 1.0, n);
    const double r = ibp_residual(GridFunction::sample(g, [](double t) { return t * (1.0 - t); }),
                                  GridFunction::sample(g, [](double t) { return t + 1.0; }), 0.5);
    if (!res.empty()) ratios.push_back(res.back() / r);
    res.push_back(r);
  }
  bool ok = true;
  for (double q : ratios) ok = ok && q >= 1.8;
  return {ok, "residuals=" + list(res, true) + ", ratios=" + list(ratios, false) + " (>= 1.8)"};
}

struct HarmonicRun {
  VariationalProblem p{quadratic(1.0, 0.0), Grid(0.0, std::numbers::pi / 2.0, 512), 1.0, {1.0}, {0.0}};
  std::optional<ExtremalSolution> sol;
};

Check euler_lagrange(HarmonicRun& run) {
  run.sol = solve_extremal(run.p);
  double err = 0.0;
  for (std::size_t i = 0; i < run.p.grid.nodes(); ++i) {
    err = std::max(err, std::abs(run.sol->trajectory(i) - std::cos(run.p.grid.node(i))));
  }
  return {err < 1e-4 && run.sol->el_residual_norm < 1e-3,
          "max|q - cos| = " + sci(err) + " (< 1e-4), el_residual_norm = " + sci(run.sol->el_residual_norm) + " (< 1e-3)"};
}

Check classical_noether(const HarmonicRun& run) {
  if (!run.sol) return {false, "criterion 4 extremal unavailable"};
  const double energy = drift_report(autonomous_quantity(run.p, *run.sol));
  const double series = drift_report(noether_quantity(run.p, *run.sol, time_translation(1), 2));
  return {energy < 1e-4 && series < 1e-4,
          "energy drift = " + sci(energy) + ", time-translation quantity drift = " + sci(series) + " (< 1e-4)"};
}

Check fractional_noether() {
  std::vector<double> drifts, ratios;
  for (std::size_t n : {128, 256, 512}) {
    const VariationalProblem p = fractional_problem(n);
    const ExtremalSolution sol = solve_extremal(p);
    const double d = drift_report(autonomous_quantity(p, sol));
    if (!drifts.empty()) ratios.push_back(drifts.back() / d);
    drifts.push_back(d);
  }
  bool ok = true;
  for (double q : ratios) ok = ok && q >= 1.5;
  return {ok, "drift(128,256,512) = " + list(drifts, true) + ", ratios = " + list(ratios, false) + " (>= 1.5)"};
}

Check transfer_formula() {
  const Grid g(0.0, 1.0, 512);
  const double alpha = 0.5;
  const GridFunction f = GridFunction::sample(g, [](double t) { return 1.0 + 0.5 * t - t * t + 0.25 * t * t * t; });
  const GridFunction gg = GridFunction::sample(g, [](double t) { return 2.0 - t + t * t * t / 3.0; });
  const InvariantSeries s = transfer_series(f, gg, alpha, 3);
  const GridFunction lhs = classical_derivative(s.sum());
  const GridFunction cf = caputo_left(f, alpha);
  const GridFunction dg = rl_derivative_right(gg, alpha);
  double gap = 0.0, inner = 0.0;
  const std::size_t n = g.intervals();
  for (std::size_t i = 1; i < n; ++i) {
    if (dg.flagged(i)) continue;
    const double e = std::abs(lhs(i) - (gg(i) * cf(i) - f(i) * dg(i)));
    gap = std::max(gap, e);
    if (i >= n / 8 && i <= n - n / 8) inner = std::max(inner, e);
  }
  // inner: nodes in [a + (b-a)/8, b - (b-a)/8], reported only
  return {gap < s.tail_estimate + 0.1, "gap = " + sci(gap) + " (< tail " + sci(s.tail_estimate) +
                                           " + 0.1), gap on [1/8, 7/8] = " + sci(inner)};
}

Check friction_demo() {
  FrictionProblem fp;
  fp.mass = 1.0;
  fp.gamma = 1.0;
  fp.potential = [](double) { return 0.0; };
  fp.dpotential = [](double) { return 0.0; };
  const GridFunction sim = simulate_damped_eom(fp, 0.0, 1.0, 1.0, 1024);
  const double qerr = std::abs(sim(1024, 0) - (1.0 - std::exp(-1.0)));

  // Window study on the simulated trajectory (cubic Hermite between steps).
  auto q_global = [&sim](double t) {
    const double h = sim.grid().step();
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t / h), sim.grid().intervals() - 1);
    const double s = t / h - static_cast<double>(k);
    return (1 + 2 * s) * (1 - s) * (1 - s) * sim(k, 0) + s * (1 - s) * (1 - s) * h * sim(k, 1) +
           s * s * (3 - 2 * s) * sim(k + 1, 0) + s * s * (s - 1) * h * sim(k + 1, 1);
  };
  std::vector<Grid> windows;
  for (int k = 0; k < 5; ++k) {
    const double w = 0.5 * std::ldexp(1.0, -k);
    windows.emplace_back(0.5 - w / 2, 0.5 + w / 2, 64);
  }
  const std::vector<WindowRow> rows = window_shrink_study(fp, q_global, windows);
  std::vector<double> halvings;
  bool halving_ok = true;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    halvings.push_back(rows[k].halving_ratio);
    halving_ok = halving_ok && std::abs(rows[k].halving_ratio - 0.5) <= 0.05;
  }

  // Harmonic potential, matched runs with and without damping.
  auto h_drift = [](double gamma) {
    FrictionProblem hp;
    hp.gamma = gamma;
    hp.potential = [](double q) { return 0.5 * q * q; };
    hp.dpotential = [](double q) { return q; };
    const GridFunction s = simulate_damped_eom(hp, 1.0, 0.0, 1.0, 1024);
    GridFunction q(s.grid(), 1);
    for (std::size_t i = 0; i < s.size(); ++i) q(i) = s(i, 0);
    hp.window = s.grid();
    return drift_report(friction_diagnostics(hp, q).H);
  };
  const double damped = h_drift(1.0), undamped = h_drift(0.0);
  const bool ok = qerr < 1e-8 && halving_ok && damped > 10.0 * undamped;
  return {ok, "|q(1) - (1 - 1/e)| = " + sci(qerr) + " (< 1e-8), halving ratios = " + list(halvings, false) +
                  " (0.5 +- 0.05), H drift gamma=1 " + sci(damped) + " vs gamma=0 " + sci(undamped) + " (> 10x)"};
}

Check pontryagin_reduction() {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), order(0.3, 0.95);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const double alpha = order(rng);
    std::vector<Monomial> terms{{0.5 + 0.5 * std::abs(coef(rng)), 0, 2, 0},
                                {0.5 * std::abs(coef(rng)), 0, 0, 2},
                                {coef(rng), 2, 0, 0},
                                {coef(rng), 1, 1, 1},
                                {coef(rng), 3, 0, 0},
                                {coef(rng), 1, 0, 1}};
    const std::array<double, 4> c{coef(rng), coef(rng), coef(rng), coef(rng)};
    const Grid g(0.0, 1.0, 128);
    const GridFunction q =
        GridFunction::sample(g, [&](double t) { return c[0] + c[1] * t + c[2] * t * t + c[3] * t * t * t; });
    const VariationalProblem p{polynomial_lagrangian(terms), g, alpha, {q(0)}, {q(g.intervals())}};
    const ControlProblem cp = reduction_problem(p, true);
    const PontryaginResiduals r = pontryagin_residuals(cp, variational_substitution(p, q));
    const GridFunction el = el_residual(p, q);
    const double scale = std::max(1.0, interior_max_norm(el));
    double gap = 0.0;
    for (std::size_t i = 1; i < g.intervals(); ++i) {
      gap = std::max({gap, std::abs(r.adjoint(i) - el(i)), std::abs(r.dynamics(i)), std::abs(r.fractional(i)),
                      std::abs(r.control(i)), std::abs(r.fcontrol(i))});
    }
    worst = std::max(worst, gap / scale);
  }
  return {worst <= 1e-10, "max relative gap over 5 problems = " + sci(worst) + " (<= 1e-10)"};
}

Check control_noether() {
  std::vector<double> corrected, plain;
  for (std::size_t n : {64, 128, 256}) {
    const ControlProblem cp = reduction_problem(fractional_problem(n), true);
    const ControlSolution sol = solve_control(cp);
    corrected.push_back(drift_report(autonomous_control_quantity(cp, sol.state)));
    plain.push_back(drift_report(hamiltonian_along(cp, sol.state)));
  }
  bool decreasing = true, bounded = true;
  for (std::size_t k = 0; k < corrected.size(); ++k) {
    if (k > 0) decreasing = decreasing && corrected[k] < corrected[k - 1];
    bounded = bounded && corrected[k] <= plain[k];
  }
  return {decreasing && bounded, "corrected drift(64,128,256) = " + list(corrected, true) +
                                     (decreasing ? " decreasing" : " not decreasing") + ", H drift = " +
                                     list(plain, true) + (bounded ? " (corrected <= H)" : " (corrected > H somewhere)")};
}

const std::map<std::string, std::string>& builtin_scenarios() {
  static const std::map<std::string, std::string> s{
      {"operator-test", R"([scenario]
kind = operator-test
[operator]
name = caputo-left
alpha = 0.5
power = 2
grids = 64, 128, 256, 512
)"},
      {"friction", R"([scenario]
kind = friction
[problem]
family = friction
mass = 1
gamma = 1
potential = 0
[friction]
q0 = 0
v0 = 1
T = 1
steps = 1024
)"},
      {"extremal", R"([scenario]
kind = extremal
[grid]
a = 0
b = 1
n = 64
[problem]
family = free
kappa = 1
alpha = 0.5
q_a = 0
q_b = 1
)"}};
  return s;
}

Check determinism(const fs::path& work) {
  std::map<std::string, std::string> first;
  bool same = true;
  std::size_t files = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& [name, text] : builtin_scenarios()) {
      RunOptions opt;
      opt.out = work / ("run" + std::to_string(pass + 1)) / name;
      const RunManifest m = run_scenario_text(text, opt);
      for (const EmittedFile& f : m.files) {
        if (f.name.size() < 4 || f.name.substr(f.name.size() - 4) != ".csv") continue;
        const std::string key = name + "/" + f.name;
        if (pass == 0) {
          first[key] = f.sha256;
          ++files;
        } else {
          same = same && first.count(key) && first[key] == f.sha256;
        }
      }
    }
  }
  return {same && files > 0, std::to_string(files) + " CSV digests " + (same ? "identical" : "differ") + " across two runs"};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const fs::path& work_dir) {
  std::vector<CriterionResult> out;
  HarmonicRun harmonic;
  out.push_back(timed(1, "Operator accuracy", 1.0, operator_accuracy));
  out.push_back(timed(2, "Classical-limit reduction", 1.0, classical_limit));
  out.push_back(timed(3, "Integration by parts", 5.0, integration_by_parts));
  out.push_back(timed(4, "Euler-Lagrange correctness", 30.0, [&] { return euler_lagrange(harmonic); }));
  out.push_back(timed(5, "Noether (classical reduction)", 5.0, [&] { return classical_noether(harmonic); }));
  out.push_back(timed(6, "Noether (fractional)", 120.0, fractional_noether));
  out.push_back(timed(7, "Transfer formula", 10.0, transfer_formula));
  out.push_back(timed(8, "Friction demo", 30.0, friction_demo));
  out.push_back(timed(9, "Pontryagin reduction", 10.0, pontryagin_reduction));
  out.push_back(timed(10, "Control Noether", 120.0, control_noether));
  out.push_back(timed(11, "Determinism", 60.0, [&] { return determinism(work_dir); }));
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << "  " << r.title << ": " << r.detail << "  ["
    << fixed(r.seconds, 2) << " s, limit " << fixed(r.limit, 0) << " s]";
  return s.str();
}

}  // namespace fracnoether
