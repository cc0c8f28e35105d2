#include "fracnoether/families.hpp"

#include <cmath>
#include <sstream>

#include "fracnoether/error.hpp"

namespace fracnoether {

namespace {

double ipow(double x, unsigned e) {
  double r = 1.0;
  for (unsigned k = 0; k < e; ++k) r *= x;
  return r;
}

// d/dx of x^e.
double dipow(double x, unsigned e) { return e == 0 ? 0.0 : static_cast<double>(e) * ipow(x, e - 1); }

std::vector<Monomial> parse_terms(const ConfigSection& s, const std::string& key) {
  const std::string text = s.get_string(key);
  std::vector<Monomial> out;
  std::istringstream groups(text);
  std::string group;
  while (std::getline(groups, group, '|')) {
    std::istringstream in(group);
    Monomial m;
    long i = -1, j = -1, k = -1;
    std::string extra;
    if (!(in >> m.coefficient >> i >> j >> k) || (in >> extra) || i < 0 || j < 0 || k < 0 ||
        i > 8 || j > 8 || k > 8 || !std::isfinite(m.coefficient)) {
      s.fail(key, "key '" + key + "' expects groups 'c i j k' (exponents 0..8) separated by '|', got '" +
                      group + "'");
    }
    m.i = static_cast<unsigned>(i);
    m.j = static_cast<unsigned>(j);
    m.k = static_cast<unsigned>(k);
    out.push_back(m);
  }
  if (out.empty()) s.fail(key, "key '" + key + "' has no terms");
  return out;
}

double positive(const ConfigSection& s, const std::string& key, double fallback) {
  const double v = s.get_double(key, fallback);
  if (!(v > 0.0)) s.fail(key, "key '" + key + "' must be positive");
  return v;
}

std::size_t dimension(const ConfigSection& s) {
  const std::size_t d = s.get_size("dim", 1);
  if (d == 0 || d > 4) s.fail("dim", "key 'dim' must be between 1 and 4");
  return d;
}

// m|v|²/2 − k|q|²/2 + κ|w|²/2.
LagrangianSpec quadratic_lagrangian(std::size_t dim, double m, double k, double kappa) {
  LagrangianFn value = [m, k, kappa](double, std::span<const double> q, std::span<const double> v,
                                     std::span<const double> w) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      s += 0.5 * m * v[i] * v[i] - 0.5 * k * q[i] * q[i] + 0.5 * kappa * w[i] * w[i];
    }
    return s;
  };
  LagrangianGradFn grad = [m, k, kappa](double, std::span<const double> q, std::span<const double> v,
                                        std::span<const double> w, std::span<double> dq,
                                        std::span<double> dv, std::span<double> dw) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      dq[i] = -k * q[i];
      dv[i] = m * v[i];
      dw[i] = kappa * w[i];
    }
  };
  return LagrangianSpec(dim, value, grad, true);
}

}  // namespace

double polynomial(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) r = r * x + c[j];
  return r;
}

double polynomial_derivative(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) r = r * x + static_cast<double>(j) * c[j];
  return r;
}

LagrangianSpec polynomial_lagrangian(std::vector<Monomial> terms) {
  LagrangianFn value = [terms](double, std::span<const double> q, std::span<const double> v,
                               std::span<const double> w) {
    double s = 0.0;
    for (const Monomial& m : terms) s += m.coefficient * ipow(q[0], m.i) * ipow(v[0], m.j) * ipow(w[0], m.k);
    return s;
  };
  LagrangianGradFn grad = [terms](double, std::span<const double> q, std::span<const double> v,
                                  std::span<const double> w, std::span<double> dq,
                                  std::span<double> dv, std::span<double> dw) {
    dq[0] = dv[0] = dw[0] = 0.0;
    for (const Monomial& m : terms) {
      const double a = ipow(q[0], m.i), b = ipow(v[0], m.j), c = ipow(w[0], m.k);
      dq[0] += m.coefficient * dipow(q[0], m.i) * b * c;
      dv[0] += m.coefficient * a * dipow(v[0], m.j) * c;
      dw[0] += m.coefficient * a * b * dipow(w[0], m.k);
    }
  };
  return LagrangianSpec(1, value, grad, true);
}

FrictionProblem make_friction(const ConfigSection& s) {
  FrictionProblem fp;
  fp.mass = positive(s, "mass", 1.0);
  fp.gamma = s.get_double("gamma", 0.0);
  if (fp.gamma < 0.0) s.fail("gamma", "key 'gamma' must be non-negative");
  const std::vector<double> c = s.get_list("potential", {0.0});
  fp.potential = [c](double q) { return polynomial(c, q); };
  fp.dpotential = [c](double q) { return polynomial_derivative(c, q); };
  fp.validate();
  return fp;
}

LagrangianSpec make_lagrangian(const ConfigSection& s) {
  const std::string family = s.get_string("family");
  if (family == "free") {
    return quadratic_lagrangian(dimension(s), positive(s, "mass", 1.0), 0.0, s.get_double("kappa", 0.0));
  }
  if (family == "harmonic") {
    return quadratic_lagrangian(dimension(s), positive(s, "mass", 1.0), s.get_double("stiffness", 1.0),
                                s.get_double("kappa", 0.0));
  }
  if (family == "potential-polynomial") {
    const double m = positive(s, "mass", 1.0);
    const double kappa = s.get_double("kappa", 0.0);
    const std::vector<double> c = s.get_list("potential");
    LagrangianFn value = [m, kappa, c](double, std::span<const double> q, std::span<const double> v,
                                       std::span<const double> w) {
      return 0.5 * m * v[0] * v[0] - polynomial(c, q[0]) + 0.5 * kappa * w[0] * w[0];
    };
    LagrangianGradFn grad = [m, kappa, c](double, std::span<const double> q, std::span<const double> v,
                                          std::span<const double> w, std::span<double> dq,
                                          std::span<double> dv, std::span<double> dw) {
      dq[0] = -polynomial_derivative(c, q[0]);
      dv[0] = m * v[0];
      dw[0] = kappa * w[0];
    };
    return LagrangianSpec(1, value, grad, true);
  }
  if (family == "friction") return friction_lagrangian(make_friction(s));
  if (family == "custom-coefficients") return polynomial_lagrangian(parse_terms(s, "terms"));
  s.fail("family", "unknown Lagrangian family '" + family +
                       "' (expected free, harmonic, potential-polynomial, friction, custom-coefficients)");
}

SymmetryGroup make_symmetry(const ConfigSection& s, std::size_t dim) {
  const std::string family = s.get_string("family");
  SymmetryGroup g;
  if (family == "time-translation") {
    g = time_translation(dim);
  } else if (family == "space-translation") {
    std::vector<double> dir = s.get_list("direction", std::vector<double>(dim, 1.0));
    if (dir.size() != dim) s.fail("direction", "key 'direction' must have " + std::to_string(dim) + " entries");
    g = space_translation(std::move(dir));
  } else if (family == "rotation") {
    if (dim != 2) s.fail("family", "rotation symmetry needs a two-dimensional problem");
    g = rotation(s.get_double("omega", 1.0));
  } else {
    s.fail("family", "unknown symmetry family '" + family +
                         "' (expected time-translation, space-translation, rotation)");
  }
  g.validate();
  return g;
}

ControlProblem make_control(const ConfigSection& c, const ConfigSection* problem, const Grid& grid) {
  const std::string family = c.get_string("family");
  const std::vector<double> q_a = c.get_list("q_a");
  std::optional<std::vector<double>> q_b;
  if (c.has("q_b")) q_b = c.get_list("q_b");

  if (family == "linear-quadratic") {
    const double alpha = c.get_double("alpha", 1.0);
    const double a = c.get_double("a", 0.0);
    const double b = c.get_double("b", 1.0);
    const double Q = c.get_double("qweight", 1.0);
    const double R = positive(c, "rweight", 1.0);
    ControlFunctions f;
    f.L = [Q, R](double, std::span<const double> q, std::span<const double> u, std::span<const double>) {
      return 0.5 * (Q * q[0] * q[0] + R * u[0] * u[0]);
    };
    f.L_grad = [Q, R](double, std::span<const double> q, std::span<const double> u,
                      std::span<const double>, std::span<double> dq, std::span<double> du,
                      std::span<double>) {
      dq[0] = Q * q[0];
      du[0] = R * u[0];
    };
    f.phi = [a, b](double, std::span<const double> q, std::span<const double> u, std::span<double> out) {
      out[0] = a * q[0] + b * u[0];
    };
    f.phi_jac = [a, b](double, std::span<const double>, std::span<const double>, std::span<double> jq,
                       std::span<double> ju) {
      jq[0] = a;
      ju[0] = b;
    };
    return ControlProblem({1, 1, 0}, std::move(f), alpha, grid, q_a, q_b, true);
  }
  if (family == "reduction-of-variations") {
    if (problem == nullptr) c.fail("family", "reduction-of-variations needs a [problem] section");
    return reduction_problem(make_lagrangian(*problem), c.get_double("alpha"), grid, q_a, q_b);
  }
  if (family == "custom-polynomial") {
    const double alpha = c.get_double("alpha");
    const std::vector<Monomial> terms = parse_terms(c, "terms");
    const double pq = c.get_double("phi_q", 0.0), pu = c.get_double("phi_u", 1.0);
    const double rq = c.get_double("rho_q", 0.0), rm = c.get_double("rho_mu", 1.0);
    const LagrangianSpec lag = polynomial_lagrangian(terms);
    ControlFunctions f;
    f.L = [lag](double t, std::span<const double> q, std::span<const double> u,
                std::span<const double> mu) { return lag(t, q, u, mu); };
    f.L_grad = [lag](double t, std::span<const double> q, std::span<const double> u,
                     std::span<const double> mu, std::span<double> dq, std::span<double> du,
                     std::span<double> dmu) { lag.partials(t, q, u, mu, dq, du, dmu); };
    f.phi = [pq, pu](double, std::span<const double> q, std::span<const double> u, std::span<double> out) {
      out[0] = pq * q[0] + pu * u[0];
    };
    f.phi_jac = [pq, pu](double, std::span<const double>, std::span<const double>, std::span<double> jq,
                         std::span<double> ju) {
      jq[0] = pq;
      ju[0] = pu;
    };
    f.rho = [rq, rm](double, std::span<const double> q, std::span<const double> mu, std::span<double> out) {
      out[0] = rq * q[0] + rm * mu[0];
    };
    f.rho_jac = [rq, rm](double, std::span<const double>, std::span<const double>, std::span<double> jq,
                         std::span<double> jm) {
      jq[0] = rq;
      jm[0] = rm;
    };
    return ControlProblem({1, 1, 1}, std::move(f), alpha, grid, q_a, q_b, true);
  }
  c.fail("family", "unknown control family '" + family +
                       "' (expected linear-quadratic, reduction-of-variations, custom-polynomial)");
}

}  // namespace fracnoether
