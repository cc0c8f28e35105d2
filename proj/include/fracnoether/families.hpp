#pragma once

#include <vector>

#include "fracnoether/config.hpp"
#include "fracnoether/friction.hpp"
#include "fracnoether/lagrangian.hpp"
#include "fracnoether/noether.hpp"
#include "fracnoether/optctrl.hpp"

// Registered problem families, built from config sections.
//
// Lagrangians (key `family`):
//   free                  L = m|v|²/2 + κ|w|²/2                       keys: dim, mass, kappa
//   harmonic              L = m|v|²/2 − k|q|²/2 + κ|w|²/2             keys: dim, mass, stiffness, kappa
//   potential-polynomial  L = m v²/2 − Σ c_j q^j + κ w²/2             keys: mass, potential, kappa
//   friction              L = m v²/2 − U(q) + γ w²/2, U polynomial    keys: mass, gamma, potential
//   custom-coefficients   L = Σ c q^i v^j w^k                          keys: terms = "c i j k | c i j k ..."
// Symmetries: time-translation, space-translation (direction), rotation (omega).
// Control problems: linear-quadratic, reduction-of-variations, custom-polynomial.

namespace fracnoether {

/// Polynomial Σ c_j x^j and its derivative.
double polynomial(const std::vector<double>& c, double x);
double polynomial_derivative(const std::vector<double>& c, double x);

/// One monomial c q^i v^j w^k of a custom scalar Lagrangian.
struct Monomial {
  double coefficient = 0.0;
  unsigned i = 0;
  unsigned j = 0;
  unsigned k = 0;
};

/// Scalar polynomial Lagrangian with analytic partials.
LagrangianSpec polynomial_lagrangian(std::vector<Monomial> terms);

LagrangianSpec make_lagrangian(const ConfigSection& s);

/// Friction parameters from a section (mass, gamma, potential); the window is left default.
FrictionProblem make_friction(const ConfigSection& s);

SymmetryGroup make_symmetry(const ConfigSection& s, std::size_t dim);

/// Builds a control problem; `problem` is consulted by reduction-of-variations.
ControlProblem make_control(const ConfigSection& control, const ConfigSection* problem, const Grid& grid);

}  // namespace fracnoether
