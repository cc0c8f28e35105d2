#pragma once

namespace fracnoether {

/// Euler gamma function via the Lanczos approximation (g = 7, nine terms),
/// with reflection for x < 1/2. Relative error below 1e-13 on (0, 10].
double gamma_fn(double x);

/// 1/Γ(x), returning exactly zero at the poles x = 0, -1, -2, ...
double reciprocal_gamma(double x);

}  // namespace fracnoether
