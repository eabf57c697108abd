#pragma once

namespace ngsat::special {

/// e^{-x} I0(x) and e^{-x} I1(x) for x >= 0. Power series up to x = 20,
/// Hankel asymptotic expansion beyond.
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

/// 1 - e^{-x} I0(x) without cancellation at small x.
double one_minus_bessel_i0_scaled(double x);

/// Principal branch W0(x) for x >= -1/e, Halley iteration to <= 1e-12 residual.
double lambert_w0(double x);

/// W0(e^{log_x}); usable when x itself would overflow.
double lambert_w0_of_exp(double log_x);

}  // namespace ngsat::special
