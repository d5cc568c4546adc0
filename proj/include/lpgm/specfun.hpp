#pragma once

// Special functions on the positive half-line: log-gamma, digamma, trigamma
// and H(x) = digamma(x) - log(x) together with its inverse.
//
// All functions are pure and thread-safe. Arguments <= 0 (or NaN) raise
// lpgm::DomainError.

namespace lpgm::specfun {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

double log_gamma(double x);
double digamma(double x);
double trigamma(double x);

/// H(x) = digamma(x) - log(x). Negative and strictly increasing on (0, inf),
/// with H(0+) = -inf and H(inf) = 0. Evaluated without the cancellation of
/// the naive difference for large x.
double h_func(double x);

/// H'(x) = trigamma(x) - 1/x, evaluated directly (positive for all x > 0).
double h_derivative(double x);

/// Inverse of H on (-inf, 0). Brackets the root by doubling/halving from
/// x = 1, then runs Newton steps safeguarded by bisection.
double h_inverse(double y);

}  // namespace lpgm::specfun
