#include "lpgm/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "lpgm/errors.hpp"

namespace lpgm::specfun {
namespace {

// Arguments below this are shifted upward by recurrence before the
// asymptotic expansions are applied.
constexpr double kAsymptoticThreshold = 10.0;

// B_2 .. B_16
constexpr std::array<double, 8> kBernoulli = {
    1.0 / 6.0,      -1.0 / 30.0,      1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0,     -691.0 / 2730.0,  7.0 / 6.0,  -3617.0 / 510.0};

void require_positive(double x, const char* name) {
  if (!(x > 0.0)) {
    throw DomainError(std::string(name) + ": argument must be > 0, got " + std::to_string(x));
  }
}

int shift_count(double x) {
  return x >= kAsymptoticThreshold ? 0 : static_cast<int>(std::ceil(kAsymptoticThreshold - x));
}

// sum_k B_{2k} / (2k (2k-1) x^{2k-1})
double stirling_tail(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double acc = 0.0;
  for (int k = static_cast<int>(kBernoulli.size()); k >= 1; --k) {
    const double c = kBernoulli[k - 1] / ((2.0 * k) * (2.0 * k - 1.0));
    acc = acc * inv2 + c;
  }
  return acc * inv;
}

// H(x) for x >= threshold: -1/(2x) - sum_k B_{2k} / (2k x^{2k})
double h_asymptotic(double x) {
  const double inv2 = 1.0 / (x * x);
  double acc = 0.0;
  for (int k = static_cast<int>(kBernoulli.size()); k >= 1; --k) {
    acc = acc * inv2 + kBernoulli[k - 1] / (2.0 * k);
  }
  return -0.5 / x - acc * inv2;
}

// sum_k B_{2k} / x^{2k+1}
double trigamma_tail(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double acc = 0.0;
  for (int k = static_cast<int>(kBernoulli.size()); k >= 1; --k) {
    acc = acc * inv2 + kBernoulli[k - 1];
  }
  return acc * inv2 * inv;
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (std::isinf(x)) return x;
  const int k = shift_count(x);
  double shifted = x;
  double product = 1.0;
  for (int j = 0; j < k; ++j) {
    product *= shifted;
    shifted += 1.0;
  }
  constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
  const double value =
      (shifted - 0.5) * std::log(shifted) - shifted + kHalfLog2Pi + stirling_tail(shifted);
  return k == 0 ? value : value - std::log(product);
}

double h_func(double x) {
  require_positive(x, "h_func");
  if (std::isinf(x)) return 0.0;
  const int k = shift_count(x);
  if (k == 0) return h_asymptotic(x);
  double harmonic = 0.0;
  for (int j = 0; j < k; ++j) harmonic += 1.0 / (x + j);
  return h_asymptotic(x + k) - harmonic + std::log1p(k / x);
}

double digamma(double x) {
  require_positive(x, "digamma");
  if (std::isinf(x)) return x;
  const int k = shift_count(x);
  if (k == 0) return std::log(x) + h_asymptotic(x);
  double harmonic = 0.0;
  for (int j = k - 1; j >= 0; --j) harmonic += 1.0 / (x + j);
  const double top = x + k;
  return (std::log(top) + h_asymptotic(top)) - harmonic;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  if (std::isinf(x)) return 0.0;
  const int k = shift_count(x);
  const double top = x + k;
  double value = 1.0 / top + 0.5 / (top * top) + trigamma_tail(top);
  for (int j = k - 1; j >= 0; --j) {
    const double y = x + j;
    value += 1.0 / (y * y);
  }
  return value;
}

double h_derivative(double x) {
  require_positive(x, "h_derivative");
  if (std::isinf(x)) return 0.0;
  const int k = shift_count(x);
  const double top = x + k;
  double value = 0.5 / (top * top) + trigamma_tail(top);
  if (k == 0) return value;
  value += 1.0 / top - 1.0 / x;
  for (int j = k - 1; j >= 0; --j) {
    const double y = x + j;
    value += 1.0 / (y * y);
  }
  return value;
}

double h_inverse(double y) {
  if (!(y < 0.0) || std::isinf(y)) {
    throw DomainError("h_inverse: argument must be finite and < 0, got " + std::to_string(y));
  }
  constexpr double kMaxBracket = 1e300;
  constexpr double kMinBracket = 1e-300;

  double lo = 1.0;
  double hi = 1.0;
  if (h_func(1.0) < y) {
    hi = 2.0;
    while (h_func(hi) < y) {
      lo = hi;
      hi *= 2.0;
      if (hi > kMaxBracket) throw DomainError("h_inverse: argument too close to 0");
    }
  } else {
    lo = 0.5;
    while (h_func(lo) > y) {
      hi = lo;
      lo *= 0.5;
      if (lo < kMinBracket) throw DomainError("h_inverse: argument too negative");
    }
  }

  double x = std::sqrt(lo * hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double f = h_func(x) - y;
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - f / h_derivative(x);
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) return next;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * lo) return next;
    x = next;
  }
  throw InvariantError("h_inverse: iteration did not converge");
}

}  // namespace lpgm::specfun
