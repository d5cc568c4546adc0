#include "lpgm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lpgm/errors.hpp"

namespace lpgm::sampler {

double sample_log_gamma(double shape, RngState& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("sample_log_gamma: shape must be positive, got " + std::to_string(shape));
  }
  const bool boost = shape < 1.0;
  const double a = boost ? shape + 1.0 : shape;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double log_value = 0.0;
  for (;;) {
    const double x = rng.normal();
    const double cube_root = 1.0 + c * x;
    if (cube_root <= 0.0) continue;
    const double v = cube_root * cube_root * cube_root;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      log_value = std::log(d) + std::log(v);
      break;
    }
  }
  if (boost) log_value += std::log(rng.uniform()) / shape;
  return log_value;
}

namespace {

inline double random_sign(RngState& rng) { return (rng.next_u32() & 1U) != 0U ? -1.0 : 1.0; }

}  // namespace

double sample_pgauss(const PParam& p, RngState& rng) {
  const double pv = p.value();
  const double log_abs = (std::log(pv) + sample_log_gamma(1.0 / pv, rng)) / pv;
  return random_sign(rng) * std::exp(log_abs);
}

double lp_norm(std::span<const double> x, const PParam& p) {
  double largest = 0.0;
  for (double v : x) largest = std::max(largest, std::abs(v));
  if (largest == 0.0 || !std::isfinite(largest)) return largest;
  const double pv = p.value();
  double sum = 0.0;
  for (double v : x) sum += std::pow(std::abs(v) / largest, pv);
  return largest * std::pow(sum, 1.0 / pv);
}

double sample_cone_into(std::span<double> out, const PParam& p, RngState& rng) {
  if (out.empty()) throw DomainError("sample_cone: n must be >= 1");
  double norm = 0.0;
  do {
    for (double& v : out) v = sample_pgauss(p, rng);
    norm = lp_norm(out, p);
  } while (!(norm > 0.0));
  for (double& v : out) v /= norm;
  return norm;
}

SphereSample sample_cone(int n, const PParam& p, RngState& rng) {
  if (n < 1) throw DomainError("sample_cone: n must be >= 1");
  SphereSample sample;
  sample.coords.resize(static_cast<std::size_t>(n));
  sample_cone_into(sample.coords, p, rng);
  sample.norm_check = lp_norm(sample.coords, p);
  if (!p.restricted()) sample.weight = surface_weight(sample.coords, p);
  return sample;
}

void sample_ball_into(std::span<double> out, const PParam& p, RngState& rng) {
  sample_cone_into(out, p, rng);
  const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(out.size()));
  for (double& v : out) v *= radius;
}

BallSample sample_ball(int n, const PParam& p, RngState& rng) {
  if (n < 1) throw DomainError("sample_ball: n must be >= 1");
  BallSample sample;
  sample.coords.resize(static_cast<std::size_t>(n));
  sample_ball_into(sample.coords, p, rng);
  return sample;
}

double surface_weight(std::span<const double> coords, const PParam& p) {
  p.require_surface_support();
  const double norm = lp_norm(coords, p);
  if (!(std::abs(norm - 1.0) <= 1e-9)) {
    throw DomainError("surface_weight: point is not on the unit l_p sphere (norm " +
                      std::to_string(norm) + ")");
  }
  const double exponent = 2.0 * p.value() - 2.0;
  double sum = 0.0;
  for (double v : coords) sum += std::pow(std::abs(v), exponent);
  return std::sqrt(sum);
}

TiltedLogDraw sample_tilted_log(const TiltParams& tilt, const PParam& p, double log_cumulant,
                                RngState& rng) {
  const double pv = p.value();
  const double log_abs =
      (std::log(pv) - std::log1p(-pv * tilt.t) + sample_log_gamma((tilt.s + 1.0) / pv, rng)) / pv;
  const double abs_pow_p = std::exp(pv * log_abs);
  const double sign = random_sign(rng);
  return {log_abs, abs_pow_p, log_cumulant - (tilt.s * log_abs + tilt.t * abs_pow_p), sign};
}

TiltedDraw sample_tilted(const TiltParams& tilt, const PParam& p, RngState& rng) {
  if (!tilt.in_domain(p)) throw DomainError("sample_tilted: tilt outside the cumulant domain");
  const TiltedLogDraw draw = sample_tilted_log(tilt, p, ratefn::cumulant(tilt, p), rng);
  return {draw.sign * std::exp(draw.log_abs), draw.log_weight_increment};
}

}  // namespace lpgm::sampler
