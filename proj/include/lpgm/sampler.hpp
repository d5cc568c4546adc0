#pragma once

// Seeded sampling of p-generalized Gaussians and of points under the three
// natural measures on l_p balls and spheres:
//   * uniform on the ball     U^{1/n} Z / ||Z||_p
//   * cone measure            Z / ||Z||_p
//   * surface measure         cone samples reweighted by (sum |x_i|^{2p-2})^{1/2}
// where Z has i.i.d. coordinates with density proportional to e^{-|x|^p/p}.
// The surface measure is only represented through importance weights; its
// normalizing constant cancels in self-normalized estimates.

#include <optional>
#include <span>
#include <vector>

#include "lpgm/ratefn.hpp"
#include "lpgm/rng.hpp"

namespace lpgm {

struct SphereSample {
  std::vector<double> coords;
  /// Unnormalized surface weight; empty when p < 1.
  std::optional<double> weight;
  /// ||coords||_p as recomputed after normalization.
  double norm_check = 0.0;
};

struct BallSample {
  std::vector<double> coords;
};

struct TiltedDraw {
  double value = 0.0;
  /// log dP/dQ for this coordinate; summing over coordinates gives the
  /// log likelihood ratio back to the untilted law.
  double log_weight_increment = 0.0;
};

namespace sampler {

/// log of a unit-scale gamma variate. Marsaglia-Tsang squeeze/accept for
/// shape >= 1; for shape < 1 the shape+1 variate is scaled by U^{1/shape}
/// (in log space, so tiny shapes do not underflow).
double sample_log_gamma(double shape, RngState& rng);

/// One p-generalized Gaussian: sign * (p G)^{1/p}, G ~ Gamma(1/p, 1).
double sample_pgauss(const PParam& p, RngState& rng);

/// ||x||_p, computed with scaling to avoid overflow.
double lp_norm(std::span<const double> x, const PParam& p);

/// Fills `out` with a cone-measure point; returns the l_p norm of the
/// underlying Gaussian vector.
double sample_cone_into(std::span<double> out, const PParam& p, RngState& rng);
SphereSample sample_cone(int n, const PParam& p, RngState& rng);

/// Same random stream consumption as sample_cone followed by one uniform,
/// so identical seeds give identical directions.
void sample_ball_into(std::span<double> out, const PParam& p, RngState& rng);
BallSample sample_ball(int n, const PParam& p, RngState& rng);

/// (sum |x_i|^{2p-2})^{1/2} for a point on the unit l_p sphere.
/// Throws UnsupportedError for p < 1 and DomainError off the sphere.
double surface_weight(std::span<const double> coords, const PParam& p);

/// Exponentially tilted draw: density proportional to
/// |x|^s exp(-(1/p - t)|x|^p). Consumes the stream exactly like
/// sample_pgauss, so the tilt (0, 0) reproduces it bit for bit.
TiltedDraw sample_tilted(const TiltParams& tilt, const PParam& p, RngState& rng);

/// Tilted draw reduced to what the ratio statistic needs. `log_cumulant`
/// must equal ratefn::cumulant(tilt, p); passing it in keeps the hot loop
/// free of log-gamma calls.
struct TiltedLogDraw {
  double log_abs = 0.0;
  double abs_pow_p = 0.0;
  double log_weight_increment = 0.0;
  double sign = 1.0;
};
TiltedLogDraw sample_tilted_log(const TiltParams& tilt, const PParam& p, double log_cumulant,
                                RngState& rng);

}  // namespace sampler
}  // namespace lpgm
