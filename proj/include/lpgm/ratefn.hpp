#pragma once

// Analytic quantities for the ratio of geometric to p-generalized means:
// the concentration constant m_p, the CLT scale, the joint cumulant
// generating function of (log|Z|, |Z|^p) for a p-generalized Gaussian Z,
// its Legendre-Fenchel transform, and the rate function J_p.

#include <vector>

namespace lpgm {

/// Exponent p > 0. Values 0 < p < 1 are accepted in restricted mode; the
/// surface measure (and anything derived from it) requires p >= 1.
class PParam {
 public:
  explicit PParam(double p);

  double value() const { return p_; }
  bool restricted() const { return p_ < 1.0; }
  /// Throws UnsupportedError when p < 1.
  void require_surface_support() const;

 private:
  double p_;
};

/// A point (s, t) at which the cumulant generating function is evaluated.
/// Points outside D = (-1, inf) x (-inf, 1/p) are representable.
struct TiltParams {
  double s = 0.0;
  double t = 0.0;

  bool in_domain(const PParam& p) const;
};

/// Target (alpha, beta) for the mean of (log|Z|, |Z|^p).
struct MeanPoint {
  double alpha = 0.0;
  double beta = 1.0;

  /// beta > e^{p alpha}: the Legendre supremum is attained in the interior.
  bool strictly_feasible(const PParam& p) const;
};

struct RatePoint {
  double theta = 0.0;
  double j_value = 0.0;
  double g_value = 0.0;
  double s_star = 0.0;
  double t_star = 0.0;
};

namespace ratefn {

/// m_p = (digamma(1/p) + log p) / p. Negative for every p > 0.
double m_p(const PParam& p);

/// sqrt(trigamma(1/p) - p) / p, the standard deviation of the limit of
/// sqrt(n) (e^{-m_p} R_n - 1). Throws InvariantError if trigamma(1/p) <= p.
double clt_sigma(const PParam& p);

/// Lambda(s, t) = log E exp(s log|Z| + t |Z|^p). Returns +inf outside the
/// domain.
double cumulant(const TiltParams& tilt, const PParam& p);

struct CumulantGradient {
  double d_s = 0.0;
  double d_t = 0.0;
};

/// Analytic gradient of the cumulant at an interior point:
///   d/ds = [digamma((s+1)/p) + log(p / (1 - p t))] / p
///   d/dt = (s + 1) / (1 - p t)
CumulantGradient cumulant_gradient(const TiltParams& tilt, const PParam& p);

/// Same quantity as cumulant(), by adaptive quadrature of the defining
/// integral (normalized by the untilted integral). Throws DomainError
/// outside the domain.
double cumulant_oracle(const TiltParams& tilt, const PParam& p);

/// Unique solution (s*, t*) of grad Lambda = (alpha, beta). Throws
/// NoStationaryPointError when beta <= e^{p alpha}.
TiltParams stationary_point(const MeanPoint& target, const PParam& p);

/// Lambda*(alpha, beta) via the stationary point; +inf on the infeasible
/// region beta <= e^{p alpha} (including beta <= 0).
double legendre_star(const MeanPoint& target, const PParam& p);

struct OracleGrid {
  int coarse_points = 200;
  int refinement_rounds = 2;
  double s_max = 50.0;
  double t_min = -50.0;
  double edge = 1e-6;
};

/// Brute-force supremum of alpha s + beta t - Lambda(s, t) over a grid that
/// is logarithmic in the distances to the domain boundary, followed by
/// 10x local refinements around the running argmax. Throws DomainError for
/// infeasible targets.
double legendre_star_oracle(const MeanPoint& target, const PParam& p, const OracleGrid& grid = {});

/// G_p(theta) = H^{-1}(p log theta) for theta in (0, 1).
double g_p(double theta, const PParam& p);

/// J_p(theta); +inf outside (0, 1). Never negative.
double rate_j(double theta, const PParam& p);

/// Rate point with G_p and the optimal tilt attached. theta in (0, 1).
RatePoint rate_point(double theta, const PParam& p);

/// J_p on a uniform grid of `count` points in [theta_min, theta_max].
std::vector<RatePoint> rate_curve(const PParam& p, double theta_min, double theta_max, int count);

}  // namespace ratefn
}  // namespace lpgm
