#include "lpgm/ratefn.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "lpgm/errors.hpp"
#include "lpgm/specfun.hpp"

namespace lpgm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

PParam::PParam(double p) : p_(p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw DomainError("p must be a finite positive number, got " + std::to_string(p));
  }
}

void PParam::require_surface_support() const {
  if (restricted()) {
    throw UnsupportedError("surface measure requires p >= 1, got p = " + std::to_string(p_));
  }
}

bool TiltParams::in_domain(const PParam& p) const {
  return s > -1.0 && t < 1.0 / p.value() && std::isfinite(s) && std::isfinite(t);
}

bool MeanPoint::strictly_feasible(const PParam& p) const {
  if (!(beta > 0.0) || !std::isfinite(beta) || std::isnan(alpha)) return false;
  if (alpha == -kInf) return true;
  return std::log(beta) > p.value() * alpha;
}

namespace ratefn {

double m_p(const PParam& p) {
  const double pv = p.value();
  return (specfun::digamma(1.0 / pv) + std::log(pv)) / pv;
}

double clt_sigma(const PParam& p) {
  const double pv = p.value();
  const double excess = specfun::trigamma(1.0 / pv) - pv;
  if (!(excess > 0.0)) {
    throw InvariantError("clt_sigma: trigamma(1/p) <= p at p = " + std::to_string(pv));
  }
  return std::sqrt(excess) / pv;
}

double cumulant(const TiltParams& tilt, const PParam& p) {
  if (!tilt.in_domain(p)) return kInf;
  const double pv = p.value();
  const double log_scale = std::log1p(-pv * tilt.t);  // log(1 - p t)
  return -log_scale / pv + tilt.s / pv * (std::log(pv) - log_scale) +
         specfun::log_gamma((tilt.s + 1.0) / pv) - specfun::log_gamma(1.0 / pv);
}

CumulantGradient cumulant_gradient(const TiltParams& tilt, const PParam& p) {
  if (!tilt.in_domain(p)) throw DomainError("cumulant_gradient: point outside the domain");
  const double pv = p.value();
  const double log_scale = std::log1p(-pv * tilt.t);
  return {
      (specfun::digamma((tilt.s + 1.0) / pv) + std::log(pv) - log_scale) / pv,
      (tilt.s + 1.0) / std::exp(log_scale),
  };
}

namespace {

// log of int_0^inf x^s exp(-c x^p) dx, integrated in u = log x around the
// mode of the integrand to keep the quadrature well scaled.
double log_moment_integral(double s, double c, double p) {
  const double a = s + 1.0;
  const double mode = std::log(a / (c * p)) / p;
  auto phi = [&](double u) { return a * u - c * std::exp(p * u); };
  const double peak = phi(mode);
  auto integrand = [&](double v) {
    const double e = phi(mode + v) - peak;
    return e < -745.0 ? 0.0 : std::exp(e);
  };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double left = Quad::integrate(integrand, -kInf, 0.0, 20, 1e-14);
  const double right = Quad::integrate(integrand, 0.0, kInf, 20, 1e-14);
  return peak + std::log(left + right);
}

}  // namespace

double cumulant_oracle(const TiltParams& tilt, const PParam& p) {
  if (!tilt.in_domain(p)) throw DomainError("cumulant_oracle: point outside the domain");
  const double pv = p.value();
  return log_moment_integral(tilt.s, 1.0 / pv - tilt.t, pv) - log_moment_integral(0.0, 1.0 / pv, pv);
}

TiltParams stationary_point(const MeanPoint& target, const PParam& p) {
  if (!target.strictly_feasible(p)) {
    throw NoStationaryPointError("stationary_point: requires beta > e^{p alpha}");
  }
  const double pv = p.value();
  const double v = specfun::h_inverse(pv * target.alpha - std::log(target.beta));
  const double s = pv * v - 1.0;
  return {s, 1.0 / pv - v / target.beta};
}

double legendre_star(const MeanPoint& target, const PParam& p) {
  if (!target.strictly_feasible(p)) return kInf;
  const TiltParams tilt = stationary_point(target, p);
  const double value = tilt.s * target.alpha + tilt.t * target.beta - cumulant(tilt, p);
  return std::max(value, 0.0);
}

double legendre_star_oracle(const MeanPoint& target, const PParam& p, const OracleGrid& grid) {
  if (!target.strictly_feasible(p)) {
    throw DomainError("legendre_star_oracle: requires beta > e^{p alpha}");
  }
  if (grid.coarse_points < 3 || grid.refinement_rounds < 0) {
    throw DomainError("legendre_star_oracle: bad grid");
  }
  const double pv = p.value();
  const double t_cap = 1.0 / pv;
  // s = -1 + e^u, t = 1/p - e^w
  auto objective = [&](double u, double w) {
    const TiltParams tilt{-1.0 + std::exp(u), t_cap - std::exp(w)};
    return tilt.s * target.alpha + tilt.t * target.beta - cumulant(tilt, p);
  };

  const double u_lo = std::log(grid.edge);
  const double u_hi = std::log(1.0 + grid.s_max);
  const double w_lo = std::log(grid.edge);
  const double w_hi = std::log(t_cap - grid.t_min);
  const int m = grid.coarse_points;
  double du = (u_hi - u_lo) / (m - 1);
  double dw = (w_hi - w_lo) / (m - 1);

  double best = -kInf;
  double best_u = u_lo;
  double best_w = w_lo;
  for (int i = 0; i < m; ++i) {
    const double u = u_lo + i * du;
    for (int j = 0; j < m; ++j) {
      const double w = w_lo + j * dw;
      const double f = objective(u, w);
      if (f > best) {
        best = f;
        best_u = u;
        best_w = w;
      }
    }
  }

  constexpr int kHalfWidth = 20;  // +-2 coarse cells at 10x resolution
  for (int round = 0; round < grid.refinement_rounds; ++round) {
    du /= 10.0;
    dw /= 10.0;
    // Re-centre at the current resolution while the argmax sits on the
    // window edge; the concave objective guarantees this terminates.
    for (int recentre = 0; recentre < 1000; ++recentre) {
      const double cu = best_u;
      const double cw = best_w;
      int arg_i = 0;
      int arg_j = 0;
      for (int i = -kHalfWidth; i <= kHalfWidth; ++i) {
        for (int j = -kHalfWidth; j <= kHalfWidth; ++j) {
          const double u = cu + i * du;
          const double w = cw + j * dw;
          const double f = objective(u, w);
          if (f > best) {
            best = f;
            best_u = u;
            best_w = w;
            arg_i = i;
            arg_j = j;
          }
        }
      }
      if (std::abs(arg_i) < kHalfWidth && std::abs(arg_j) < kHalfWidth) break;
    }
  }
  return best;
}

double g_p(double theta, const PParam& p) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("g_p: theta must lie in (0, 1), got " + std::to_string(theta));
  }
  return specfun::h_inverse(p.value() * std::log(theta));
}

double rate_j(double theta, const PParam& p) {
  if (!(theta > 0.0 && theta < 1.0)) return kInf;
  const double pv = p.value();
  const double g = g_p(theta, p);
  const double value = (pv * g - 1.0) * std::log(theta) + g * (std::log(g) - 1.0) -
                       specfun::log_gamma(g) + 1.0 / pv + std::log(pv) / pv +
                       specfun::log_gamma(1.0 / pv);
  return std::max(value, 0.0);
}

RatePoint rate_point(double theta, const PParam& p) {
  const double g = g_p(theta, p);
  const double pv = p.value();
  return {theta, rate_j(theta, p), g, pv * g - 1.0, 1.0 / pv - g};
}

std::vector<RatePoint> rate_curve(const PParam& p, double theta_min, double theta_max, int count) {
  if (!(theta_min > 0.0 && theta_min < theta_max && theta_max < 1.0)) {
    throw DomainError("rate_curve: need 0 < theta_min < theta_max < 1");
  }
  if (count < 2) throw DomainError("rate_curve: count must be >= 2");
  std::vector<RatePoint> out;
  out.reserve(static_cast<std::size_t>(count));
  const double step = (theta_max - theta_min) / (count - 1);
  for (int i = 0; i < count; ++i) {
    const double theta = i + 1 == count ? theta_max : theta_min + i * step;
    out.push_back(rate_point(theta, p));
  }
  return out;
}

}  // namespace ratefn
}  // namespace lpgm
