#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lpgm/errors.hpp"
#include "lpgm/ratefn.hpp"
#include "lpgm/specfun.hpp"

using namespace lpgm;
using namespace lpgm::ratefn;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = specfun::kPi;

// Left-hand sides of the stationarity equations, written out from the
// digamma form independently of cumulant_gradient().
double alpha_residual(const TiltParams& st, const MeanPoint& target, double p) {
  const double lhs = (specfun::digamma((st.s + 1.0) / p) + std::log(p / (1.0 - p * st.t))) / p;
  return lhs - target.alpha;
}
double beta_residual(const TiltParams& st, const MeanPoint& target, double p) {
  return (st.s + 1.0) / (1.0 - p * st.t) - target.beta;
}
}  // namespace

TEST_CASE("PParam validation and restricted mode") {
  CHECK_THROWS_AS(PParam{0.0}, DomainError);
  CHECK_THROWS_AS(PParam{-2.0}, DomainError);
  CHECK_THROWS_AS(PParam{kInf}, DomainError);
  CHECK(PParam(0.5).restricted());
  CHECK_FALSE(PParam(1.0).restricted());
  CHECK_THROWS_AS(PParam(0.5).require_surface_support(), UnsupportedError);
  CHECK_NOTHROW(PParam(1.0).require_surface_support());
}

TEST_CASE("m_p reproduces the tabulated constants") {
  const double gamma = specfun::kEulerGamma;
  CHECK(m_p(PParam(1.0)) == doctest::Approx(-gamma).epsilon(1e-14));
  CHECK(m_p(PParam(2.0)) == doctest::Approx(-(gamma + std::log(2.0)) / 2.0).epsilon(1e-14));
  CHECK(m_p(PParam(4.0)) == doctest::Approx(-(2.0 * gamma + kPi + 2.0 * std::log(2.0)) / 8.0).epsilon(1e-14));
  CHECK(std::round(std::exp(m_p(PParam(1.0))) * 1000.0) == 561.0);
  CHECK(std::round(std::exp(m_p(PParam(2.0))) * 1000.0) == 530.0);  // 0.52984; displayed as 0.529
  CHECK(std::round(std::exp(m_p(PParam(4.0))) * 1000.0) == 492.0);  // 0.49150; displayed as 0.491
  CHECK(std::floor(std::exp(m_p(PParam(2.0))) * 1000.0) == 529.0);
  CHECK(std::floor(std::exp(m_p(PParam(4.0))) * 1000.0) == 491.0);
  for (double p : {0.3, 0.5, 1.0, 1.5, 2.0, 4.0, 10.0, 100.0}) {
    const PParam pp(p);
    INFO("p = " << p);
    CHECK(m_p(pp) < 0.0);
    CHECK(std::abs(m_p(pp) - specfun::h_func(1.0 / p) / p) <= 1e-12);
  }
  CHECK(std::abs(m_p(PParam(1000.0)) + 1.0) < 1e-2);
}

TEST_CASE("clt_sigma") {
  CHECK(clt_sigma(PParam(1.0)) == doctest::Approx(std::sqrt(kPi * kPi / 6.0 - 1.0)).epsilon(1e-12));
  CHECK(clt_sigma(PParam(1.0)) == doctest::Approx(0.8031).epsilon(1e-4));
  CHECK(clt_sigma(PParam(2.0)) == doctest::Approx(std::sqrt(kPi * kPi / 2.0 - 2.0) / 2.0).epsilon(1e-12));
  CHECK(clt_sigma(PParam(2.0)) == doctest::Approx(0.8565).epsilon(1e-4));
  // Var(N1 - N2/p) with Var N1 = trigamma(1/p)/p^2, Var N2 = p, Cov = 1
  const double p = 2.0;
  const double var = specfun::trigamma(0.5) / (p * p) + p / (p * p) - 2.0 / p;
  CHECK(var == doctest::Approx(specfun::trigamma(0.5) / 4.0 - 0.5).epsilon(1e-14));
  CHECK(clt_sigma(PParam(2.0)) * clt_sigma(PParam(2.0)) == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("cumulant closed form") {
  for (double p : {0.5, 1.0, 2.0, 7.0}) CHECK(cumulant({0.0, 0.0}, PParam(p)) == 0.0);
  const PParam p2(2.0);
  CHECK(cumulant({-1.5, 0.0}, p2) == kInf);
  CHECK(cumulant({0.0, 0.5}, p2) == kInf);
  CHECK(cumulant({-1.0, 0.0}, p2) == kInf);
  CHECK(cumulant({0.0, 0.5000001}, p2) == kInf);
  // d/ds at the origin is E log|Z| = m_p
  for (double p : {1.0, 2.0, 4.0}) {
    const PParam pp(p);
    const double h = 1e-5;
    const double fd = (cumulant({h, 0.0}, pp) - cumulant({-h, 0.0}, pp)) / (2.0 * h);
    CHECK(std::abs(fd - m_p(pp)) < 1e-8);
  }
  // d/dt at the origin is E|Z|^p = 1
  const double h = 1e-5;
  CHECK(std::abs((cumulant({0.0, h}, p2) - cumulant({0.0, -h}, p2)) / (2.0 * h) - 1.0) < 1e-8);
}

TEST_CASE("cumulant quadrature oracle") {
  const PParam p1(1.0), p2(2.0);
  CHECK(std::abs(cumulant_oracle({0.0, 0.0}, p2)) < 1e-8);
  // mpmath, 40 digits: -0.22579135264472743236 and -1.1605030084751631865
  CHECK(std::abs(cumulant_oracle({1.0, 0.0}, p2) - (-0.22579135264472743)) < 1e-9);
  CHECK(std::abs(cumulant_oracle({0.5, -1.0}, p1) - (-1.1605030084751632)) < 1e-9);
  CHECK(std::abs(cumulant_oracle({1.0, 0.0}, p2) - cumulant({1.0, 0.0}, p2)) < 1e-6);
  CHECK(std::abs(cumulant_oracle({0.5, -1.0}, p1) - cumulant({0.5, -1.0}, p1)) < 1e-6);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> us(-0.8, 6.0), ut(-4.0, 0.9);
  for (double p : {1.0, 2.0, 3.5}) {
    const PParam pp(p);
    for (int i = 0; i < 20; ++i) {
      const TiltParams tilt{us(gen), ut(gen) / p};
      INFO("p = " << p << " s = " << tilt.s << " t = " << tilt.t);
      CHECK(std::abs(cumulant_oracle(tilt, pp) - cumulant(tilt, pp)) < 1e-6);
    }
  }
  CHECK_THROWS_AS(cumulant_oracle({-1.5, 0.0}, p2), DomainError);
}

TEST_CASE("analytic gradient matches finite differences") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> us(-0.7, 5.0), ut(-3.0, 0.8);
  for (double p : {1.0, 2.0, 5.0}) {
    const PParam pp(p);
    for (int i = 0; i < 50; ++i) {
      const TiltParams tilt{us(gen), ut(gen) / p};
      const double h = 1e-5;
      const double fs = (cumulant({tilt.s + h, tilt.t}, pp) - cumulant({tilt.s - h, tilt.t}, pp)) / (2 * h);
      const double ft = (cumulant({tilt.s, tilt.t + h}, pp) - cumulant({tilt.s, tilt.t - h}, pp)) / (2 * h);
      const auto g = cumulant_gradient(tilt, pp);
      INFO("p = " << p << " s = " << tilt.s << " t = " << tilt.t);
      CHECK(std::abs(g.d_s - fs) < 1e-6 * std::max(1.0, std::abs(fs)));
      CHECK(std::abs(g.d_t - ft) < 1e-6 * std::max(1.0, std::abs(ft)));
    }
  }
}

TEST_CASE("stationary_point") {
  for (double p : {1.0, 2.0, 3.0}) {
    const PParam pp(p);
    const TiltParams st = stationary_point({m_p(pp), 1.0}, pp);
    CHECK(std::abs(st.s) < 1e-12);
    CHECK(std::abs(st.t) < 1e-12);
  }
  const PParam p2(2.0);
  const double theta = 0.4;
  const double g = 0.36451641056585978;  // mpmath G_2(0.4)
  const MeanPoint target{std::log(theta), 1.0};
  const TiltParams st = stationary_point(target, p2);
  CHECK(st.s == doctest::Approx(2.0 * g - 1.0).epsilon(1e-12));
  CHECK(st.t == doctest::Approx(0.5 - g).epsilon(1e-12));
  CHECK(std::abs(alpha_residual(st, target, 2.0)) <= 1e-9);
  CHECK(std::abs(beta_residual(st, target, 2.0)) <= 1e-9);
  CHECK_THROWS_AS(stationary_point({0.0, 0.5}, PParam(1.0)), NoStationaryPointError);
  CHECK_THROWS_AS(stationary_point({0.0, 1.0}, PParam(1.0)), NoStationaryPointError);
  CHECK_THROWS_AS(stationary_point({0.0, -1.0}, PParam(1.0)), NoStationaryPointError);
}

TEST_CASE("stationarity residuals over random feasible targets") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> up(1.0, 8.0), ualpha(-4.0, 1.0), ugap(1e-3, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double p = up(gen);
    const double alpha = ualpha(gen);
    const double beta = std::exp(p * alpha + ugap(gen));
    const MeanPoint target{alpha, beta};
    const TiltParams st = stationary_point(target, PParam(p));
    INFO("p = " << p << " alpha = " << alpha << " beta = " << beta);
    CHECK(st.in_domain(PParam(p)));
    CHECK(std::abs(alpha_residual(st, target, p)) <= 1e-9);
    CHECK(std::abs(beta_residual(st, target, p)) <= 1e-9 * std::max(1.0, beta));
  }
}

TEST_CASE("legendre_star and the grid oracle") {
  for (double p : {1.0, 2.0}) {
    const PParam pp(p);
    CHECK(std::abs(legendre_star({m_p(pp), 1.0}, pp)) < 1e-12);
  }
  const PParam p1(1.0), p2(2.0);
  CHECK(std::abs(legendre_star_oracle({m_p(p2), 1.0}, p2)) < 1e-4);
  CHECK(std::abs(legendre_star({std::log(0.4), 1.0}, p2) - legendre_star_oracle({std::log(0.4), 1.0}, p2)) < 1e-4);
  // mpmath J_2(0.3) = 0.14419009557863639671
  const double oracle_03 = legendre_star_oracle({std::log(0.3), 1.0}, p2);
  CHECK(std::abs(oracle_03 - 0.14419009557863640) < 1e-4);
  CHECK(std::abs(legendre_star({std::log(0.3), 1.0}, p2) - oracle_03) < 1e-4);
  CHECK(std::abs(legendre_star_oracle({std::log(0.561), 1.0}, p1)) < 1e-3);
  CHECK(legendre_star({0.0, 0.9}, p1) == kInf);
  CHECK(legendre_star({0.0, 1.0}, p1) == kInf);
  CHECK(legendre_star({0.0, 0.0}, p1) == kInf);
  CHECK(legendre_star({0.0, -3.0}, p1) == kInf);
  CHECK_THROWS_AS(legendre_star_oracle({0.0, 0.9}, p1), DomainError);
}

TEST_CASE("legendre_star is off-mean positive and convex-dual consistent") {
  // Off the ray beta = 1 the closed form still agrees with the oracle.
  const PParam p2(2.0);
  for (const MeanPoint target : {MeanPoint{-0.3, 2.0}, MeanPoint{-1.0, 0.5}, MeanPoint{-0.9, 1.7}}) {
    const double closed = legendre_star(target, p2);
    INFO("alpha = " << target.alpha << " beta = " << target.beta);
    CHECK(closed > 0.0);
    CHECK(std::abs(closed - legendre_star_oracle(target, p2)) < 1e-4);
  }
}

TEST_CASE("g_p") {
  for (double p : {1.0, 2.0, 10.0}) {
    const PParam pp(p);
    CHECK(g_p(std::exp(m_p(pp)), pp) == doctest::Approx(1.0 / p).epsilon(1e-12));
  }
  const PParam p2(2.0);
  CHECK(g_p(0.999999, p2) > 1e3);
  CHECK(g_p(1e-9, p2) < 0.1);
  double previous = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double g = g_p(i / 1000.0, p2);
    CHECK(g > previous);
    previous = g;
  }
  for (double bad : {0.0, 1.0, -0.1, 1.5}) CHECK_THROWS_AS(g_p(bad, p2), DomainError);
}

TEST_CASE("rate_j values") {
  for (double p : {1.0, 1.5, 2.0, 4.0, 10.0}) {
    const PParam pp(p);
    INFO("p = " << p);
    CHECK(std::abs(rate_j(std::exp(m_p(pp)), pp)) <= 1e-10);
  }
  const PParam p2(2.0);
  CHECK(rate_j(1.5, p2) == kInf);
  CHECK(rate_j(-0.2, p2) == kInf);
  CHECK(rate_j(0.0, p2) == kInf);
  CHECK(rate_j(1.0, p2) == kInf);
  CHECK(std::abs(rate_j(0.3, p2) - legendre_star_oracle({std::log(0.3), 1.0}, p2)) <= 1e-4);
  // mpmath reference values
  CHECK(rate_j(0.7, p2) == doctest::Approx(0.074756306907852).epsilon(1e-10));
  CHECK(rate_j(0.4, PParam(1.0)) == doctest::Approx(0.0653071849760023).epsilon(1e-10));
}

TEST_CASE("rate_j matches the oracle on a theta grid") {
  for (double p : {1.0, 2.0}) {
    const PParam pp(p);
    for (int k = 2; k <= 9; ++k) {
      const double theta = k / 10.0;
      INFO("p = " << p << " theta = " << theta);
      CHECK(std::abs(rate_j(theta, pp) - legendre_star_oracle({std::log(theta), 1.0}, pp)) <= 1e-4);
    }
  }
}

TEST_CASE("rate_j is the infimum over the constraint set") {
  // J_p(theta) = inf over beta of Lambda*(log theta + log(beta)/p, beta).
  const PParam p2(2.0);
  for (double theta : {0.3, 0.6, 0.8}) {
    const double j = rate_j(theta, p2);
    for (double beta : {0.25, 0.5, 0.9, 1.1, 2.0, 4.0}) {
      const double value = legendre_star({std::log(theta) + std::log(beta) / 2.0, beta}, p2);
      CHECK(value > j);
    }
  }
}

TEST_CASE("rate_j is non-negative and diverges at both endpoints") {
  for (double p : {1.0, 2.0, 10.0}) {
    const PParam pp(p);
    for (int i = 1; i < 1000; ++i) CHECK(rate_j(i / 1000.0, pp) >= -1e-12);
    double upper_prev = 0.0;
    double lower_prev = 0.0;
    for (int k = 2; k <= 8; ++k) {
      const double upper = rate_j(1.0 - std::pow(10.0, -k), pp);
      const double lower = rate_j(std::pow(10.0, -k), pp);
      INFO("p = " << p << " k = " << k);
      CHECK(upper > upper_prev);
      CHECK(lower > lower_prev);
      upper_prev = upper;
      lower_prev = lower;
    }
    CHECK(lower_prev > 10.0);
    // Near 1 the growth is logarithmic: J(1 - eps) ~ (1/2) log(1/eps) + const,
    // so each extra decade adds (1/2) log 10.
    const double step = rate_j(1.0 - 1e-8, pp) - rate_j(1.0 - 1e-7, pp);
    CHECK(step == doctest::Approx(0.5 * std::log(10.0)).epsilon(1e-3));
  }
}

TEST_CASE("rate_curve") {
  const PParam p2(2.0);
  const auto curve = rate_curve(p2, 0.05, 0.95, 19);
  REQUIRE(curve.size() == 19);
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].j_value >= 0.0);
    CHECK(curve[i].s_star == doctest::Approx(2.0 * curve[i].g_value - 1.0));
    CHECK(curve[i].t_star == doctest::Approx(0.5 - curve[i].g_value));
    if (curve[i].j_value < curve[argmin].j_value) argmin = i;
  }
  const double center = std::exp(m_p(p2));
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (std::abs(curve[i].theta - center) < std::abs(curve[nearest].theta - center)) nearest = i;
  }
  CHECK(argmin == nearest);

  const auto c1 = rate_curve(PParam(1.0), 0.3, 0.8, 6);
  REQUIRE(c1.size() == 6);
  // 0.3 0.4 0.5 | 0.6 0.7 0.8 around the zero at 0.5615
  CHECK(c1[0].j_value > c1[1].j_value);
  CHECK(c1[1].j_value > c1[2].j_value);
  CHECK(c1[2].j_value > c1[3].j_value);
  CHECK(c1[3].j_value < c1[4].j_value);
  CHECK(c1[4].j_value < c1[5].j_value);

  const auto two = rate_curve(p2, 0.2, 0.7, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].theta == 0.2);
  CHECK(two[1].theta == 0.7);

  CHECK_THROWS_AS(rate_curve(p2, 0.5, 0.4, 10), DomainError);
  CHECK_THROWS_AS(rate_curve(p2, 0.1, 1.2, 10), DomainError);
  CHECK_THROWS_AS(rate_curve(p2, 0.1, 0.9, 1), DomainError);
}

TEST_CASE("rate curve is unimodal on a 200-point grid") {
  for (double p : {1.0, 2.0, 10.0}) {
    const auto curve = rate_curve(PParam(p), 0.05, 0.95, 200);
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve[i].j_value < curve[argmin].j_value) argmin = i;
    }
    INFO("p = " << p);
    for (std::size_t i = 1; i <= argmin; ++i) CHECK(curve[i].j_value < curve[i - 1].j_value);
    for (std::size_t i = argmin + 1; i < curve.size(); ++i) CHECK(curve[i].j_value > curve[i - 1].j_value);
  }
}
