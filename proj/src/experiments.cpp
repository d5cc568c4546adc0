#include "lpgm/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lpgm/errors.hpp"
#include "lpgm/parallel.hpp"
#include "lpgm/rng.hpp"
#include "lpgm/sampler.hpp"

namespace lpgm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double>& scratch(std::size_t n) {
  thread_local std::vector<double> buffer;
  buffer.resize(n);
  return buffer;
}
}  // namespace

std::string to_string(Measure m) {
  switch (m) {
    case Measure::Ball: return "ball";
    case Measure::Cone: return "cone";
    case Measure::Surface: return "surface";
  }
  return "?";
}

std::string to_string(TailSide s) { return s == TailSide::Upper ? "upper" : "lower"; }
std::string to_string(Estimator e) { return e == Estimator::Naive ? "naive" : "tilted"; }

Measure parse_measure(const std::string& text) {
  if (text == "ball") return Measure::Ball;
  if (text == "cone") return Measure::Cone;
  if (text == "surface") return Measure::Surface;
  throw DomainError("unknown measure '" + text + "' (expected ball, cone or surface)");
}

TailSide parse_side(const std::string& text) {
  if (text == "upper") return TailSide::Upper;
  if (text == "lower") return TailSide::Lower;
  throw DomainError("unknown side '" + text + "' (expected upper or lower)");
}

Estimator parse_estimator(const std::string& text) {
  if (text == "naive") return Estimator::Naive;
  if (text == "tilted") return Estimator::Tilted;
  throw DomainError("unknown estimator '" + text + "' (expected naive or tilted)");
}

RatioStat gm_ratio(std::span<const double> coords, const PParam& p) {
  if (coords.empty()) throw DomainError("gm_ratio: empty vector");
  double largest = 0.0;
  for (double v : coords) largest = std::max(largest, std::abs(v));
  if (largest == 0.0) throw DomainError("gm_ratio: all coordinates are zero");
  const double n = static_cast<double>(coords.size());
  const double pv = p.value();
  // Logs are taken relative to the largest entry, so the ratio does not
  // suffer cancellation between two large log-means.
  double log_sum = 0.0;
  double pow_sum = 0.0;
  for (double v : coords) {
    const double a = std::abs(v) / largest;
    log_sum += a == 0.0 ? -kInf : std::log(a);
    pow_sum += std::pow(a, pv);
  }
  const double log_largest = std::log(largest);
  const double rel_gm = log_sum / n;
  const double rel_pm = std::log(pow_sum / n) / pv;
  RatioStat stat;
  stat.log_gm = log_largest + rel_gm;
  stat.log_pm = log_largest + rel_pm;
  stat.ratio = std::isinf(rel_gm) ? 0.0 : std::exp(rel_gm - rel_pm);
  return stat;
}

// ---------------------------------------------------------------------------
// CLT

namespace {

struct Draw {
  double value = 0.0;
  double weight = 1.0;
};

void validate_clt(const CltConfig& c, const PParam& p, bool reduced) {
  if (reduced) {
    if (c.measure != Measure::Ball) {
      throw UnsupportedError("reduced form experiment is defined for the ball-uniform measure only");
    }
    if (c.n < 1) throw DomainError("reduced form experiment: n must be >= 1");
  } else if (c.n < 100) {
    throw DomainError("clt_experiment: n must be >= 100");
  }
  if (c.reps < 100) throw DomainError("clt_experiment: reps must be >= 100");
  if (c.measure == Measure::Surface) {
    p.require_surface_support();
    if (c.reps < kSurfaceMinReps) {
      throw DomainError("clt_experiment: surface measure needs reps >= " + std::to_string(kSurfaceMinReps));
    }
  }
  if (c.a_grid.empty()) throw DomainError("clt_experiment: empty a grid");
}

// Weighted tail frequency with its (self-normalized) standard error.
std::pair<double, double> weighted_tail(const std::vector<Draw>& draws, double a) {
  double total = 0.0;
  double hit = 0.0;
  for (const Draw& d : draws) {
    total += d.weight;
    if (d.value >= a) hit += d.weight;
  }
  const double prob = hit / total;
  double var = 0.0;
  for (const Draw& d : draws) {
    const double r = d.weight * ((d.value >= a ? 1.0 : 0.0) - prob);
    var += r * r;
  }
  return {prob, std::sqrt(var) / total};
}

CltResult run_clt(const CltConfig& c, bool reduced) {
  const PParam p(c.p);
  validate_clt(c, p, reduced);
  const double m = ratefn::m_p(p);
  const double sigma = ratefn::clt_sigma(p);
  const double root_n = std::sqrt(static_cast<double>(c.n));
  const double log_n_over_p = std::log(static_cast<double>(c.n)) / p.value();
  const bool weighted = c.measure == Measure::Surface;

  // Each replication yields the normalized statistic T with
  // {T >= a} == {R_n >= e^{m_p}(1 + a/sqrt(n))} (or the reduced-form event).
  const auto draws = parallel_map(c.reps, c.threads, [&](std::int64_t r) {
    RngState rng(c.seed, static_cast<std::uint64_t>(r));
    auto& x = scratch(static_cast<std::size_t>(c.n));
    Draw d;
    if (c.measure == Measure::Ball) {
      sampler::sample_ball_into(x, p, rng);
    } else {
      sampler::sample_cone_into(x, p, rng);
      if (weighted) d.weight = sampler::surface_weight(x, p);
    }
    const RatioStat stat = gm_ratio(x, p);
    const double log_stat = reduced ? stat.log_gm + log_n_over_p : stat.log_gm - stat.log_pm;
    d.value = root_n * std::expm1(log_stat - m);
    return d;
  });

  CltResult result;
  result.p = c.p;
  result.n = c.n;
  result.reps = c.reps;
  result.measure = c.measure;
  result.reduced_form = reduced;
  result.sigma = sigma;

  std::vector<double> values(draws.size());
  std::vector<double> weights(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    values[i] = draws[i].value;
    weights[i] = draws[i].weight;
  }
  const auto limit_cdf = [sigma](double x) { return stats::normal_cdf(x / sigma); };
  result.ks_distance = weighted ? stats::ks_distance_weighted(values, weights, limit_cdf)
                                : stats::ks_distance(values, limit_cdf);
  result.normalized = stats::summarize(values);

  double total = 0.0;
  double below = 0.0;
  for (const Draw& d : draws) {
    total += d.weight;
    if (d.value <= 0.0) below += d.weight;
  }
  result.half_prob = below / total;

  for (double a : c.a_grid) {
    const auto [prob, se] = weighted_tail(draws, a);
    const double limit = 1.0 - stats::normal_cdf(a / sigma);
    result.rows.push_back({a, prob, limit, std::abs(prob - limit), se});
  }
  return result;
}

}  // namespace

CltResult clt_experiment(const CltConfig& config) { return run_clt(config, false); }

CltResult reduced_form_experiment(const CltConfig& config) { return run_clt(config, true); }

RatioSamples sample_ratios(Measure measure, const PParam& p, int n, std::int64_t reps,
                           std::uint64_t seed, unsigned threads) {
  if (n < 1 || reps < 1) throw DomainError("sample_ratios: n and reps must be >= 1");
  if (measure == Measure::Surface) p.require_surface_support();
  const auto draws = parallel_map(reps, threads, [&](std::int64_t r) {
    RngState rng(seed, static_cast<std::uint64_t>(r));
    auto& x = scratch(static_cast<std::size_t>(n));
    Draw d;
    if (measure == Measure::Ball) {
      sampler::sample_ball_into(x, p, rng);
    } else {
      sampler::sample_cone_into(x, p, rng);
      if (measure == Measure::Surface) d.weight = sampler::surface_weight(x, p);
    }
    d.value = gm_ratio(x, p).ratio;
    return d;
  });
  RatioSamples out;
  out.ratios.reserve(draws.size());
  out.weights.reserve(draws.size());
  for (const Draw& d : draws) {
    out.ratios.push_back(d.value);
    out.weights.push_back(d.weight);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Large deviations

TailSide natural_side(double theta, const PParam& p) {
  return theta >= std::exp(ratefn::m_p(p)) ? TailSide::Upper : TailSide::Lower;
}

namespace {

void validate_ldp(const LdpConfig& c) {
  if (c.n < 1) throw DomainError("ldp: n must be >= 1");
  if (c.reps < 1) throw DomainError("ldp: reps must be >= 1");
  if (std::isnan(c.theta)) throw DomainError("ldp: theta is NaN");
}

bool in_event(double ratio, double theta, TailSide side) {
  return side == TailSide::Upper ? ratio >= theta : ratio <= theta;
}

LdpResult base_result(const LdpConfig& c, const PParam& p, Estimator estimator) {
  LdpResult r;
  r.p = c.p;
  r.n = c.n;
  r.theta = c.theta;
  r.side = c.side;
  r.estimator = estimator;
  r.reps = c.reps;
  r.j_reference = ratefn::rate_j(c.theta, p);
  return r;
}

}  // namespace

LdpResult ldp_naive(const LdpConfig& c) {
  const PParam p(c.p);
  validate_ldp(c);
  LdpResult result = base_result(c, p, Estimator::Naive);

  const auto hits = parallel_map(c.reps, c.threads, [&](std::int64_t r) -> char {
    RngState rng(c.seed, static_cast<std::uint64_t>(r));
    auto& x = scratch(static_cast<std::size_t>(c.n));
    for (double& v : x) v = sampler::sample_pgauss(p, rng);
    return in_event(gm_ratio(x, p).ratio, c.theta, c.side) ? 1 : 0;
  });
  result.hits = std::count(hits.begin(), hits.end(), char{1});
  const double reps = static_cast<double>(c.reps);
  result.prob = static_cast<double>(result.hits) / reps;

  const bool rare_side = natural_side(c.theta, p) == c.side;
  const double exponent = rare_side ? result.j_reference : 0.0;
  result.feasibility_warning = !(reps * std::exp(-c.n * exponent) >= 50.0);

  if (result.hits == 0) {
    result.zero_count = true;
    result.log_prob_per_n = -kInf;
    result.std_error = kInf;
    result.rel_std_error = kInf;
    return result;
  }
  result.log_prob_per_n = std::log(result.prob) / c.n;
  result.rel_std_error = std::sqrt((1.0 - result.prob) / static_cast<double>(result.hits));
  result.std_error = result.rel_std_error / c.n;
  return result;
}

LdpResult ldp_tilted_at(const LdpConfig& c, const TiltParams& tilt) {
  const PParam p(c.p);
  validate_ldp(c);
  if (!tilt.in_domain(p)) throw DomainError("ldp_tilted: tilt outside the cumulant domain");
  LdpResult result = base_result(c, p, Estimator::Tilted);
  result.tilt = tilt;
  const double log_cumulant = ratefn::cumulant(tilt, p);
  const double pv = p.value();
  const double n = static_cast<double>(c.n);

  struct Replicate {
    double log_weight = 0.0;
    bool hit = false;
  };
  const auto reps_out = parallel_map(c.reps, c.threads, [&](std::int64_t r) {
    RngState rng(c.seed, static_cast<std::uint64_t>(r));
    double log_sum = 0.0;
    double pow_sum = 0.0;
    double log_weight = 0.0;
    for (int i = 0; i < c.n; ++i) {
      const auto d = sampler::sample_tilted_log(tilt, p, log_cumulant, rng);
      log_sum += d.log_abs;
      pow_sum += d.abs_pow_p;
      log_weight += d.log_weight_increment;
    }
    const double ratio = std::exp(log_sum / n - std::log(pow_sum / n) / pv);
    return Replicate{log_weight, in_event(ratio, c.theta, c.side)};
  });

  double top = -kInf;
  for (const auto& rep : reps_out) {
    if (rep.hit) {
      ++result.hits;
      top = std::max(top, rep.log_weight);
    }
  }
  if (result.hits == 0) {
    result.zero_count = true;
    result.log_prob_per_n = -kInf;
    result.std_error = kInf;
    result.rel_std_error = kInf;
    return result;
  }
  double s1 = 0.0;
  double s2 = 0.0;
  for (const auto& rep : reps_out) {
    if (!rep.hit) continue;
    const double w = std::exp(rep.log_weight - top);
    s1 += w;
    s2 += w * w;
  }
  const double reps = static_cast<double>(c.reps);
  const double log_prob = top + std::log(s1) - std::log(reps);
  result.prob = std::exp(log_prob);
  result.log_prob_per_n = log_prob / n;
  result.rel_std_error = std::sqrt(std::max(0.0, reps * s2 / (s1 * s1) - 1.0) / reps);
  result.std_error = result.rel_std_error / n;
  return result;
}

LdpResult ldp_tilted(const LdpConfig& c) {
  const PParam p(c.p);
  if (!(c.theta > 0.0 && c.theta < 1.0)) {
    throw DomainError("ldp_tilted: theta must lie in (0, 1)");
  }
  const double center = std::exp(ratefn::m_p(p));
  if (c.theta != center && natural_side(c.theta, p) != c.side) {
    throw DomainError("ldp_tilted: theta = " + std::to_string(c.theta) + " is not a rare event on the " +
                      to_string(c.side) + " side of e^{m_p} = " + std::to_string(center));
  }
  const TiltParams tilt = ratefn::stationary_point(MeanPoint{std::log(c.theta), 1.0}, p);
  return ldp_tilted_at(c, tilt);
}

// ---------------------------------------------------------------------------
// Surface vs cone

EventSpec EventSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("event spec must look like kind:value, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw DomainError("event spec has a bad threshold: '" + text + "'");
  }
  if (kind == "ratio-ge") return {Kind::RatioAtLeast, value};
  if (kind == "coord-le") return {Kind::FirstCoordAtMost, value};
  throw DomainError("unknown event kind '" + kind + "' (expected ratio-ge or coord-le)");
}

std::string EventSpec::to_string() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", threshold);
  return (kind == Kind::RatioAtLeast ? "ratio-ge:" : "coord-le:") + std::string(buf);
}

bool EventSpec::contains(std::span<const double> coords, const PParam& p) const {
  if (kind == Kind::RatioAtLeast) return gm_ratio(coords, p).ratio >= threshold;
  const double scale = std::pow(static_cast<double>(coords.size()), 1.0 / p.value());
  return scale * std::abs(coords[0]) <= threshold;
}

std::vector<SurfaceConeRow> surface_vs_cone(double p_value, const std::vector<int>& n_list,
                                            std::int64_t reps, const EventSpec& event,
                                            std::uint64_t seed, unsigned threads) {
  const PParam p(p_value);
  p.require_surface_support();
  if (reps < kSurfaceMinReps) {
    throw DomainError("surface_vs_cone: reps must be >= " + std::to_string(kSurfaceMinReps));
  }
  if (n_list.empty()) throw DomainError("surface_vs_cone: empty n list");
  std::vector<SurfaceConeRow> rows;
  for (int n : n_list) {
    if (n < 1) throw DomainError("surface_vs_cone: n must be >= 1");
    const auto draws = parallel_map(reps, threads, [&](std::int64_t r) {
      RngState rng(seed, static_cast<std::uint64_t>(r));
      auto& x = scratch(static_cast<std::size_t>(n));
      sampler::sample_cone_into(x, p, rng);
      return Draw{event.contains(x, p) ? 1.0 : 0.0, sampler::surface_weight(x, p)};
    });
    const double count = static_cast<double>(reps);
    double w_total = 0.0;
    double w_hit = 0.0;
    double hit = 0.0;
    for (const Draw& d : draws) {
      w_total += d.weight;
      w_hit += d.weight * d.value;
      hit += d.value;
    }
    const double cone = hit / count;
    const double surface = w_hit / w_total;
    const double w_mean = w_total / count;
    // Influence of each replication on surface - cone.
    double var = 0.0;
    for (const Draw& d : draws) {
      const double psi = d.weight / w_mean * (d.value - surface) - (d.value - cone);
      var += psi * psi;
    }
    rows.push_back({n, cone, surface, surface - cone, std::sqrt(var / count) / std::sqrt(count)});
  }
  return rows;
}

}  // namespace lpgm
