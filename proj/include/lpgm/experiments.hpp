#pragma once

// Seeded Monte Carlo experiments for the ratio R_n of geometric to
// p-generalized mean: CLT at scale n^{-1/2}, large-deviation tails (naive
// and exponentially tilted estimators) and cone-vs-surface comparisons.
//
// Replication r always draws from RngState(seed, r), and results are
// reduced in replication order, so every output is a deterministic function
// of the configuration regardless of the worker count.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpgm/ratefn.hpp"
#include "lpgm/stats.hpp"

namespace lpgm {

enum class Measure { Ball, Cone, Surface };
enum class TailSide { Upper, Lower };
enum class Estimator { Naive, Tilted };

std::string to_string(Measure m);
std::string to_string(TailSide s);
std::string to_string(Estimator e);
Measure parse_measure(const std::string& text);
TailSide parse_side(const std::string& text);
Estimator parse_estimator(const std::string& text);

struct RatioStat {
  double log_gm = 0.0;  ///< (1/n) sum log|x_i|
  double log_pm = 0.0;  ///< (1/p) log((1/n) sum |x_i|^p)
  double ratio = 0.0;   ///< exp(log_gm - log_pm), in [0, 1]
};

/// Ratio statistic in the log domain. A zero coordinate gives
/// log_gm = -inf and ratio 0. Throws DomainError for empty or all-zero input.
RatioStat gm_ratio(std::span<const double> coords, const PParam& p);

struct CltConfig {
  double p = 2.0;
  int n = 4000;
  std::int64_t reps = 2000;
  Measure measure = Measure::Cone;
  std::vector<double> a_grid = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
  std::uint64_t seed = 12345;
  unsigned threads = 0;
};

struct CltRow {
  double a = 0.0;
  double empirical_prob = 0.0;
  double limit_prob = 0.0;
  double abs_diff = 0.0;
  double std_error = 0.0;
};

struct CltResult {
  double p = 0.0;
  int n = 0;
  std::int64_t reps = 0;
  Measure measure = Measure::Cone;
  bool reduced_form = false;
  double sigma = 0.0;        ///< clt_sigma(p)
  double ks_distance = 0.0;  ///< normalized statistic vs N(0, sigma^2)
  double half_prob = 0.0;    ///< P(R_n <= e^{m_p}) (reduced form: P(GM <= e^{m_p} n^{-1/p}))
  stats::Summary normalized;
  std::vector<CltRow> rows;
};

/// Minimum replication count for surface-measure (self-normalized) runs.
inline constexpr std::int64_t kSurfaceMinReps = 10000;

/// Empirical P(R_n >= e^{m_p}(1 + a/sqrt(n))) per a against
/// 1 - Phi(a / clt_sigma(p)). Requires n >= 100, reps >= 100; surface
/// requires p >= 1 and reps >= kSurfaceMinReps.
CltResult clt_experiment(const CltConfig& config);

/// Ball-uniform only: P(GM >= e^{m_p}(1 + a/sqrt(n)) n^{-1/p}) with the same
/// limit. Accepts n >= 1.
CltResult reduced_form_experiment(const CltConfig& config);

/// R_n per replication, plus surface weights (all 1 unless measure is
/// Surface).
struct RatioSamples {
  std::vector<double> ratios;
  std::vector<double> weights;
};
RatioSamples sample_ratios(Measure measure, const PParam& p, int n, std::int64_t reps,
                           std::uint64_t seed, unsigned threads = 0);

struct LdpConfig {
  double p = 2.0;
  double theta = 0.7;
  int n = 200;
  std::int64_t reps = 100000;
  TailSide side = TailSide::Upper;
  std::uint64_t seed = 12345;
  unsigned threads = 0;
};

struct LdpResult {
  double p = 0.0;
  int n = 0;
  double theta = 0.0;
  TailSide side = TailSide::Upper;
  Estimator estimator = Estimator::Naive;
  std::int64_t reps = 0;
  std::int64_t hits = 0;
  TiltParams tilt;
  double prob = 0.0;
  double log_prob_per_n = 0.0;  ///< (1/n) log P-hat; -inf when hits == 0
  double std_error = 0.0;       ///< standard error of log_prob_per_n
  double rel_std_error = 0.0;   ///< standard error of P-hat over P-hat
  double j_reference = 0.0;     ///< rate_j(theta, p)
  bool zero_count = false;
  bool feasibility_warning = false;
};

/// The side on which theta is a rare event: Upper when theta >= e^{m_p}.
TailSide natural_side(double theta, const PParam& p);

/// Plain frequency of {R_n >= theta} (upper) or {R_n <= theta} (lower).
/// Sets feasibility_warning when reps * exp(-n J) < 50 on the rare side.
LdpResult ldp_naive(const LdpConfig& config);

/// Importance-sampled estimate with the analytic optimal tilt
/// (s*, t*) = (p G_p(theta) - 1, 1/p - G_p(theta)). theta must lie in
/// (0, 1) on the rare side of e^{m_p}.
LdpResult ldp_tilted(const LdpConfig& config);

/// Importance-sampled estimate at an explicit tilt.
LdpResult ldp_tilted_at(const LdpConfig& config, const TiltParams& tilt);

/// Event evaluated on a sphere point for the surface-vs-cone comparison.
struct EventSpec {
  enum class Kind {
    RatioAtLeast,     ///< R_n >= threshold
    FirstCoordAtMost  ///< n^{1/p} |x_1| <= threshold
  };
  Kind kind = Kind::RatioAtLeast;
  double threshold = 0.5;

  /// "ratio-ge:<x>" or "coord-le:<x>".
  static EventSpec parse(const std::string& text);
  std::string to_string() const;
  bool contains(std::span<const double> coords, const PParam& p) const;
};

struct SurfaceConeRow {
  int n = 0;
  double cone_prob = 0.0;
  double surface_prob = 0.0;
  double diff = 0.0;       ///< surface_prob - cone_prob
  double std_error = 0.0;  ///< of diff (delta method, common samples)
};

/// Compares P(event) under the cone measure (plain frequency) with the
/// surface measure (self-normalized weights on the same cone samples).
std::vector<SurfaceConeRow> surface_vs_cone(double p, const std::vector<int>& n_list,
                                            std::int64_t reps, const EventSpec& event,
                                            std::uint64_t seed, unsigned threads = 0);

}  // namespace lpgm
