#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "microfatigue/protocols.hpp"

namespace microfatigue {

enum class BasisEvent { failure, non_failure };

const char* to_string(BasisEvent e);

struct StairCaseEstimate {
  double mean = 0.0;  // V
  double std_dev = 0.0;
  double quantile_10 = 0.0;
  double quantile_90 = 0.0;
  BasisEvent basis_event = BasisEvent::failure;
  bool dispersion_formula_valid = false;
};

/// Standard normal 90th percentile, to four decimals.
inline constexpr double kQuantile90 = 1.2816;

struct LevelOutcome {
  double level = 0.0;
  int outcome = 0;  // 1 failure, 0 non-failure
};

/// Dixon-Mood up-and-down estimate over the less frequent event (ties go to
/// failures). Mean is X0 + d (A/N +- 1/2), + for non-failures. Dispersion
/// 1.62 d ((N B - A^2)/N^2 + 0.029) when that ratio is >= 0.3, else 0.53 d.
/// Throws EstimationError when one of the two events never occurs.
StairCaseEstimate dixon_mood(std::span<const LevelOutcome> trials, double step);
StairCaseEstimate dixon_mood(const StairCaseSequence& seq);

/// Human-readable statement of the estimator conventions, for output headers.
std::string dixon_mood_convention();

struct WohlerPoint {
  double level = 0.0;        // V (or any load measure)
  std::uint64_t cycles = 0;  // at failure, or reference for run-outs
  bool censored = false;

  bool operator==(const WohlerPoint&) const = default;
};

/// level = coefficient * N^exponent; residual is RMS of log(level) misfit.
struct BasquinFit {
  double coefficient = 0.0;
  double exponent = 0.0;
  double residual = 0.0;
  std::size_t points_used = 0;
};

/// Least squares in (log N, log level). Censored points are ignored.
/// Throws EstimationError with fewer than two uncensored points or one level.
BasquinFit fit_basquin(std::span<const WohlerPoint> points);

/// Failures become uncensored points; survivals become run-outs at the
/// reference count. Displacement-imposed runs are dropped.
std::vector<WohlerPoint> wohler_points(const StairCaseSequence& seq);

struct RecoveryDesign {
  std::vector<double> levels{12.0, 13.0, 14.0, 15.0};
  double step = 1.0;
  double start_level = 15.0;
};

struct RecoverySummary {
  std::size_t replications = 0;
  std::size_t estimated = 0;  // replications with both events present
  double mean_bias = 0.0;     // mean(mu_hat) - true_mean
  double bias_std = 0.0;
  double min_estimate = 0.0;
  double max_estimate = 0.0;
  std::vector<double> estimates;
};

/// Seeded synthetic stair-cases against threshold specimens (a specimen fails
/// iff level >= its strength). Replication r, specimen i draws from stream
/// (seed, r, i), so results do not depend on `threads`.
RecoverySummary estimator_recovery_trial(double true_mean, double true_std,
                                         std::size_t n_specimens, std::size_t replications,
                                         std::uint64_t seed, const RecoveryDesign& design = {},
                                         unsigned threads = 1);

}  // namespace microfatigue
