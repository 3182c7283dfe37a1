#include "microfatigue/fatigue_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "microfatigue/errors.hpp"

namespace microfatigue {

const char* to_string(BasisEvent e) {
  return e == BasisEvent::failure ? "failure" : "non-failure";
}

StairCaseEstimate dixon_mood(std::span<const LevelOutcome> trials, double step) {
  if (!(step > 0.0)) throw DomainError("dixon_mood: step must be > 0");
  std::vector<double> failures;
  std::vector<double> survivals;
  for (const auto& t : trials) (t.outcome == 1 ? failures : survivals).push_back(t.level);
  if (failures.empty()) throw EstimationError("stair-case estimate impossible: no failures");
  if (survivals.empty()) throw EstimationError("stair-case estimate impossible: no non-failures");

  StairCaseEstimate est;
  est.basis_event = survivals.size() < failures.size() ? BasisEvent::non_failure
                                                       : BasisEvent::failure;
  const auto& basis = est.basis_event == BasisEvent::failure ? failures : survivals;
  const double lowest = *std::min_element(basis.begin(), basis.end());

  double n = 0.0;
  double a = 0.0;
  double b = 0.0;
  for (double level : basis) {
    const double i = std::round((level - lowest) / step);
    n += 1.0;
    a += i;
    b += i * i;
  }
  const double half = est.basis_event == BasisEvent::non_failure ? 0.5 : -0.5;
  est.mean = lowest + step * (a / n + half);

  const double spread = (n * b - a * a) / (n * n);
  est.dispersion_formula_valid = spread >= 0.3;
  est.std_dev = est.dispersion_formula_valid ? 1.62 * step * (spread + 0.029) : 0.53 * step;
  const double width = kQuantile90 * est.std_dev;
  // round the half-width so both quantiles are exact and sum to 2*mean
  if (width <= std::abs(est.mean)) {
    if (est.mean >= 0.0) {
      est.quantile_90 = est.mean + width;
      const double h = est.quantile_90 - est.mean;
      est.quantile_10 = est.mean - h;
    } else {
      est.quantile_10 = est.mean - width;
      const double h = est.mean - est.quantile_10;
      est.quantile_90 = est.mean + h;
    }
  } else {
    est.quantile_10 = est.mean - width;
    est.quantile_90 = est.mean + width;
  }
  return est;
}

StairCaseEstimate dixon_mood(const StairCaseSequence& seq) {
  std::vector<LevelOutcome> trials;
  trials.reserve(seq.trials.size());
  for (const auto& t : seq.trials) trials.push_back(LevelOutcome{t.level, t.outcome});
  return dixon_mood(trials, seq.step);
}

std::string dixon_mood_convention() {
  return "Dixon-Mood on the less frequent event (ties: failures); "
         "mean = X0 + d*(A/N + 1/2) for non-failures, X0 + d*(A/N - 1/2) for failures; "
         "s = 1.62*d*((N*B - A^2)/N^2 + 0.029) if ratio >= 0.3 else 0.53*d; "
         "q10/q90 = mean -/+ 1.2816*s";
}

BasquinFit fit_basquin(std::span<const WohlerPoint> points) {
  std::vector<std::pair<double, double>> xy;  // (log N, log level)
  for (const auto& p : points) {
    if (p.censored) continue;
    if (!(p.level > 0.0) || p.cycles < 1) throw DomainError("fit_basquin: need level > 0, N >= 1");
    xy.emplace_back(std::log(static_cast<double>(p.cycles)), std::log(p.level));
  }
  if (xy.size() < 2) throw EstimationError("fit_basquin: need at least two uncensored points");
  // Fixed summation order regardless of input order.
  std::sort(xy.begin(), xy.end());
  if (std::all_of(xy.begin(), xy.end(), [&](const auto& p) { return p.second == xy.front().second; })) {
    throw EstimationError("fit_basquin: all points at a single level");
  }
  if (xy.front().first == xy.back().first) {
    throw EstimationError("fit_basquin: all points at a single life");
  }

  const double n = static_cast<double>(xy.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  BasquinFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.coefficient = std::exp(intercept);
  double ss = 0.0;
  for (const auto& [x, y] : xy) {
    const double r = y - (intercept + fit.exponent * x);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points_used = xy.size();
  return fit;
}

std::vector<WohlerPoint> wohler_points(const StairCaseSequence& seq) {
  std::vector<WohlerPoint> out;
  out.reserve(seq.trials.size());
  for (std::size_t i = 0; i < seq.trials.size(); ++i) {
    const auto& t = seq.trials[i];
    // Displacement-imposed runs are not comparable with stress-imposed ones.
    if (t.run_outcome == RunOutcome::invalid_displacement_imposed) continue;
    const bool censored = t.run_outcome == RunOutcome::survived;
    std::uint64_t cycles = t.cycles;
    if (censored && i < seq.runs.size()) cycles = seq.runs[i].reference_cycles;
    out.push_back(WohlerPoint{t.level, std::max<std::uint64_t>(cycles, 1), censored});
  }
  return out;
}

namespace {

// NaN when the replication has only one event type.
double recovery_replication(double true_mean, double true_std, std::size_t n_specimens,
                            std::uint64_t seed, std::uint64_t replication,
                            const RecoveryDesign& design) {
  const auto [lo, hi] = std::minmax_element(design.levels.begin(), design.levels.end());
  std::vector<LevelOutcome> trials;
  trials.reserve(n_specimens);
  double level = design.start_level;
  for (std::size_t i = 0; i < n_specimens; ++i) {
    const double strength = true_mean + true_std * seeded_standard_normal(seed, replication, i);
    const int outcome = level >= strength ? 1 : 0;
    trials.push_back(LevelOutcome{level, outcome});
    level = std::clamp(outcome == 1 ? level - design.step : level + design.step, *lo, *hi);
  }
  try {
    return dixon_mood(trials, design.step).mean;
  } catch (const EstimationError&) {
    return std::nan("");
  }
}

}  // namespace

RecoverySummary estimator_recovery_trial(double true_mean, double true_std,
                                         std::size_t n_specimens, std::size_t replications,
                                         std::uint64_t seed, const RecoveryDesign& design,
                                         unsigned threads) {
  if (replications < 1) throw DomainError("recovery trial needs at least one replication");
  if (n_specimens < 1) throw DomainError("recovery trial needs at least one specimen");
  if (design.levels.empty() || !(design.step > 0.0)) {
    throw DomainError("recovery trial needs levels and a positive step");
  }
  if (!(true_std >= 0.0)) throw DomainError("recovery trial std must be >= 0");

  std::vector<double> raw(replications);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      raw[r] = recovery_replication(true_mean, true_std, n_specimens, seed, r, design);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, replications);
  if (workers == 1) {
    work(0, replications);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (replications + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(replications, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  RecoverySummary s;
  s.replications = replications;
  for (double e : raw) {
    if (!std::isnan(e)) s.estimates.push_back(e);
  }
  s.estimated = s.estimates.size();
  if (s.estimates.empty()) return s;
  const double n = static_cast<double>(s.estimates.size());
  const double mean = std::accumulate(s.estimates.begin(), s.estimates.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : s.estimates) ss += (e - mean) * (e - mean);
  s.mean_bias = mean - true_mean;
  s.bias_std = s.estimates.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const auto [mn, mx] = std::minmax_element(s.estimates.begin(), s.estimates.end());
  s.min_estimate = *mn;
  s.max_estimate = *mx;
  return s;
}

}  // namespace microfatigue
