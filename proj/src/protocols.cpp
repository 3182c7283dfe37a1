#include "microfatigue/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "microfatigue/errors.hpp"
#include "microfatigue/loading.hpp"

namespace microfatigue {

namespace {

std::uint32_t low(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t high(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

bool drop_detected(double previous, double current, double pristine, const DetectionRule& rule) {
  if (current < rule.collapse_fraction * pristine) return true;
  return previous > 0.0 && (previous - current) / previous >= rule.drop_fraction;
}

std::string format_level(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << v;
  return os.str();
}

}  // namespace

double run_pull_in_detection(const DamageState& state, const Device& device,
                             const DamageModelParams& params, double step) {
  if (!(step > 0.0)) throw DomainError("pull-in detection step must be > 0");
  const double v = degraded_pull_in(state, device, params);
  return std::ceil(v / step) * step;
}

const char* to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::failed:
      return "failed";
    case RunOutcome::survived:
      return "survived";
    case RunOutcome::invalid_displacement_imposed:
      return "invalid";
  }
  return "unknown";
}

std::optional<RunOutcome> run_outcome_from_string(const std::string& s) {
  if (s == "failed") return RunOutcome::failed;
  if (s == "survived") return RunOutcome::survived;
  if (s == "invalid") return RunOutcome::invalid_displacement_imposed;
  return std::nullopt;
}

FatigueRunRecord run_fatigue_test(double drive_amplitude, const SpecimenStrength& specimen,
                                  const Device& device, const DamageModelParams& params,
                                  const ProtocolSettings& settings) {
  const std::uint64_t interval = settings.detection_interval;
  if (interval == 0 || interval % 2 != 0) {
    throw DomainError("detection interval must be a positive even number of load cycles");
  }
  if (settings.reference_cycles == 0 || settings.reference_cycles % interval != 0) {
    throw DomainError("reference cycles must be a positive multiple of the detection interval");
  }
  // Also rejects V_a at or above pristine pull-in.
  const double sigma_a = alternating_stress(drive_amplitude, device);

  FatigueRunRecord record;
  record.drive_amplitude = drive_amplitude;
  record.reference_cycles = settings.reference_cycles;
  record.detection_interval = interval;

  DamageState state;
  const double pristine = run_pull_in_detection(state, device, params, settings.sweep_step);
  record.detections.push_back(Detection{0, pristine});

  while (true) {
    state = accumulate(state, sigma_a, interval, params, specimen);
    const double measured = run_pull_in_detection(state, device, params, settings.sweep_step);
    const double previous = record.detections.back().pull_in;
    record.detections.push_back(Detection{state.cycles_applied, measured});

    if (!state.failed && measured <= drive_amplitude) {
      record.outcome = RunOutcome::invalid_displacement_imposed;
      break;
    }
    if (drop_detected(previous, measured, pristine, settings.rule)) {
      record.outcome = RunOutcome::failed;
      break;
    }
    if (state.cycles_applied >= settings.reference_cycles) {
      record.outcome = RunOutcome::survived;
      break;
    }
  }
  return record;
}

double seeded_standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  std::seed_seq seq{low(seed), high(seed), low(stream), high(stream), low(substream),
                    high(substream)};
  std::mt19937_64 engine(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(engine);
}

SpecimenStrength strength_for_voltage(double voltage, const Device& device,
                                      const DamageModelParams& params) {
  if (!(params.endurance_stress > 0.0)) {
    throw DomainError("specimen strength in volts needs a positive endurance stress");
  }
  if (voltage >= pull_in_closed_form(device).voltage) {
    return SpecimenStrength{std::numeric_limits<double>::infinity()};
  }
  // A non-positive strength is a specimen that fails under any load.
  const double sigma = voltage > 0.0 ? alternating_stress(voltage, device) : 0.0;
  const double scale = sigma / params.endurance_stress;
  return SpecimenStrength{std::max(scale, std::numeric_limits<double>::min())};
}

SpecimenPopulation population_from_strengths(const std::vector<double>& strength_voltages,
                                             const Device& device,
                                             const DamageModelParams& params) {
  SpecimenPopulation pop;
  pop.strength_voltages = strength_voltages;
  pop.specimens.reserve(strength_voltages.size());
  double sum = 0.0;
  for (double v : strength_voltages) {
    pop.specimens.push_back(strength_for_voltage(v, device, params));
    sum += v;
  }
  if (!strength_voltages.empty()) pop.mean_strength = sum / strength_voltages.size();
  return pop;
}

SpecimenPopulation make_population(std::uint64_t seed, double mean_strength, double strength_std,
                                   std::size_t count, const Device& device,
                                   const DamageModelParams& params, unsigned threads) {
  if (!(strength_std >= 0.0)) throw DomainError("strength std must be >= 0");
  SpecimenPopulation pop;
  pop.master_seed = seed;
  pop.mean_strength = mean_strength;
  pop.strength_std = strength_std;
  pop.strength_voltages.assign(count, 0.0);
  pop.specimens.assign(count, SpecimenStrength{});

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double v = mean_strength + strength_std * seeded_standard_normal(seed, i);
      pop.strength_voltages[i] = v;
      pop.specimens[i] = strength_for_voltage(v, device, params);
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    fill(0, count);
    return pop;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin < end) pool.emplace_back(fill, begin, end);
  }
  for (auto& t : pool) t.join();
  return pop;
}

StairCaseSequence run_stair_case(const std::vector<double>& levels, double step,
                                 double start_level, const SpecimenPopulation& population,
                                 const Device& device, const DamageModelParams& params,
                                 const ProtocolSettings& settings) {
  if (levels.empty()) throw DomainError("stair-case needs at least one level");
  if (!(step > 0.0)) throw DomainError("stair-case step must be > 0");
  if (population.specimens.empty()) throw DomainError("stair-case needs at least one specimen");
  const auto [lo_it, hi_it] = std::minmax_element(levels.begin(), levels.end());
  const double lowest = *lo_it;
  const double highest = *hi_it;
  const bool start_listed = std::any_of(levels.begin(), levels.end(), [&](double l) {
    return std::abs(l - start_level) <= 1e-9 * std::max(1.0, std::abs(l));
  });
  if (!start_listed) throw DomainError("stair-case start level must be one of the levels");

  StairCaseSequence seq;
  seq.step = step;
  seq.levels = levels;
  std::sort(seq.levels.begin(), seq.levels.end());

  double level = start_level;
  for (std::size_t id = 0; id < population.specimens.size(); ++id) {
    FatigueRunRecord run;
    try {
      run = run_fatigue_test(level, population.specimens[id], device, params, settings);
    } catch (const std::exception& e) {
      seq.errors.push_back("specimen " + std::to_string(id + 1) + " at " + format_level(level) +
                           " V: " + e.what());
      continue;
    }
    StairCaseTrial trial;
    trial.specimen_id = id + 1;
    trial.level = level;
    trial.run_outcome = run.outcome;
    trial.outcome = run.outcome == RunOutcome::survived ? 0 : 1;
    trial.cycles = run.final_cycles();
    seq.trials.push_back(trial);
    seq.runs.push_back(std::move(run));

    const double next = trial.outcome == 1 ? level - step : level + step;
    const double clamped = std::clamp(next, lowest, highest);
    if (clamped != next) {
      seq.clamp_events.push_back("after specimen " + std::to_string(id + 1) + ": " +
                                 format_level(next) + " V clamped to " + format_level(clamped) +
                                 " V");
    }
    level = clamped;
  }
  return seq;
}

DamageModelParams calibrate_defaults(const Device& device, double target_fatigue_limit,
                                     double target_immediate, const ProtocolSettings& settings,
                                     const DamageShape& shape) {
  const double pull_in = pull_in_closed_form(device).voltage;
  if (!(target_fatigue_limit > 0.0)) {
    throw CalibrationError("target fatigue limit must be > 0 V");
  }
  if (!(target_fatigue_limit < target_immediate)) {
    throw CalibrationError("target fatigue limit must be below the immediate-collapse level");
  }
  if (!(target_immediate < pull_in)) {
    throw CalibrationError("immediate-collapse level must be below pristine pull-in (" +
                           format_level(pull_in) + " V)");
  }
  const double endurance_life = kEnduranceLifeFraction * static_cast<double>(settings.reference_cycles);
  const double immediate_life =
      kImmediateLifeFraction * static_cast<double>(settings.detection_interval);
  if (!(immediate_life < endurance_life)) {
    throw CalibrationError("detection interval too long relative to the reference cycle count");
  }

  const double sigma_endurance = alternating_stress(target_fatigue_limit, device);
  const double sigma_immediate = alternating_stress(target_immediate, device);

  DamageModelParams p;
  p.endurance_stress = sigma_endurance;
  p.basquin_exponent =
      std::log(sigma_endurance / sigma_immediate) / std::log(endurance_life / immediate_life);
  p.basquin_coefficient = sigma_endurance / std::pow(endurance_life, p.basquin_exponent);
  p.hardening_amplitude = shape.hardening_amplitude;
  p.hardening_onset = shape.hardening_onset;
  p.collapse_threshold = shape.collapse_threshold;
  p.softening_exponent = shape.softening_exponent;
  if (auto v = validate(p); !v.empty()) throw CalibrationError("calibrated parameters invalid: " + v.front());
  return p;
}

}  // namespace microfatigue
