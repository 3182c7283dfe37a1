#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "microfatigue/damage.hpp"
#include "microfatigue/device_model.hpp"
#include "microfatigue/electromech.hpp"

namespace microfatigue {

/// A run is declared failed when the monitored pull-in drops sharply.
struct DetectionRule {
  double drop_fraction = 0.2;      // relative drop between consecutive detections
  double collapse_fraction = 0.5;  // or below this fraction of the pristine value

  bool operator==(const DetectionRule&) const = default;
};

struct ProtocolSettings {
  double sweep_step = kDefaultSweepStep;         // V
  std::uint64_t detection_interval = 100'000;    // load cycles, even
  std::uint64_t reference_cycles = 2'000'000;    // load cycles
  DetectionRule rule;

  bool operator==(const ProtocolSettings&) const = default;
};

/// Monitored pull-in: the degraded value rounded up to the DC step grid.
/// The detection itself does not damage the specimen.
double run_pull_in_detection(const DamageState& state, const Device& device,
                             const DamageModelParams& params, double step);

enum class RunOutcome { failed, survived, invalid_displacement_imposed };

const char* to_string(RunOutcome outcome);
std::optional<RunOutcome> run_outcome_from_string(const std::string& s);

struct Detection {
  std::uint64_t load_cycles = 0;
  double pull_in = 0.0;  // V

  bool operator==(const Detection&) const = default;
};

struct FatigueRunRecord {
  double drive_amplitude = 0.0;
  std::vector<Detection> detections;  // ordered by load_cycles; first is the pristine check
  RunOutcome outcome = RunOutcome::survived;
  std::uint64_t reference_cycles = 0;
  std::uint64_t detection_interval = 0;

  /// Load cycles at the last detection.
  std::uint64_t final_cycles() const { return detections.empty() ? 0 : detections.back().load_cycles; }
};

/// Constant-amplitude fatigue test monitored by periodic pull-in detections.
/// Stops on the detection rule (failed), at the reference count (survived),
/// or when the intact specimen's pull-in falls to the drive amplitude
/// (invalid: every cycle would snap in).
/// Throws DomainError for V_a at or above pristine pull-in, for an odd or zero
/// detection interval, or a reference count that is not a multiple of it.
FatigueRunRecord run_fatigue_test(double drive_amplitude, const SpecimenStrength& specimen,
                                  const Device& device, const DamageModelParams& params,
                                  const ProtocolSettings& settings = {});

/// Specimen strengths, expressed as the drive amplitude each specimen endures.
struct SpecimenPopulation {
  std::uint64_t master_seed = 0;
  double mean_strength = 0.0;  // V
  double strength_std = 0.0;   // V
  std::vector<double> strength_voltages;
  std::vector<SpecimenStrength> specimens;
};

/// Strength scale for a specimen whose endurance sits at `voltage`:
/// sigma_a(voltage) / sigma_D. Infinite at or beyond pull-in.
SpecimenStrength strength_for_voltage(double voltage, const Device& device,
                                      const DamageModelParams& params);

/// Normal(mean, std) strengths; specimen i draws from its own stream derived
/// from (seed, i), so the result does not depend on `threads`.
SpecimenPopulation make_population(std::uint64_t seed, double mean_strength, double strength_std,
                                   std::size_t count, const Device& device,
                                   const DamageModelParams& params, unsigned threads = 1);

SpecimenPopulation population_from_strengths(const std::vector<double>& strength_voltages,
                                             const Device& device,
                                             const DamageModelParams& params);

/// First standard normal variate of the RNG stream keyed by (seed, stream,
/// substream). Every seeded draw in the project goes through here.
double seeded_standard_normal(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t substream = 0);

struct StairCaseTrial {
  std::size_t specimen_id = 0;
  double level = 0.0;  // V
  int outcome = 0;     // 1 = failure, 0 = non-failure
  RunOutcome run_outcome = RunOutcome::survived;
  std::uint64_t cycles = 0;  // at failure, or the reference count
};

struct StairCaseSequence {
  std::vector<StairCaseTrial> trials;
  double step = 1.0;
  std::vector<double> levels;
  std::vector<std::string> clamp_events;
  std::vector<std::string> errors;        // per-specimen failures to run
  std::vector<FatigueRunRecord> runs;     // parallel to trials
};

/// Up-and-down campaign: one specimen per trial, down a step after a failure,
/// up after a survival, clamped to [min(levels), max(levels)].
/// An invalid (displacement-imposed) run counts as a failure.
StairCaseSequence run_stair_case(const std::vector<double>& levels, double step,
                                 double start_level, const SpecimenPopulation& population,
                                 const Device& device, const DamageModelParams& params,
                                 const ProtocolSettings& settings = {});

struct DamageShape {
  double hardening_amplitude = 0.2;
  double hardening_onset = 0.5;
  double collapse_threshold = 1.0;
  double softening_exponent = 0.1;

  bool operator==(const DamageShape&) const = default;
};

inline constexpr double kDefaultTargetFatigueLimit = 13.0;  // V
inline constexpr double kDefaultTargetImmediate = 21.0;     // V
// Life at the endurance boundary, as a fraction of the reference count.
inline constexpr double kEnduranceLifeFraction = 0.9;
// Life at the immediate-collapse level, as a fraction of one detection interval.
inline constexpr double kImmediateLifeFraction = 0.5;

/// Pins sigma_D to sigma_a(target_fatigue_limit) and passes the Basquin line
/// through N = 0.9 reference at sigma_D and N = 0.5 interval at
/// sigma_a(target_immediate). Any amplitude above a specimen's endurance then
/// fails inside the reference count.
/// Throws CalibrationError naming the violated constraint.
DamageModelParams calibrate_defaults(const Device& device,
                                     double target_fatigue_limit = kDefaultTargetFatigueLimit,
                                     double target_immediate = kDefaultTargetImmediate,
                                     const ProtocolSettings& settings = {},
                                     const DamageShape& shape = {});

}  // namespace microfatigue
