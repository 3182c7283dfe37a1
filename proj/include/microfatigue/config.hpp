#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "microfatigue/damage.hpp"
#include "microfatigue/device_model.hpp"
#include "microfatigue/errors.hpp"
#include "microfatigue/protocols.hpp"

namespace microfatigue {

struct MaterialConfig {
  double E_GPa = 98.5;
  double nu = 0.42;
  double rho_kg_per_um3 = 19.32e-15;

  bool operator==(const MaterialConfig&) const = default;
};

struct ModelConfig {
  double stiffness_calibration = 1.0;
  double sweep_step_V = kDefaultSweepStep;
  std::uint64_t detection_interval = 100'000;
  std::uint64_t reference_cycles = 2'000'000;
  double drop_fraction = 0.2;
  double collapse_fraction = 0.5;
  double drive_frequency_Hz = 20.0e3;

  bool operator==(const ModelConfig&) const = default;
};

enum class DamageMode { calibrate, explicit_params };

struct DamageConfig {
  DamageMode mode = DamageMode::calibrate;
  double target_fatigue_limit_V = kDefaultTargetFatigueLimit;
  double target_immediate_V = kDefaultTargetImmediate;
  // Only read in explicit mode.
  double basquin_coefficient_MPa = 1000.0;
  double basquin_exponent = -0.3;
  double endurance_MPa = 10.0;
  DamageShape shape;

  bool operator==(const DamageConfig&) const = default;
};

struct CampaignConfig {
  std::vector<double> levels_V{12.0, 13.0, 14.0, 15.0};
  double step_V = 1.0;
  double start_V = 15.0;
  std::uint64_t specimens = 6;
  double strength_mean_V = 13.0;
  double strength_std_V = 0.55;
  std::uint64_t seed = 1;
  // When non-empty, replaces the random population (specimens is ignored).
  std::vector<double> strengths_V;

  bool operator==(const CampaignConfig&) const = default;
};

struct RecoveryConfig {
  double true_mean_V = 13.0;
  double true_std_V = 0.55;
  std::uint64_t specimens = 6;
  std::uint64_t replications = 200;

  bool operator==(const RecoveryConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;

  bool operator==(const OutputConfig&) const = default;
};

/// Everything a run needs, in config units (um, GPa, MPa, V).
struct RunConfig {
  GeometryMicrons geometry;
  MaterialConfig material;
  ModelConfig model;
  DamageConfig damage;
  CampaignConfig campaign;
  RecoveryConfig recovery;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

/// Parses `key.path = value` lines; '#' starts a comment. Unset keys keep
/// their defaults. Throws ConfigError listing every problem found.
RunConfig parse_config(std::string_view text);

/// Every key, defaults expanded. parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Field-addressed semantic problems; empty for a usable config.
std::vector<FieldError> check_config(const RunConfig& config);

Device build_device(const RunConfig& config);
ProtocolSettings build_settings(const RunConfig& config);
DamageModelParams build_damage_params(const RunConfig& config, const Device& device);

}  // namespace microfatigue
