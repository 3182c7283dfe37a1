#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "microfatigue/device_model.hpp"

namespace microfatigue {

/// Basquin life curve with an endurance cutoff, plus the shape of the
/// stiffness-vs-damage map.
struct DamageModelParams {
  double basquin_coefficient = 0.0;  // sigma_f', Pa
  double basquin_exponent = -0.1;    // b < 0
  double endurance_stress = 0.0;     // sigma_D, Pa (alternating)
  double hardening_amplitude = 0.2;  // h
  double hardening_onset = 0.5;      // D_h
  double collapse_threshold = 1.0;   // D_c
  double softening_exponent = 0.1;   // p

  bool operator==(const DamageModelParams&) const = default;
};

std::vector<std::string> validate(const DamageModelParams& params);

struct DamageState {
  double damage = 0.0;
  std::uint64_t cycles_applied = 0;  // load cycles
  bool hardened = false;
  bool failed = false;

  bool operator==(const DamageState&) const = default;
};

/// Per-specimen multiplier on sigma_D and sigma_f'. May be +infinity.
struct SpecimenStrength {
  double scale = 1.0;

  bool operator==(const SpecimenStrength&) const = default;
};

/// N = (sigma_a / (s sigma_f'))^(1/b), rounded, at least 1. nullopt means the
/// amplitude is at or below the specimen's endurance stress.
std::optional<std::uint64_t> cycles_to_failure(double alternating_stress,
                                               const DamageModelParams& params,
                                               const SpecimenStrength& specimen);

/// Linear Miner accumulation of `load_cycles` at one amplitude. Below
/// endurance the damage is left untouched.
DamageState accumulate(const DamageState& state, double alternating_stress,
                       std::uint64_t load_cycles, const DamageModelParams& params,
                       const SpecimenStrength& specimen);

/// Unit-height sin^2 peak on [D_h, D_c], zero elsewhere.
double hardening_bump(double damage, const DamageModelParams& params);

/// k_eff / k = (1 - D)^p (1 + h bump(D)).
double stiffness_ratio(double damage, const DamageModelParams& params);

/// Pristine pull-in scaled by sqrt(k_eff / k).
double degraded_pull_in(const DamageState& state, const Device& device,
                        const DamageModelParams& params);

}  // namespace microfatigue
