#include "microfatigue/damage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "microfatigue/electromech.hpp"

namespace microfatigue {

namespace {

// Life counts beyond this are saturated; they are far past any test horizon.
constexpr double kLifeCeiling = 1.0e18;

}  // namespace

std::vector<std::string> validate(const DamageModelParams& p) {
  std::vector<std::string> out;
  if (!(p.basquin_coefficient > 0.0)) out.push_back("basquin_coefficient: must be > 0");
  if (!(p.basquin_exponent < 0.0)) out.push_back("basquin_exponent: must be < 0");
  if (!(p.endurance_stress >= 0.0)) out.push_back("endurance_stress: must be >= 0");
  if (!(p.hardening_amplitude >= 0.0)) out.push_back("hardening_amplitude: must be >= 0");
  if (!(p.softening_exponent > 0.0)) out.push_back("softening_exponent: must be > 0");
  if (!(0.0 < p.hardening_onset && p.hardening_onset < p.collapse_threshold &&
        p.collapse_threshold <= 1.0)) {
    out.push_back("hardening_onset/collapse_threshold: need 0 < D_h < D_c <= 1");
  }
  return out;
}

std::optional<std::uint64_t> cycles_to_failure(double alternating_stress,
                                               const DamageModelParams& params,
                                               const SpecimenStrength& specimen) {
  if (alternating_stress <= specimen.scale * params.endurance_stress) return std::nullopt;
  if (std::isinf(specimen.scale)) return std::nullopt;
  const double life = std::pow(alternating_stress / (specimen.scale * params.basquin_coefficient),
                               1.0 / params.basquin_exponent);
  const double rounded = std::clamp(std::round(life), 1.0, kLifeCeiling);
  return static_cast<std::uint64_t>(rounded);
}

DamageState accumulate(const DamageState& state, double alternating_stress,
                       std::uint64_t load_cycles, const DamageModelParams& params,
                       const SpecimenStrength& specimen) {
  DamageState next = state;
  next.cycles_applied = state.cycles_applied + load_cycles;
  if (auto life = cycles_to_failure(alternating_stress, params, specimen)) {
    const double increment = static_cast<double>(load_cycles) / static_cast<double>(*life);
    next.damage = std::min(1.0, state.damage + increment);
  }
  next.hardened = state.hardened || next.damage >= params.hardening_onset;
  next.failed = state.failed || next.damage >= params.collapse_threshold;
  return next;
}

double hardening_bump(double damage, const DamageModelParams& p) {
  if (damage < p.hardening_onset || damage > p.collapse_threshold) return 0.0;
  const double s = std::sin(std::numbers::pi * (damage - p.hardening_onset) /
                            (p.collapse_threshold - p.hardening_onset));
  return s * s;
}

double stiffness_ratio(double damage, const DamageModelParams& p) {
  return std::pow(1.0 - damage, p.softening_exponent) *
         (1.0 + p.hardening_amplitude * hardening_bump(damage, p));
}

double degraded_pull_in(const DamageState& state, const Device& device,
                        const DamageModelParams& params) {
  const double pristine = pull_in_closed_form(device).voltage;
  if (state.damage == 0.0) return pristine;
  return pristine * std::sqrt(stiffness_ratio(state.damage, params));
}

}  // namespace microfatigue
