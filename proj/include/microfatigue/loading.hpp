#pragma once

#include <cstdint>

#include "microfatigue/device_model.hpp"

namespace microfatigue {

inline constexpr double kDefaultDriveFrequency = 20.0e3;  // Hz

/// AC drive and the load cycle it produces. The attraction goes as V^2, so
/// the structure sees two load cycles per voltage period.
struct LoadCycleSpec {
  double drive_amplitude = 0.0;  // V
  double drive_frequency = kDefaultDriveFrequency;
  double voltage_period = 1.0 / kDefaultDriveFrequency;
  double load_period = 0.5 / kDefaultDriveFrequency;
  double load_frequency = 2.0 * kDefaultDriveFrequency;
};

LoadCycleSpec make_load_cycle(double drive_amplitude, double drive_frequency = kDefaultDriveFrequency);

/// N_L = 2 N_V. Throws std::overflow_error past the uint64 range.
std::uint64_t load_cycles_from_voltage_cycles(std::uint64_t voltage_cycles);

enum class LoadSide { tension, compression };

/// R = sigma_min / sigma_max. Pure compression (sigma_max = 0) carries an
/// explicit marker instead of a floating-point infinity.
struct StressRatio {
  double value = 0.0;
  bool infinite = false;

  bool operator==(const StressRatio&) const = default;
};

struct FatigueParameters {
  double max_stress = 0.0;
  double min_stress = 0.0;
  double mean_stress = 0.0;
  double alternating_stress = 0.0;
  StressRatio stress_ratio;
  LoadSide side = LoadSide::tension;
};

struct CycleStresses {
  FatigueParameters tension;
  FatigueParameters compression;
};

/// Mean/alternate/ratio bookkeeping for an arbitrary cycle.
FatigueParameters fatigue_parameters_from_extremes(double max_stress, double min_stress,
                                                   LoadSide side);

/// Both clamped-end surfaces for a drive amplitude V_a. The deflection never
/// reverses, so the tension side cycles between 0 and sigma(V_a) (R = 0) and
/// the compression side between -sigma(V_a) and 0.
/// Throws DomainError when V_a reaches the pristine pull-in voltage.
CycleStresses fatigue_parameters(double drive_amplitude, const Device& device);

/// Tension-side alternating stress, the quantity that drives damage.
double alternating_stress(double drive_amplitude, const Device& device);

/// Instantaneous load as a fraction of peak: sin^2(2 pi f_V t).
double waveform(double t, const LoadCycleSpec& spec);

}  // namespace microfatigue
