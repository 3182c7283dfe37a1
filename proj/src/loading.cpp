#include "microfatigue/loading.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "microfatigue/electromech.hpp"
#include "microfatigue/errors.hpp"

namespace microfatigue {

LoadCycleSpec make_load_cycle(double drive_amplitude, double drive_frequency) {
  if (!(drive_amplitude >= 0.0)) throw DomainError("drive amplitude must be >= 0");
  if (!(drive_frequency > 0.0)) throw DomainError("drive frequency must be > 0");
  LoadCycleSpec s;
  s.drive_amplitude = drive_amplitude;
  s.drive_frequency = drive_frequency;
  s.voltage_period = 1.0 / drive_frequency;
  s.load_period = s.voltage_period / 2.0;
  s.load_frequency = 2.0 * drive_frequency;
  return s;
}

std::uint64_t load_cycles_from_voltage_cycles(std::uint64_t voltage_cycles) {
  if (voltage_cycles > std::numeric_limits<std::uint64_t>::max() / 2) {
    throw std::overflow_error("load cycle count overflows 64 bits");
  }
  return 2 * voltage_cycles;
}

FatigueParameters fatigue_parameters_from_extremes(double max_stress, double min_stress,
                                                   LoadSide side) {
  FatigueParameters p;
  p.side = side;
  p.max_stress = max_stress;
  p.min_stress = min_stress;
  p.mean_stress = (max_stress + min_stress) / 2.0;
  p.alternating_stress = (max_stress - min_stress) / 2.0;
  if (max_stress == 0.0) {
    p.stress_ratio = StressRatio{0.0, side == LoadSide::compression || min_stress != 0.0};
  } else {
    p.stress_ratio = StressRatio{min_stress / max_stress, false};
  }
  return p;
}

CycleStresses fatigue_parameters(double drive_amplitude, const Device& device) {
  if (!(drive_amplitude >= 0.0)) throw DomainError("drive amplitude must be >= 0");
  auto eq = static_equilibrium(drive_amplitude, device);
  if (!eq) {
    throw DomainError("drive amplitude reaches pull-in; the test would be displacement-imposed");
  }
  const double peak = eq->specimen_stress;
  return CycleStresses{
      fatigue_parameters_from_extremes(peak, 0.0, LoadSide::tension),
      fatigue_parameters_from_extremes(0.0, -peak, LoadSide::compression),
  };
}

double alternating_stress(double drive_amplitude, const Device& device) {
  return fatigue_parameters(drive_amplitude, device).tension.alternating_stress;
}

double waveform(double t, const LoadCycleSpec& spec) {
  const double s = std::sin(2.0 * std::numbers::pi * spec.drive_frequency * t);
  return s * s;
}

}  // namespace microfatigue
