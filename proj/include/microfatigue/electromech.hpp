#pragma once

#include <optional>
#include <vector>

#include "microfatigue/device_model.hpp"

namespace microfatigue {

struct EquilibriumPoint {
  double voltage = 0.0;     // V
  double deflection = 0.0;  // m
  double specimen_stress = 0.0;  // Pa, peak surface bending stress
  bool stable = true;
};

enum class PullInMethod { closed_form, sweep };

struct PullInResult {
  double voltage = 0.0;
  double deflection_at_instability = 0.0;
  PullInMethod method = PullInMethod::closed_form;
};

inline constexpr double kDefaultSweepStep = 0.05;  // V
inline constexpr double kSweepResolution = 1.0e-3;  // V

/// Parallel-plate attraction eps0 * A_eff * V^2 / (2 (g - x)^2).
/// Throws DomainError unless 0 <= x < g.
double electrostatic_force(double voltage, double deflection, const Device& device);

/// Guided-cantilever clamped-end surface stress 3 E t x / L^2.
double specimen_stress(double deflection, const Device& device);

/// Stable root of k x = F(V, x) on [0, g/3). Returns nullopt when the device
/// pulls in at this voltage. Throws SolverError if the bracketed solve stalls.
std::optional<EquilibriumPoint> static_equilibrium(double voltage, const Device& device);

/// sqrt(8 k g^3 / (27 eps0 A_eff)), deflection g/3.
PullInResult pull_in_closed_form(const Device& device);

/// Raises the DC bias in steps of `step` until no equilibrium exists, then
/// bisects the last bracket to kSweepResolution.
PullInResult pull_in_sweep(const Device& device, double step = kDefaultSweepStep);

PullInResult pull_in_voltage(const Device& device, PullInMethod method = PullInMethod::closed_form,
                             double sweep_step = kDefaultSweepStep);

double natural_frequency(const DerivedMechanics& mech);

/// Static equilibria on an even grid over [0, v_max]. Throws DomainError when
/// v_max reaches pull-in or n_points < 2.
std::vector<EquilibriumPoint> stress_conversion_curve(const Device& device, double v_max,
                                                      int n_points);

}  // namespace microfatigue
