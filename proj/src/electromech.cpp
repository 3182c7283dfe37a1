#include "microfatigue/electromech.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "microfatigue/errors.hpp"
#include "microfatigue/units.hpp"

namespace microfatigue {

namespace {

constexpr std::uintmax_t kMaxSolverIterations = 200;
constexpr double kStaticRelativeTolerance = 1.0e-10;
// Sweeps stop here; no realistic MEMS actuator pulls in above this.
constexpr double kSweepCeiling = 1.0e5;

double force_coefficient(const Device& d) {
  return units::kVacuumPermittivity * d.mechanics.effective_area / 2.0;
}

// k x - F(V, x). Strictly concave in x on [0, g).
double net_restoring_force(double voltage, double x, const Device& d) {
  const double gap_left = d.geometry.gap - x;
  return d.mechanics.suspension_stiffness * x -
         force_coefficient(d) * voltage * voltage / (gap_left * gap_left);
}

struct Peak {
  double deflection;
  double value;
};

// Maximum of the restoring balance over [0, g). Equilibrium exists iff value >= 0.
Peak balance_peak(double voltage, const Device& d) {
  const double upper = d.geometry.gap * (1.0 - 1.0e-9);
  auto [x, neg] = boost::math::tools::brent_find_minima(
      [&](double x) { return -net_restoring_force(voltage, x, d); }, 0.0, upper, 50);
  return Peak{x, -neg};
}

}  // namespace

double electrostatic_force(double voltage, double deflection, const Device& device) {
  const double g = device.geometry.gap;
  if (!(deflection >= 0.0 && deflection < g)) {
    throw DomainError("electrostatic_force: deflection must satisfy 0 <= x < gap");
  }
  const double gap_left = g - deflection;
  return force_coefficient(device) * voltage * voltage / (gap_left * gap_left);
}

double specimen_stress(double deflection, const Device& device) {
  const double L = device.geometry.specimen_length;
  return 3.0 * device.material.youngs_modulus * device.geometry.specimen_thickness * deflection /
         (L * L);
}

PullInResult pull_in_closed_form(const Device& device) {
  const double k = device.mechanics.suspension_stiffness;
  const double g = device.geometry.gap;
  const double v = std::sqrt(8.0 * k * g * g * g /
                             (27.0 * units::kVacuumPermittivity * device.mechanics.effective_area));
  return PullInResult{v, g / 3.0, PullInMethod::closed_form};
}

std::optional<EquilibriumPoint> static_equilibrium(double voltage, const Device& device) {
  if (!(voltage >= 0.0) || !std::isfinite(voltage)) {
    throw DomainError("static_equilibrium: voltage must be >= 0");
  }
  if (voltage == 0.0) return EquilibriumPoint{0.0, 0.0, 0.0, true};
  if (voltage >= pull_in_closed_form(device).voltage) return std::nullopt;

  const double hi = device.geometry.gap / 3.0;
  const double f_lo = net_restoring_force(voltage, 0.0, device);
  const double f_hi = net_restoring_force(voltage, hi, device);
  // Just under V_PI the stable and unstable roots merge at g/3; rounding can
  // push f(g/3) to zero or below. Treat that as the instability itself.
  if (!(f_hi > 0.0)) return std::nullopt;

  std::uintmax_t iterations = kMaxSolverIterations;
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= kStaticRelativeTolerance * std::abs(b);
  };
  auto [a, b] = boost::math::tools::toms748_solve(
      [&](double x) { return net_restoring_force(voltage, x, device); }, 0.0, hi, f_lo, f_hi, tol,
      iterations);
  if (iterations >= kMaxSolverIterations) {
    throw SolverError("static_equilibrium: no convergence at V = " + std::to_string(voltage));
  }
  const double x = 0.5 * (a + b);
  return EquilibriumPoint{voltage, x, specimen_stress(x, device), x < hi};
}

PullInResult pull_in_sweep(const Device& device, double step) {
  if (!(step > 0.0)) throw DomainError("pull_in_sweep: step must be > 0");

  double below = 0.0;
  double above = step;
  while (balance_peak(above, device).value >= 0.0) {
    below = above;
    above += step;
    if (above > kSweepCeiling) throw SolverError("pull_in_sweep: no instability below ceiling");
  }
  while (above - below > kSweepResolution) {
    const double mid = 0.5 * (below + above);
    if (balance_peak(mid, device).value >= 0.0) {
      below = mid;
    } else {
      above = mid;
    }
  }
  const double v = 0.5 * (below + above);
  return PullInResult{v, balance_peak(v, device).deflection, PullInMethod::sweep};
}

PullInResult pull_in_voltage(const Device& device, PullInMethod method, double sweep_step) {
  return method == PullInMethod::sweep ? pull_in_sweep(device, sweep_step)
                                       : pull_in_closed_form(device);
}

double natural_frequency(const DerivedMechanics& mech) {
  return std::sqrt(mech.suspension_stiffness / mech.plate_mass) / (2.0 * std::numbers::pi);
}

std::vector<EquilibriumPoint> stress_conversion_curve(const Device& device, double v_max,
                                                      int n_points) {
  if (n_points < 2) throw DomainError("stress_conversion_curve: need at least 2 points");
  if (!(v_max > 0.0)) throw DomainError("stress_conversion_curve: v_max must be > 0");
  if (v_max >= pull_in_closed_form(device).voltage) {
    throw DomainError("stress_conversion_curve: v_max must stay below pull-in");
  }
  std::vector<EquilibriumPoint> curve;
  curve.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double v = v_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
    auto eq = static_equilibrium(v, device);
    if (!eq) throw SolverError("stress_conversion_curve: unexpected pull-in below v_max");
    curve.push_back(*eq);
  }
  return curve;
}

}  // namespace microfatigue
