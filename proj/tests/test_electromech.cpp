#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "microfatigue/electromech.hpp"
#include "microfatigue/errors.hpp"
#include "oracles.hpp"

namespace microfatigue {
namespace {

Device random_device(std::mt19937_64& rng) {
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  GeometryMicrons g;
  g.specimen_length = u(30, 120);
  g.specimen_width = u(4, 20);
  g.specimen_thickness = u(0.8, 3.0);
  g.plate_length = u(200, 600);
  g.plate_width = u(100, 300);
  g.plate_thickness = u(2, 8);
  g.gap = u(1, 5);
  g.hole_side = u(5, 25);
  const int max_holes = static_cast<int>(0.5 * g.plate_length * g.plate_width /
                                         (g.hole_side * g.hole_side));
  g.hole_count = std::uniform_int_distribution<int>(0, std::min(max_holes, 60))(rng);
  return make_device(to_si(g), nominal_material(), u(0.5, 4.0));
}

TEST(ElectrostaticForce, ZeroVoltageGivesZero) {
  const auto d = nominal_device();
  EXPECT_EQ(electrostatic_force(0.0, 0.0, d), 0.0);
  EXPECT_EQ(electrostatic_force(0.0, 0.5e-6, d), 0.0);
}

TEST(ElectrostaticForce, SquareLaw) {
  const auto d = nominal_device();
  EXPECT_DOUBLE_EQ(electrostatic_force(2.0, 0.3e-6, d) / electrostatic_force(1.0, 0.3e-6, d), 4.0);
}

TEST(ElectrostaticForce, NominalAt13V) {
  const auto d = nominal_device();
  EXPECT_NEAR(electrostatic_force(13.0, 0.0, d), oracle::kNominalForceAt13V, 1e-12 * oracle::kNominalForceAt13V);
}

TEST(ElectrostaticForce, IncreasesWithDeflectionAndRejectsContact) {
  const auto d = nominal_device();
  EXPECT_LT(electrostatic_force(5.0, 0.1e-6, d), electrostatic_force(5.0, 0.2e-6, d));
  EXPECT_THROW(electrostatic_force(5.0, d.geometry.gap, d), DomainError);
  EXPECT_THROW(electrostatic_force(5.0, -1e-9, d), DomainError);
}

TEST(StaticEquilibrium, ZeroVoltage) {
  const auto eq = static_equilibrium(0.0, nominal_device());
  ASSERT_TRUE(eq);
  EXPECT_EQ(eq->deflection, 0.0);
  EXPECT_EQ(eq->specimen_stress, 0.0);
  EXPECT_TRUE(eq->stable);
}

TEST(StaticEquilibrium, NominalAt13VMatchesBisectionOracle) {
  const auto d = nominal_device();
  const auto eq = static_equilibrium(13.0, d);
  ASSERT_TRUE(eq);
  const double x_ref = oracle::bisect_deflection(oracle::kNominalStiffness, 3e-6,
                                                 oracle::kNominalEffectiveArea, 13.0);
  EXPECT_NEAR(eq->deflection, x_ref, 1e-9 * x_ref);
  EXPECT_NEAR(eq->deflection, oracle::kNominalDeflectionAt13V, 1e-9 * x_ref);
  EXPECT_NEAR(eq->deflection * 1e6, 0.117, 0.001);
  EXPECT_NEAR(eq->specimen_stress, oracle::kNominalStressAt13V, 1e-8 * oracle::kNominalStressAt13V);
  EXPECT_NEAR(eq->specimen_stress / 1e6, 25.0, 0.5);
}

TEST(StaticEquilibrium, SmallEndRotation) {
  const auto d = nominal_device();
  const auto eq = static_equilibrium(13.0, d);
  const double rotation_deg =
      std::atan(2.0 * eq->deflection / d.geometry.specimen_length) * 180.0 / std::numbers::pi;
  EXPECT_LT(rotation_deg, 1.0);
}

TEST(StaticEquilibrium, AbovePullInIndicatesPullIn) {
  const auto d = nominal_device();
  const double v_pi = pull_in_closed_form(d).voltage;
  EXPECT_FALSE(static_equilibrium(1.01 * v_pi, d));
  EXPECT_FALSE(static_equilibrium(v_pi, d));
  EXPECT_THROW(static_equilibrium(-1.0, d), DomainError);
}

TEST(StaticEquilibrium, ResidualAndBranchOnRandomDevices) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 50; ++n) {
    const auto d = random_device(rng);
    const double v_pi = pull_in_closed_form(d).voltage;
    const double k = d.mechanics.suspension_stiffness;
    const double g = d.geometry.gap;
    double previous = -1.0;
    for (double frac = 0.05; frac < 0.999; frac += 0.05) {
      const auto eq = static_equilibrium(frac * v_pi, d);
      ASSERT_TRUE(eq);
      const double residual = std::abs(k * eq->deflection - electrostatic_force(eq->voltage, eq->deflection, d));
      EXPECT_LT(residual / (k * g), 1e-9);
      EXPECT_LT(eq->deflection, g / 3.0);
      EXPECT_GT(eq->deflection, previous);
      previous = eq->deflection;
    }
  }
}

TEST(PullIn, NominalClosedForm) {
  const auto r = pull_in_closed_form(nominal_device());
  EXPECT_NEAR(r.voltage, oracle::kNominalPullIn, 1e-10 * oracle::kNominalPullIn);
  EXPECT_NEAR(r.voltage, 26.4, 0.05);
  EXPECT_NEAR(r.deflection_at_instability, 1e-6, 1e-18);
}

TEST(PullIn, ClosedFormMatchesGridOracle) {
  const double grid = oracle::grid_pull_in(oracle::kNominalStiffness, 3e-6, oracle::kNominalEffectiveArea);
  EXPECT_NEAR(pull_in_closed_form(nominal_device()).voltage, grid, 1e-6);
}

TEST(PullIn, GapAndStiffnessScaling) {
  const auto base = nominal_device();
  auto g = nominal_geometry();
  g.gap *= 2.0;
  const auto wide = make_device(g, nominal_material());
  EXPECT_NEAR(pull_in_closed_form(wide).voltage / pull_in_closed_form(base).voltage,
              std::pow(2.0, 1.5), 1e-12);
  const auto stiff = nominal_device(2.0);
  EXPECT_NEAR(pull_in_closed_form(stiff).voltage / pull_in_closed_form(base).voltage,
              std::sqrt(2.0), 1e-12);
}

TEST(PullIn, SweepAgreesWithClosedForm) {
  const auto d = nominal_device();
  const auto sweep = pull_in_sweep(d);
  EXPECT_EQ(sweep.method, PullInMethod::sweep);
  EXPECT_NEAR(sweep.voltage, pull_in_closed_form(d).voltage, 1e-2);
  EXPECT_NEAR(sweep.deflection_at_instability / (d.geometry.gap / 3.0), 1.0, 0.01);
  EXPECT_THROW(pull_in_sweep(d, 0.0), DomainError);
}

TEST(NaturalFrequency, NominalAndCalibrated) {
  EXPECT_NEAR(natural_frequency(nominal_device().mechanics), oracle::kNominalFrequency, 1e-6);
  EXPECT_NEAR(natural_frequency(nominal_device(kResonanceCalibratedStiffness).mechanics), 28e3, 0.05 * 28e3);
}

TEST(NaturalFrequency, QuadruplingStiffnessDoublesFrequency) {
  auto mech = nominal_device().mechanics;
  const double f = natural_frequency(mech);
  mech.suspension_stiffness *= 4.0;
  EXPECT_DOUBLE_EQ(natural_frequency(mech), 2.0 * f);
}

TEST(StressConversionCurve, ShapeAndAnchor) {
  const auto d = nominal_device();
  const auto curve = stress_conversion_curve(d, 26.0, 27);  // 1 V spacing
  ASSERT_EQ(curve.size(), 27u);
  EXPECT_EQ(curve.front().voltage, 0.0);
  EXPECT_EQ(curve.front().specimen_stress, 0.0);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_GT(curve[i].specimen_stress, curve[i - 1].specimen_stress);
    if (i >= 2) {
      // super-linear: sigma/V increasing
      EXPECT_GT(curve[i].specimen_stress / curve[i].voltage,
                curve[i - 1].specimen_stress / curve[i - 1].voltage);
    }
  }
  EXPECT_NEAR(curve[13].voltage, 13.0, 1e-12);
  EXPECT_NEAR(curve[13].specimen_stress, oracle::kNominalStressAt13V, 1e-6 * oracle::kNominalStressAt13V);
}

TEST(StressConversionCurve, RejectsPullInRange) {
  const auto d = nominal_device();
  EXPECT_THROW(stress_conversion_curve(d, 30.0, 10), DomainError);
  EXPECT_THROW(stress_conversion_curve(d, 10.0, 1), DomainError);
}

}  // namespace
}  // namespace microfatigue
