#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "microfatigue/damage.hpp"
#include "microfatigue/electromech.hpp"
#include "microfatigue/fatigue_stats.hpp"
#include "microfatigue/protocols.hpp"

namespace microfatigue {

inline constexpr const char* kToolName = "microfatigue";
inline constexpr const char* kToolVersion = "1.0.0";

/// Six significant digits, "C" locale, no trailing zeros.
std::string format_number(double v);

/// `# va_V=...,outcome=...,reference_cycles=...,detection_interval=...`
/// then `load_cycles,pullin_V` rows in cycle order.
std::string emit_fatigue_run(const FatigueRunRecord& record);

/// Inverse of emit_fatigue_run. Throws std::runtime_error on malformed input.
FatigueRunRecord parse_fatigue_run(std::string_view csv);

/// Columns voltage_V, deflection_um, stress_MPa.
std::string emit_curve(const std::vector<EquilibriumPoint>& curve);

/// One row per trial: specimen,level_V,outcome,run_outcome,cycles,strength_V.
std::string emit_stair_case(const StairCaseSequence& seq, const SpecimenPopulation& population);

/// Wohler points from either a stair-case CSV (as emitted above) or a plain
/// `level_V,cycles,censored` table.
std::vector<WohlerPoint> parse_wohler_points(std::string_view csv);

std::string emit_wohler_points(const std::vector<WohlerPoint>& points);

/// {mean_V, std_V, q10_V, q90_V, basis_event, dispersion_valid}
std::string estimate_json(const StairCaseEstimate& estimate);

std::string basquin_fit_json(const BasquinFit& fit, std::size_t censored_excluded);

std::string recovery_json(const RecoverySummary& summary, double true_mean, double true_std,
                          std::size_t specimens, std::uint64_t seed);

std::string damage_params_json(const DamageModelParams& params);

}  // namespace microfatigue
