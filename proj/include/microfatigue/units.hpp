#pragma once

namespace microfatigue::units {

inline constexpr double kVacuumPermittivity = 8.854e-12;  // F/m

inline constexpr double kMetresPerMicron = 1.0e-6;
inline constexpr double kPascalPerGigapascal = 1.0e9;
inline constexpr double kPascalPerMegapascal = 1.0e6;
// kg/um^3 -> kg/m^3
inline constexpr double kDensityPerMicronCubed = 1.0e18;

constexpr double microns(double um) { return um * kMetresPerMicron; }
constexpr double to_microns(double m) { return m / kMetresPerMicron; }

}  // namespace microfatigue::units
