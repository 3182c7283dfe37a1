#pragma once

#include <string>
#include <vector>

namespace microfatigue {

/// Beam specimen + perforated actuation plate, all lengths in metres.
struct DeviceGeometry {
  double specimen_length = 0.0;
  double specimen_width = 0.0;
  double specimen_thickness = 0.0;
  double plate_length = 0.0;
  double plate_width = 0.0;
  double plate_thickness = 0.0;
  double gap = 0.0;
  double hole_side = 0.0;
  int hole_count = 0;
  double electrode_length = 0.0;
  double electrode_width = 0.0;

  double plate_area() const noexcept { return plate_length * plate_width; }
  double hole_area() const noexcept { return hole_count * hole_side * hole_side; }
};

/// Same description in the micron units used by drawings and config files.
struct GeometryMicrons {
  double specimen_length = 50.0;
  double specimen_width = 10.0;
  double specimen_thickness = 1.8;
  double plate_length = 420.0;
  double plate_width = 180.0;
  double plate_thickness = 4.8;
  double gap = 3.0;
  double hole_side = 20.0;
  int hole_count = 40;  // 10 x 4 array
  double electrode_length = 420.0;
  double electrode_width = 460.0;

  bool operator==(const GeometryMicrons&) const = default;
};

DeviceGeometry to_si(const GeometryMicrons& um);

struct Material {
  double youngs_modulus = 0.0;  // Pa
  double poisson_ratio = 0.0;
  double density = 0.0;  // kg/m^3

  /// Converts from GPa and kg/um^3.
  static Material from_config_units(double E_GPa, double nu, double rho_kg_per_um3);
};

/// Nominal gold test structure.
GeometryMicrons nominal_geometry_microns();
DeviceGeometry nominal_geometry();
Material nominal_material();

/// Stiffness factor that lands the lumped resonance on the measured ~28 kHz.
inline constexpr double kResonanceCalibratedStiffness = 3.7;

struct DerivedMechanics {
  double area_moment = 0.0;         // m^4
  double effective_area = 0.0;      // m^2, plate minus holes
  double plate_mass = 0.0;          // kg
  double suspension_stiffness = 0.0;  // N/m
  double stiffness_calibration = 1.0;
};

/// Empty iff every geometric invariant holds. Each entry reads "<field>: <rule>".
std::vector<std::string> validate_geometry(const DeviceGeometry& geom);
std::vector<std::string> validate_material(const Material& mat);

/// Guided-cantilever suspension: k = c_k * 12 E I / L^3.
/// Throws DomainError on anything validate_geometry/validate_material reject
/// or on c_k <= 0.
DerivedMechanics derive_mechanics(const DeviceGeometry& geom, const Material& mat,
                                  double stiffness_calibration = 1.0);

/// Everything downstream physics needs, validated once at construction.
struct Device {
  DeviceGeometry geometry;
  Material material;
  DerivedMechanics mechanics;
};

Device make_device(const DeviceGeometry& geom, const Material& mat,
                   double stiffness_calibration = 1.0);

Device nominal_device(double stiffness_calibration = 1.0);

}  // namespace microfatigue
