#include "microfatigue/device_model.hpp"

#include <cmath>

#include "microfatigue/errors.hpp"
#include "microfatigue/units.hpp"

namespace microfatigue {

namespace {

void require_positive(std::vector<std::string>& out, const char* field, double v) {
  if (!(std::isfinite(v) && v > 0.0)) out.push_back(std::string(field) + ": must be > 0");
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& item : items) {
    if (!s.empty()) s += "; ";
    s += item;
  }
  return s;
}

}  // namespace

DeviceGeometry to_si(const GeometryMicrons& um) {
  using units::microns;
  DeviceGeometry g;
  g.specimen_length = microns(um.specimen_length);
  g.specimen_width = microns(um.specimen_width);
  g.specimen_thickness = microns(um.specimen_thickness);
  g.plate_length = microns(um.plate_length);
  g.plate_width = microns(um.plate_width);
  g.plate_thickness = microns(um.plate_thickness);
  g.gap = microns(um.gap);
  g.hole_side = microns(um.hole_side);
  g.hole_count = um.hole_count;
  g.electrode_length = microns(um.electrode_length);
  g.electrode_width = microns(um.electrode_width);
  return g;
}

Material Material::from_config_units(double E_GPa, double nu, double rho_kg_per_um3) {
  return Material{E_GPa * units::kPascalPerGigapascal, nu,
                  rho_kg_per_um3 * units::kDensityPerMicronCubed};
}

GeometryMicrons nominal_geometry_microns() { return GeometryMicrons{}; }

DeviceGeometry nominal_geometry() { return to_si(nominal_geometry_microns()); }

Material nominal_material() { return Material::from_config_units(98.5, 0.42, 19.32e-15); }

std::vector<std::string> validate_geometry(const DeviceGeometry& g) {
  std::vector<std::string> out;
  require_positive(out, "specimen_length", g.specimen_length);
  require_positive(out, "specimen_width", g.specimen_width);
  require_positive(out, "specimen_thickness", g.specimen_thickness);
  require_positive(out, "plate_length", g.plate_length);
  require_positive(out, "plate_width", g.plate_width);
  require_positive(out, "plate_thickness", g.plate_thickness);
  require_positive(out, "gap", g.gap);
  require_positive(out, "hole_side", g.hole_side);
  require_positive(out, "electrode_length", g.electrode_length);
  require_positive(out, "electrode_width", g.electrode_width);
  if (g.hole_count < 0) out.push_back("hole_count: must be >= 0");
  if (g.plate_length > 0.0 && g.plate_width > 0.0 && g.hole_count >= 0 &&
      !(g.hole_area() < g.plate_area())) {
    out.push_back("hole_count: total hole area must be < plate area");
  }
  if (g.gap > 0.0 && g.plate_length > 0.0 && !(g.gap < g.plate_length)) {
    out.push_back("gap: must be < plate_length (shallow gap)");
  }
  return out;
}

std::vector<std::string> validate_material(const Material& m) {
  std::vector<std::string> out;
  require_positive(out, "youngs_modulus", m.youngs_modulus);
  require_positive(out, "density", m.density);
  if (!(m.poisson_ratio >= 0.0 && m.poisson_ratio < 0.5)) {
    out.push_back("poisson_ratio: must be in [0, 0.5)");
  }
  return out;
}

DerivedMechanics derive_mechanics(const DeviceGeometry& g, const Material& m,
                                  double stiffness_calibration) {
  if (auto v = validate_geometry(g); !v.empty()) throw DomainError("invalid geometry: " + join(v));
  if (auto v = validate_material(m); !v.empty()) throw DomainError("invalid material: " + join(v));
  if (!(std::isfinite(stiffness_calibration) && stiffness_calibration > 0.0)) {
    throw DomainError("stiffness calibration must be > 0");
  }

  DerivedMechanics d;
  const double t = g.specimen_thickness;
  const double L = g.specimen_length;
  d.area_moment = g.specimen_width * t * t * t / 12.0;
  d.effective_area = g.plate_area() - g.hole_area();
  d.plate_mass = m.density * d.effective_area * g.plate_thickness;
  d.stiffness_calibration = stiffness_calibration;
  d.suspension_stiffness =
      stiffness_calibration * 12.0 * m.youngs_modulus * d.area_moment / (L * L * L);
  return d;
}

Device make_device(const DeviceGeometry& geom, const Material& mat, double stiffness_calibration) {
  return Device{geom, mat, derive_mechanics(geom, mat, stiffness_calibration)};
}

Device nominal_device(double stiffness_calibration) {
  return make_device(nominal_geometry(), nominal_material(), stiffness_calibration);
}

}  // namespace microfatigue
