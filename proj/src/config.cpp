#include "microfatigue/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <set>

#include "microfatigue/errors.hpp"

namespace microfatigue {

ConfigError::ConfigError(std::vector<FieldError> errors)
    : std::runtime_error([&] {
        std::string msg = "configuration error";
        for (const auto& e : errors) msg += "\n  " + e.path + ": " + e.message;
        return msg;
      }()),
      errors_(std::move(errors)) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Shortest representation that parses back to the same double.
std::string format_exact(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> parse_count(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  // Allow 2e6-style counts when they are exact integers.
  auto d = parse_double(s);
  if (d && *d >= 0.0 && *d <= 9.0e18 && std::floor(*d) == *d) return static_cast<std::uint64_t>(*d);
  return std::nullopt;
}

std::optional<std::vector<double>> parse_list(std::string_view s) {
  std::vector<double> out;
  s = trim(s);
  if (s.empty()) return out;
  while (true) {
    const auto comma = s.find(',');
    auto v = parse_double(s.substr(0, comma));
    if (!v) return std::nullopt;
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_exact(v[i]);
  }
  return s;
}

struct Field {
  std::string path;
  std::function<std::string(const RunConfig&)> get;
  // Returns an error message, or nullopt on success.
  std::function<std::optional<std::string>(RunConfig&, std::string_view)> set;
};

template <typename Member>
Field number(std::string path, Member member) {
  return Field{
      path,
      [member](const RunConfig& c) { return format_exact(member(c)); },
      [member](RunConfig& c, std::string_view v) -> std::optional<std::string> {
        auto d = parse_double(v);
        if (!d) return "expected a number";
        member(c) = *d;
        return std::nullopt;
      }};
}

template <typename Member>
Field count(std::string path, Member member) {
  return Field{
      path,
      [member](const RunConfig& c) {
        return std::to_string(member(c));
      },
      [member](RunConfig& c, std::string_view v) -> std::optional<std::string> {
        auto n = parse_count(v);
        if (!n) return "expected a non-negative integer";
        member(c) = *n;
        return std::nullopt;
      }};
}

template <typename Member>
Field list(std::string path, Member member) {
  return Field{
      path,
      [member](const RunConfig& c) { return format_list(member(c)); },
      [member](RunConfig& c, std::string_view v) -> std::optional<std::string> {
        auto l = parse_list(v);
        if (!l) return "expected a comma-separated list of numbers";
        member(c) = std::move(*l);
        return std::nullopt;
      }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(number("geometry.specimen_length_um", [](auto& c) -> auto& { return c.geometry.specimen_length; }));
    f.push_back(number("geometry.specimen_width_um", [](auto& c) -> auto& { return c.geometry.specimen_width; }));
    f.push_back(number("geometry.specimen_thickness_um", [](auto& c) -> auto& { return c.geometry.specimen_thickness; }));
    f.push_back(number("geometry.plate_length_um", [](auto& c) -> auto& { return c.geometry.plate_length; }));
    f.push_back(number("geometry.plate_width_um", [](auto& c) -> auto& { return c.geometry.plate_width; }));
    f.push_back(number("geometry.plate_thickness_um", [](auto& c) -> auto& { return c.geometry.plate_thickness; }));
    f.push_back(number("geometry.gap_um", [](auto& c) -> auto& { return c.geometry.gap; }));
    f.push_back(number("geometry.hole_side_um", [](auto& c) -> auto& { return c.geometry.hole_side; }));
    f.push_back(Field{
        "geometry.hole_count",
        [](const RunConfig& c) { return std::to_string(c.geometry.hole_count); },
        [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
          auto d = parse_double(v);
          if (!d || std::floor(*d) != *d || std::abs(*d) > 1.0e9) return "expected an integer";
          c.geometry.hole_count = static_cast<int>(*d);
          return std::nullopt;
        }});
    f.push_back(number("geometry.electrode_length_um", [](auto& c) -> auto& { return c.geometry.electrode_length; }));
    f.push_back(number("geometry.electrode_width_um", [](auto& c) -> auto& { return c.geometry.electrode_width; }));

    f.push_back(number("material.E_GPa", [](auto& c) -> auto& { return c.material.E_GPa; }));
    f.push_back(number("material.nu", [](auto& c) -> auto& { return c.material.nu; }));
    f.push_back(number("material.rho_kg_per_um3", [](auto& c) -> auto& { return c.material.rho_kg_per_um3; }));

    f.push_back(number("model.c_k", [](auto& c) -> auto& { return c.model.stiffness_calibration; }));
    f.push_back(number("model.sweep_step_V", [](auto& c) -> auto& { return c.model.sweep_step_V; }));
    f.push_back(count("model.detection_interval", [](auto& c) -> auto& { return c.model.detection_interval; }));
    f.push_back(count("model.reference_cycles", [](auto& c) -> auto& { return c.model.reference_cycles; }));
    f.push_back(number("model.drop_fraction", [](auto& c) -> auto& { return c.model.drop_fraction; }));
    f.push_back(number("model.collapse_fraction", [](auto& c) -> auto& { return c.model.collapse_fraction; }));
    f.push_back(number("model.drive_frequency_Hz", [](auto& c) -> auto& { return c.model.drive_frequency_Hz; }));

    f.push_back(Field{
        "damage.mode",
        [](const RunConfig& c) {
          return std::string(c.damage.mode == DamageMode::calibrate ? "calibrate" : "explicit");
        },
        [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
          v = trim(v);
          if (v == "calibrate") {
            c.damage.mode = DamageMode::calibrate;
          } else if (v == "explicit") {
            c.damage.mode = DamageMode::explicit_params;
          } else {
            return "expected 'calibrate' or 'explicit'";
          }
          return std::nullopt;
        }});
    f.push_back(number("damage.target_VD_V", [](auto& c) -> auto& { return c.damage.target_fatigue_limit_V; }));
    f.push_back(number("damage.target_immediate_V", [](auto& c) -> auto& { return c.damage.target_immediate_V; }));
    f.push_back(number("damage.basquin_coefficient_MPa", [](auto& c) -> auto& { return c.damage.basquin_coefficient_MPa; }));
    f.push_back(number("damage.basquin_exponent", [](auto& c) -> auto& { return c.damage.basquin_exponent; }));
    f.push_back(number("damage.endurance_MPa", [](auto& c) -> auto& { return c.damage.endurance_MPa; }));
    f.push_back(number("damage.hardening_amplitude", [](auto& c) -> auto& { return c.damage.shape.hardening_amplitude; }));
    f.push_back(number("damage.hardening_onset", [](auto& c) -> auto& { return c.damage.shape.hardening_onset; }));
    f.push_back(number("damage.collapse_threshold", [](auto& c) -> auto& { return c.damage.shape.collapse_threshold; }));
    f.push_back(number("damage.softening_exponent", [](auto& c) -> auto& { return c.damage.shape.softening_exponent; }));

    f.push_back(list("campaign.levels_V", [](auto& c) -> auto& { return c.campaign.levels_V; }));
    f.push_back(number("campaign.step_V", [](auto& c) -> auto& { return c.campaign.step_V; }));
    f.push_back(number("campaign.start_V", [](auto& c) -> auto& { return c.campaign.start_V; }));
    f.push_back(count("campaign.specimens", [](auto& c) -> auto& { return c.campaign.specimens; }));
    f.push_back(number("campaign.strength_mean_V", [](auto& c) -> auto& { return c.campaign.strength_mean_V; }));
    f.push_back(number("campaign.strength_std_V", [](auto& c) -> auto& { return c.campaign.strength_std_V; }));
    f.push_back(count("campaign.seed", [](auto& c) -> auto& { return c.campaign.seed; }));
    f.push_back(list("campaign.strengths_V", [](auto& c) -> auto& { return c.campaign.strengths_V; }));

    f.push_back(number("recovery.true_mean_V", [](auto& c) -> auto& { return c.recovery.true_mean_V; }));
    f.push_back(number("recovery.true_std_V", [](auto& c) -> auto& { return c.recovery.true_std_V; }));
    f.push_back(count("recovery.specimens", [](auto& c) -> auto& { return c.recovery.specimens; }));
    f.push_back(count("recovery.replications", [](auto& c) -> auto& { return c.recovery.replications; }));

    f.push_back(Field{
        "output.directory", [](const RunConfig& c) { return c.output.directory; },
        [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
          v = trim(v);
          if (v.empty()) return "expected a directory path";
          c.output.directory = std::string(v);
          return std::nullopt;
        }});
    f.push_back(Field{
        "output.formats",
        [](const RunConfig& c) {
          std::string s;
          if (c.output.csv) s += "csv";
          if (c.output.json) s += s.empty() ? "json" : ", json";
          return s;
        },
        [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
          bool csv = false;
          bool json = false;
          v = trim(v);
          while (!v.empty()) {
            const auto comma = v.find(',');
            const auto item = trim(v.substr(0, comma));
            if (item == "csv") {
              csv = true;
            } else if (item == "json") {
              json = true;
            } else if (!item.empty()) {
              return "unknown format '" + std::string(item) + "' (expected csv, json)";
            }
            if (comma == std::string_view::npos) break;
            v.remove_prefix(comma + 1);
          }
          c.output.csv = csv;
          c.output.json = json;
          return std::nullopt;
        }});
    return f;
  }();
  return table;
}

std::string geometry_path(const std::string& field) {
  if (field == "hole_count") return "geometry.hole_count";
  return "geometry." + field + "_um";
}

void add_geometry_errors(const RunConfig& c, std::vector<FieldError>& out) {
  for (const auto& v : validate_geometry(to_si(c.geometry))) {
    const auto colon = v.find(':');
    out.push_back(FieldError{geometry_path(v.substr(0, colon)), v.substr(colon + 2)});
  }
}

void require(std::vector<FieldError>& out, bool ok, const char* path, const char* message) {
  if (!ok) out.push_back(FieldError{path, message});
}

}  // namespace

std::vector<FieldError> check_config(const RunConfig& c) {
  std::vector<FieldError> out;
  add_geometry_errors(c, out);

  require(out, c.material.E_GPa > 0.0, "material.E_GPa", "must be > 0");
  require(out, c.material.nu >= 0.0 && c.material.nu < 0.5, "material.nu", "must be in [0, 0.5)");
  require(out, c.material.rho_kg_per_um3 > 0.0, "material.rho_kg_per_um3", "must be > 0");

  const auto& m = c.model;
  require(out, m.stiffness_calibration > 0.0, "model.c_k", "must be > 0");
  require(out, m.sweep_step_V > 0.0, "model.sweep_step_V", "must be > 0");
  require(out, m.detection_interval > 0 && m.detection_interval % 2 == 0, "model.detection_interval",
          "must be a positive even number of load cycles");
  require(out,
          m.reference_cycles > 0 && m.detection_interval > 0 &&
              m.reference_cycles % m.detection_interval == 0,
          "model.reference_cycles", "must be a positive multiple of model.detection_interval");
  require(out, m.drop_fraction > 0.0 && m.drop_fraction < 1.0, "model.drop_fraction",
          "must be in (0, 1)");
  require(out, m.collapse_fraction > 0.0 && m.collapse_fraction < 1.0, "model.collapse_fraction",
          "must be in (0, 1)");
  require(out, m.drive_frequency_Hz > 0.0, "model.drive_frequency_Hz", "must be > 0");

  const auto& d = c.damage;
  if (d.mode == DamageMode::calibrate) {
    require(out, d.target_fatigue_limit_V > 0.0, "damage.target_VD_V", "must be > 0");
    require(out, d.target_immediate_V > d.target_fatigue_limit_V, "damage.target_immediate_V",
            "must exceed damage.target_VD_V");
  } else {
    require(out, d.basquin_coefficient_MPa > 0.0, "damage.basquin_coefficient_MPa", "must be > 0");
    require(out, d.basquin_exponent < 0.0, "damage.basquin_exponent", "must be < 0");
    require(out, d.endurance_MPa >= 0.0, "damage.endurance_MPa", "must be >= 0");
  }
  require(out, d.shape.hardening_amplitude >= 0.0, "damage.hardening_amplitude", "must be >= 0");
  require(out, d.shape.softening_exponent > 0.0, "damage.softening_exponent", "must be > 0");
  require(out, d.shape.hardening_onset > 0.0 && d.shape.hardening_onset < d.shape.collapse_threshold,
          "damage.hardening_onset", "must satisfy 0 < onset < collapse_threshold");
  require(out, d.shape.collapse_threshold <= 1.0, "damage.collapse_threshold", "must be <= 1");

  const auto& k = c.campaign;
  require(out, !k.levels_V.empty(), "campaign.levels_V", "must list at least one level");
  require(out, k.step_V > 0.0, "campaign.step_V", "must be > 0");
  require(out,
          std::any_of(k.levels_V.begin(), k.levels_V.end(),
                      [&](double l) { return std::abs(l - k.start_V) <= 1e-9 * std::max(1.0, std::abs(l)); }),
          "campaign.start_V", "must be one of campaign.levels_V");
  require(out, k.specimens >= 1 || !k.strengths_V.empty(), "campaign.specimens", "must be >= 1");
  require(out, k.strength_std_V >= 0.0, "campaign.strength_std_V", "must be >= 0");

  require(out, c.recovery.true_std_V >= 0.0, "recovery.true_std_V", "must be >= 0");
  require(out, c.recovery.specimens >= 1, "recovery.specimens", "must be >= 1");
  require(out, c.recovery.replications >= 1, "recovery.replications", "must be >= 1");
  return out;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::vector<FieldError> errors;
  std::set<std::string> seen;
  std::size_t line_no = 0;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({"line " + std::to_string(line_no), "expected 'key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.path == key; });
    if (it == table.end()) {
      errors.push_back({key, "unknown key"});
      continue;
    }
    if (!seen.insert(key).second) {
      errors.push_back({key, "set more than once"});
      continue;
    }
    if (auto err = it->set(config, value)) errors.push_back({key, *err});
  }

  // Range checks only make sense once every value parsed.
  if (errors.empty()) errors = check_config(config);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return config;
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    const auto block = f.path.substr(0, f.path.find('.'));
    if (block != section) {
      if (!section.empty()) out += '\n';
      out += "# " + block + '\n';
      section = block;
    }
    out += f.path + " = " + f.get(config) + '\n';
  }
  return out;
}

Device build_device(const RunConfig& c) {
  const auto mat = Material::from_config_units(c.material.E_GPa, c.material.nu,
                                               c.material.rho_kg_per_um3);
  return make_device(to_si(c.geometry), mat, c.model.stiffness_calibration);
}

ProtocolSettings build_settings(const RunConfig& c) {
  ProtocolSettings s;
  s.sweep_step = c.model.sweep_step_V;
  s.detection_interval = c.model.detection_interval;
  s.reference_cycles = c.model.reference_cycles;
  s.rule.drop_fraction = c.model.drop_fraction;
  s.rule.collapse_fraction = c.model.collapse_fraction;
  return s;
}

DamageModelParams build_damage_params(const RunConfig& c, const Device& device) {
  if (c.damage.mode == DamageMode::calibrate) {
    return calibrate_defaults(device, c.damage.target_fatigue_limit_V, c.damage.target_immediate_V,
                              build_settings(c), c.damage.shape);
  }
  DamageModelParams p;
  p.basquin_coefficient = c.damage.basquin_coefficient_MPa * 1.0e6;
  p.basquin_exponent = c.damage.basquin_exponent;
  p.endurance_stress = c.damage.endurance_MPa * 1.0e6;
  p.hardening_amplitude = c.damage.shape.hardening_amplitude;
  p.hardening_onset = c.damage.shape.hardening_onset;
  p.collapse_threshold = c.damage.shape.collapse_threshold;
  p.softening_exponent = c.damage.shape.softening_exponent;
  if (auto v = validate(p); !v.empty()) {
    throw ConfigError({FieldError{"damage", v.front()}});
  }
  return p;
}

}  // namespace microfatigue
