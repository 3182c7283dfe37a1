#include "microfatigue/io.hpp"

#include <charconv>
#include <json.hpp>
#include <stdexcept>

namespace microfatigue {

namespace {

using nlohmann::ordered_json;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = s.find(sep);
    parts.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n')) {
    l = strip_cr(l);
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

double to_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("malformed number '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t to_count(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("malformed count '" + std::string(s) + "'");
  }
  return v;
}

// nlohmann prints doubles in shortest round-trip form; route them through the
// fixed-precision formatter first so JSON and CSV agree.
double rounded(double v) { return to_double(format_number(v)); }

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  std::string s(buf, end);
  if (s == "-0") s = "0";
  return s;
}

std::string emit_fatigue_run(const FatigueRunRecord& r) {
  std::string out = "# va_V=" + format_number(r.drive_amplitude) +
                    ",outcome=" + to_string(r.outcome) +
                    ",reference_cycles=" + std::to_string(r.reference_cycles) +
                    ",detection_interval=" + std::to_string(r.detection_interval) + '\n';
  out += "load_cycles,pullin_V\n";
  for (const auto& d : r.detections) {
    out += std::to_string(d.load_cycles) + ',' + format_number(d.pull_in) + '\n';
  }
  return out;
}

FatigueRunRecord parse_fatigue_run(std::string_view csv) {
  const auto rows = lines(csv);
  if (rows.size() < 2 || rows[0].substr(0, 2) != "# ") {
    throw std::runtime_error("fatigue run CSV: missing comment header");
  }
  FatigueRunRecord r;
  for (auto item : split(rows[0].substr(2), ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw std::runtime_error("fatigue run CSV: bad header item");
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "va_V") {
      r.drive_amplitude = to_double(value);
    } else if (key == "outcome") {
      auto o = run_outcome_from_string(std::string(value));
      if (!o) throw std::runtime_error("fatigue run CSV: unknown outcome");
      r.outcome = *o;
    } else if (key == "reference_cycles") {
      r.reference_cycles = to_count(value);
    } else if (key == "detection_interval") {
      r.detection_interval = to_count(value);
    }
  }
  if (rows[1] != "load_cycles,pullin_V") throw std::runtime_error("fatigue run CSV: bad column header");
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const auto cols = split(rows[i], ',');
    if (cols.size() != 2) throw std::runtime_error("fatigue run CSV: expected two columns");
    r.detections.push_back(Detection{to_count(cols[0]), to_double(cols[1])});
  }
  return r;
}

std::string emit_curve(const std::vector<EquilibriumPoint>& curve) {
  std::string out = "voltage_V,deflection_um,stress_MPa\n";
  for (const auto& p : curve) {
    out += format_number(p.voltage) + ',' + format_number(p.deflection * 1.0e6) + ',' +
           format_number(p.specimen_stress / 1.0e6) + '\n';
  }
  return out;
}

std::string emit_stair_case(const StairCaseSequence& seq, const SpecimenPopulation& population) {
  std::string out = "specimen,level_V,outcome,run_outcome,cycles,strength_V\n";
  for (const auto& t : seq.trials) {
    const std::size_t idx = t.specimen_id - 1;
    const std::string strength = idx < population.strength_voltages.size()
                                     ? format_number(population.strength_voltages[idx])
                                     : std::string();
    out += std::to_string(t.specimen_id) + ',' + format_number(t.level) + ',' +
           std::to_string(t.outcome) + ',' + to_string(t.run_outcome) + ',' +
           std::to_string(t.cycles) + ',' + strength + '\n';
  }
  return out;
}

std::vector<WohlerPoint> parse_wohler_points(std::string_view csv) {
  const auto rows = lines(csv);
  std::vector<WohlerPoint> out;
  std::size_t first = 0;
  while (first < rows.size() && rows[first].front() == '#') ++first;
  if (first >= rows.size()) throw std::runtime_error("Wohler CSV: no header");
  const auto header = rows[first];
  const bool stair_case = header.rfind("specimen,level_V,outcome,run_outcome,cycles", 0) == 0;
  if (!stair_case && header != "level_V,cycles,censored") {
    throw std::runtime_error("Wohler CSV: unrecognised header '" + std::string(header) + "'");
  }
  for (std::size_t i = first + 1; i < rows.size(); ++i) {
    const auto cols = split(rows[i], ',');
    if (stair_case) {
      if (cols.size() < 5) throw std::runtime_error("stair-case CSV: short row");
      const auto outcome = run_outcome_from_string(std::string(cols[3]));
      if (!outcome) throw std::runtime_error("stair-case CSV: unknown run outcome");
      if (*outcome == RunOutcome::invalid_displacement_imposed) continue;
      out.push_back(WohlerPoint{to_double(cols[1]), to_count(cols[4]),
                                *outcome == RunOutcome::survived});
    } else {
      if (cols.size() != 3) throw std::runtime_error("Wohler CSV: expected three columns");
      out.push_back(WohlerPoint{to_double(cols[0]), to_count(cols[1]), to_count(cols[2]) != 0});
    }
  }
  return out;
}

std::string emit_wohler_points(const std::vector<WohlerPoint>& points) {
  std::string out = "level_V,cycles,censored\n";
  for (const auto& p : points) {
    out += format_number(p.level) + ',' + std::to_string(p.cycles) + ',' +
           (p.censored ? "1" : "0") + '\n';
  }
  return out;
}

std::string estimate_json(const StairCaseEstimate& e) {
  ordered_json j;
  j["mean_V"] = rounded(e.mean);
  j["std_V"] = rounded(e.std_dev);
  j["q10_V"] = rounded(e.quantile_10);
  j["q90_V"] = rounded(e.quantile_90);
  j["basis_event"] = to_string(e.basis_event);
  j["dispersion_valid"] = e.dispersion_formula_valid;
  return j.dump(2) + '\n';
}

std::string basquin_fit_json(const BasquinFit& fit, std::size_t censored_excluded) {
  ordered_json j;
  j["coefficient_V"] = rounded(fit.coefficient);
  j["exponent"] = rounded(fit.exponent);
  j["residual_log_rms"] = rounded(fit.residual);
  j["points_used"] = fit.points_used;
  j["censored_excluded"] = censored_excluded;
  return j.dump(2) + '\n';
}

std::string recovery_json(const RecoverySummary& s, double true_mean, double true_std,
                          std::size_t specimens, std::uint64_t seed) {
  ordered_json j;
  j["true_mean_V"] = rounded(true_mean);
  j["true_std_V"] = rounded(true_std);
  j["specimens"] = specimens;
  j["seed"] = seed;
  j["replications"] = s.replications;
  j["estimated"] = s.estimated;
  j["mean_bias_V"] = rounded(s.mean_bias);
  j["bias_std_V"] = rounded(s.bias_std);
  j["min_estimate_V"] = rounded(s.min_estimate);
  j["max_estimate_V"] = rounded(s.max_estimate);
  return j.dump(2) + '\n';
}

std::string damage_params_json(const DamageModelParams& p) {
  ordered_json j;
  j["basquin_coefficient_MPa"] = rounded(p.basquin_coefficient / 1.0e6);
  j["basquin_exponent"] = rounded(p.basquin_exponent);
  j["endurance_MPa"] = rounded(p.endurance_stress / 1.0e6);
  j["hardening_amplitude"] = rounded(p.hardening_amplitude);
  j["hardening_onset"] = rounded(p.hardening_onset);
  j["collapse_threshold"] = rounded(p.collapse_threshold);
  j["softening_exponent"] = rounded(p.softening_exponent);
  return j.dump(2) + '\n';
}

}  // namespace microfatigue
