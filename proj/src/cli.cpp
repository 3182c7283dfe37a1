#include "microfatigue/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "microfatigue/config.hpp"
#include "microfatigue/errors.hpp"
#include "microfatigue/fatigue_stats.hpp"
#include "microfatigue/io.hpp"
#include "microfatigue/loading.hpp"

namespace microfatigue {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 1;
  bool show_defaults = false;

  double pullin_step = 0.0;
  double curve_vmax = 0.0;
  int curve_points = 51;
  double fatigue_va = 0.0;
  std::optional<double> fatigue_strength;
  std::string wohler_input;
  std::optional<std::uint64_t> recovery_replications;
  std::optional<std::uint64_t> recovery_specimens;
};

struct Context {
  RunConfig config;
  Device device;
  ProtocolSettings settings;
  DamageModelParams params;
  fs::path out_dir;
  unsigned threads = 1;
};

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << contents;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string defaults_text() {
  RunConfig defaults;
  std::string text = serialize_config(defaults);
  const Device device = build_device(defaults);
  const DamageModelParams p = build_damage_params(defaults, device);
  text += "\n# calibrated damage parameters (damage.mode = calibrate)\n";
  text += "#   basquin_coefficient_MPa = " + format_number(p.basquin_coefficient / 1e6) + '\n';
  text += "#   basquin_exponent = " + format_number(p.basquin_exponent) + '\n';
  text += "#   endurance_MPa = " + format_number(p.endurance_stress / 1e6) + '\n';
  return text;
}

int cmd_pullin(const Context& ctx, const Options& opt, std::ostream& out) {
  const double step = opt.pullin_step > 0.0 ? opt.pullin_step : ctx.settings.sweep_step;
  const auto closed = pull_in_closed_form(ctx.device);
  const auto sweep = pull_in_sweep(ctx.device, step);
  out << "closed_form_V = " << format_number(closed.voltage) << '\n'
      << "sweep_V = " << format_number(sweep.voltage) << '\n'
      << "difference_V = " << format_number(sweep.voltage - closed.voltage) << '\n'
      << "instability_deflection_um = " << format_number(sweep.deflection_at_instability * 1e6)
      << '\n'
      << "gap_third_um = " << format_number(ctx.device.geometry.gap / 3.0 * 1e6) << '\n'
      << "natural_frequency_Hz = " << format_number(natural_frequency(ctx.device.mechanics))
      << '\n';
  return kExitOk;
}

int cmd_curve(const Context& ctx, const Options& opt, std::ostream& out) {
  const double pull_in = pull_in_closed_form(ctx.device).voltage;
  const double vmax = opt.curve_vmax > 0.0 ? opt.curve_vmax : 0.95 * pull_in;
  if (vmax >= pull_in) {
    throw DomainError("--vmax must stay below pull-in (" + format_number(pull_in) + " V)");
  }
  const auto curve = stress_conversion_curve(ctx.device, vmax, opt.curve_points);
  const auto path = ctx.out_dir / "curve.csv";
  write_file(path, emit_curve(curve));
  out << "wrote " << path.string() << " (" << curve.size() << " points)\n";
  return kExitOk;
}

int cmd_fatigue(const Context& ctx, const Options& opt, std::ostream& out) {
  const SpecimenStrength specimen =
      opt.fatigue_strength ? strength_for_voltage(*opt.fatigue_strength, ctx.device, ctx.params)
                           : SpecimenStrength{};
  const auto record = run_fatigue_test(opt.fatigue_va, specimen, ctx.device, ctx.params, ctx.settings);
  const auto cycle = make_load_cycle(opt.fatigue_va, ctx.config.model.drive_frequency_Hz);
  out << "va_V = " << format_number(opt.fatigue_va) << '\n'
      << "outcome = " << to_string(record.outcome) << '\n'
      << "final_load_cycles = " << record.final_cycles() << '\n'
      << "final_voltage_cycles = " << record.final_cycles() / 2 << '\n'
      << "elapsed_s = "
      << format_number(static_cast<double>(record.final_cycles()) * cycle.load_period) << '\n';
  if (ctx.config.output.csv) {
    const auto path = ctx.out_dir / "fatigue_run.csv";
    write_file(path, emit_fatigue_run(record));
    out << "wrote " << path.string() << '\n';
  }
  return kExitOk;
}

int cmd_staircase(const Context& ctx, std::ostream& out, std::ostream& err) {
  const auto& c = ctx.config.campaign;
  const SpecimenPopulation population =
      c.strengths_V.empty()
          ? make_population(c.seed, c.strength_mean_V, c.strength_std_V, c.specimens, ctx.device,
                            ctx.params, ctx.threads)
          : population_from_strengths(c.strengths_V, ctx.device, ctx.params);
  const auto seq = run_stair_case(c.levels_V, c.step_V, c.start_V, population, ctx.device,
                                  ctx.params, ctx.settings);
  for (const auto& e : seq.clamp_events) err << "clamp: " << e << '\n';
  for (const auto& e : seq.errors) err << "error: " << e << '\n';

  write_file(ctx.out_dir / "resolved_config.txt", serialize_config(ctx.config));
  if (ctx.config.output.csv) {
    write_file(ctx.out_dir / "staircase.csv", emit_stair_case(seq, population));
    for (std::size_t i = 0; i < seq.runs.size(); ++i) {
      const auto name = "specimen_" + std::to_string(seq.trials[i].specimen_id) + ".csv";
      write_file(ctx.out_dir / "runs" / name, emit_fatigue_run(seq.runs[i]));
    }
  }

  std::optional<StairCaseEstimate> estimate;
  std::string estimate_error;
  try {
    estimate = dixon_mood(seq);
  } catch (const EstimationError& e) {
    estimate_error = e.what();
  }

  if (ctx.config.output.json) {
    nlohmann::ordered_json summary;
    summary["tool"] = kToolName;
    summary["version"] = kToolVersion;
    summary["seed"] = c.seed;
    summary["population"] = c.strengths_V.empty() ? "random" : "explicit";
    summary["convention"] = dixon_mood_convention();
    summary["trials"] = seq.trials.size();
    summary["failures"] = std::count_if(seq.trials.begin(), seq.trials.end(),
                                        [](const auto& t) { return t.outcome == 1; });
    summary["estimate"] = estimate ? nlohmann::ordered_json::parse(estimate_json(*estimate))
                                   : nlohmann::ordered_json(nullptr);
    if (!estimate) summary["estimate_error"] = estimate_error;
    summary["damage"] = nlohmann::ordered_json::parse(damage_params_json(ctx.params));
    summary["clamp_events"] = seq.clamp_events;
    summary["errors"] = seq.errors;
    write_file(ctx.out_dir / "campaign.json", summary.dump(2) + '\n');
    if (estimate) write_file(ctx.out_dir / "estimate.json", estimate_json(*estimate));
  }

  for (const auto& t : seq.trials) {
    out << "specimen " << t.specimen_id << ": " << format_number(t.level) << " V -> "
        << t.outcome << " (" << to_string(t.run_outcome) << ")\n";
  }
  if (!estimate) {
    err << estimate_error << '\n';
    return kExitRuntime;
  }
  out << "mean_V = " << format_number(estimate->mean) << '\n'
      << "std_V = " << format_number(estimate->std_dev) << '\n'
      << "q10_V = " << format_number(estimate->quantile_10) << '\n'
      << "q90_V = " << format_number(estimate->quantile_90) << '\n'
      << "basis_event = " << to_string(estimate->basis_event) << '\n';
  return kExitOk;
}

int cmd_wohler(const Context& ctx, const Options& opt, std::ostream& out) {
  const fs::path input =
      opt.wohler_input.empty() ? ctx.out_dir / "staircase.csv" : fs::path(opt.wohler_input);
  const auto points = parse_wohler_points(read_file(input));
  const auto fit = fit_basquin(points);
  const auto censored = static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const auto& p) { return p.censored; }));
  out << "coefficient_V = " << format_number(fit.coefficient) << '\n'
      << "exponent = " << format_number(fit.exponent) << '\n'
      << "residual_log_rms = " << format_number(fit.residual) << '\n'
      << "points_used = " << fit.points_used << '\n'
      << "censored_excluded = " << censored << '\n';
  if (ctx.config.output.csv) write_file(ctx.out_dir / "wohler_points.csv", emit_wohler_points(points));
  if (ctx.config.output.json) write_file(ctx.out_dir / "wohler_fit.json", basquin_fit_json(fit, censored));
  return kExitOk;
}

int cmd_recovery(const Context& ctx, const Options& opt, std::ostream& out) {
  const auto& r = ctx.config.recovery;
  const auto& c = ctx.config.campaign;
  const std::size_t reps = opt.recovery_replications.value_or(r.replications);
  const std::size_t specimens = opt.recovery_specimens.value_or(r.specimens);
  RecoveryDesign design{c.levels_V, c.step_V, c.start_V};
  const auto summary = estimator_recovery_trial(r.true_mean_V, r.true_std_V, specimens, reps,
                                                c.seed, design, ctx.threads);
  out << "replications = " << summary.replications << '\n'
      << "estimated = " << summary.estimated << '\n'
      << "mean_bias_V = " << format_number(summary.mean_bias) << '\n'
      << "bias_std_V = " << format_number(summary.bias_std) << '\n';
  if (ctx.config.output.json) {
    write_file(ctx.out_dir / "recovery.json",
               recovery_json(summary, r.true_mean_V, r.true_std_V, specimens, c.seed));
  }
  return kExitOk;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("MICROFATIGUE_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::uint64_t v = 0;
  const std::string_view s(raw);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError({FieldError{"MICROFATIGUE_SEED", "expected a non-negative integer"}});
  }
  return v;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Virtual fatigue rig for electrostatically actuated gold MEMS specimens",
               "microfatigue"};
  app.add_option("--config", opt.config_path, "Run configuration file (key.path = value)");
  app.add_option("--seed", opt.seed, "Master seed (falls back to MICROFATIGUE_SEED)");
  app.add_option("--out", opt.out_dir, "Output directory (overrides output.directory)");
  app.add_option("--threads", opt.threads, "Worker threads for population and recovery work")
      ->check(CLI::Range(1u, 256u));
  app.add_flag("--show-defaults", opt.show_defaults, "Print the default configuration and exit");

  auto* pullin = app.add_subcommand("pullin", "Pristine pull-in voltage, closed form and sweep");
  pullin->add_option("--step", opt.pullin_step, "DC sweep step in volts");
  auto* curve = app.add_subcommand("curve", "Voltage-to-stress conversion curve (CSV)");
  curve->add_option("--vmax", opt.curve_vmax, "Upper voltage (default 0.95 x pull-in)");
  curve->add_option("--points", opt.curve_points, "Number of points")->check(CLI::Range(2, 100000));
  auto* fatigue = app.add_subcommand("fatigue", "One constant-amplitude fatigue run (CSV)");
  fatigue->add_option("--va", opt.fatigue_va, "Drive amplitude in volts")->required();
  fatigue->add_option("--strength", opt.fatigue_strength,
                      "Specimen endurance in volts (default: calibrated fatigue limit)");
  app.add_subcommand("staircase", "Stair-case campaign with Dixon-Mood estimate");
  auto* wohler = app.add_subcommand("wohler", "Basquin fit from stair-case or Wohler CSV");
  wohler->add_option("--input", opt.wohler_input, "CSV input (default <out>/staircase.csv)");
  auto* recovery = app.add_subcommand("recovery", "Seeded estimator recovery trials");
  recovery->add_option("--replications", opt.recovery_replications, "Replications");
  recovery->add_option("--specimens", opt.recovery_specimens, "Specimens per stair-case");
  app.require_subcommand(0, 1);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (opt.show_defaults) {
      out << defaults_text();
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      err << "no subcommand given\n" << app.help();
      return kExitUsage;
    }

    Context ctx;
    if (!opt.config_path.empty()) {
      std::string text;
      try {
        text = read_file(opt.config_path);
      } catch (const std::exception& e) {
        throw ConfigError({FieldError{"--config", e.what()}});
      }
      ctx.config = parse_config(text);
    }
    if (opt.seed) {
      ctx.config.campaign.seed = *opt.seed;
    } else if (auto s = env_seed()) {
      ctx.config.campaign.seed = *s;
    }
    if (!opt.out_dir.empty()) ctx.config.output.directory = opt.out_dir;
    ctx.out_dir = ctx.config.output.directory;
    ctx.threads = opt.threads;

    try {
      ctx.device = build_device(ctx.config);
      ctx.settings = build_settings(ctx.config);
      ctx.params = build_damage_params(ctx.config, ctx.device);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError({FieldError{"damage", e.what()}});
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
      if (name == "pullin") return cmd_pullin(ctx, opt, out);
      if (name == "curve") return cmd_curve(ctx, opt, out);
      if (name == "fatigue") return cmd_fatigue(ctx, opt, out);
      if (name == "staircase") return cmd_staircase(ctx, out, err);
      if (name == "wohler") return cmd_wohler(ctx, opt, out);
      if (name == "recovery") return cmd_recovery(ctx, opt, out);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitRuntime;
    }
    err << "unknown subcommand " << name << '\n' << app.help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace microfatigue
