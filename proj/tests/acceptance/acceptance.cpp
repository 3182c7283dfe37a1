// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "microfatigue/cli.hpp"
#include "microfatigue/damage.hpp"
#include "microfatigue/device_model.hpp"
#include "microfatigue/electromech.hpp"
#include "microfatigue/fatigue_stats.hpp"
#include "microfatigue/loading.hpp"
#include "microfatigue/protocols.hpp"
#include "microfatigue/units.hpp"
#include "oracles.hpp"

using namespace microfatigue;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) why << what;
      ok = false;
    }
  }
};

double round1(double x) { return std::round(x * 10.0) / 10.0; }

// ---------------------------------------------------------------------------

Check reference_sequence() {
  Check c;
  const std::vector<LevelOutcome> seq{{15, 1}, {14, 1}, {13, 0}, {14, 1}, {13, 1}, {12, 0}};
  const auto t0 = Clock::now();
  const auto e = dixon_mood(seq, 1.0);
  const double elapsed = seconds_since(t0);
  c.expect(e.mean == 13.0, "mean != 13.0");
  c.expect(round1(e.quantile_10) == 12.3, "q10 does not round to 12.3");
  c.expect(round1(e.quantile_90) == 13.7, "q90 does not round to 13.7");
  c.expect(elapsed < 1e-3, "runtime >= 1 ms");
  c.why << " mu=" << e.mean << " q10=" << e.quantile_10 << " q90=" << e.quantile_90
        << " t=" << elapsed * 1e6 << "us";
  return c;
}

Check cycle_doubling() {
  Check c;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::uint64_t> n(0, 1'000'000'000'000ULL);
  for (int i = 0; i < 100000; ++i) {
    const auto v = n(rng);
    if (load_cycles_from_voltage_cycles(v) != 2 * v) {
      c.expect(false, "2N mismatch at N=" + std::to_string(v));
      break;
    }
  }
  c.expect(load_cycles_from_voltage_cycles(1'000'000'000'000ULL) == 2'000'000'000'000ULL,
           "2N mismatch at 1e12");
  const auto spec = make_load_cycle(10.0);
  constexpr int kSamplesPerPeriod = 997;
  for (int k = 1; k <= 50; ++k) {
    std::vector<double> s;
    const int m = k * kSamplesPerPeriod;
    s.reserve(m + 1);
    for (int i = 0; i <= m; ++i) {
      s.push_back(waveform(spec.voltage_period * i / kSamplesPerPeriod, spec));
    }
    const auto maxima = oracle::count_local_maxima(s);
    if (maxima != static_cast<std::size_t>(2 * k)) {
      c.expect(false, "K=" + std::to_string(k) + " gave " + std::to_string(maxima) + " maxima");
      break;
    }
  }
  return c;
}

Check pull_in_oracle() {
  Check c;
  const auto t0 = Clock::now();
  double worst_v = 0.0;
  double worst_x = 0.0;
  auto probe = [&](const Device& d) {
    const auto& m = d.mechanics;
    const double g = d.geometry.gap;
    const double formula = std::sqrt(8.0 * m.suspension_stiffness * g * g * g /
                                      (27.0 * units::kVacuumPermittivity * m.effective_area));
    const auto sweep = pull_in_sweep(d);
    worst_v = std::max(worst_v, std::abs(sweep.voltage - formula));
    worst_x = std::max(worst_x, std::abs(sweep.deflection_at_instability / (g / 3.0) - 1.0));
  };
  const auto nominal = nominal_device();
  probe(nominal);
  const double nominal_sweep = pull_in_sweep(nominal).voltage;
  c.expect(std::abs(nominal_sweep - 26.4) < 0.05, "nominal pull-in not near 26.4 V");

  std::mt19937_64 rng(77);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  for (int i = 0; i < 100; ++i) {
    GeometryMicrons g;
    g.specimen_length = u(30, 80);
    g.specimen_width = u(5, 15);
    g.specimen_thickness = u(1.0, 3.0);
    g.plate_length = u(300, 500);
    g.plate_width = u(120, 240);
    g.plate_thickness = u(3, 6);
    g.gap = u(1.5, 5);
    g.hole_side = u(5, 25);
    g.hole_count = static_cast<int>(u(0, 40));
    const auto mat = Material::from_config_units(u(60, 140), u(0.2, 0.45), u(5e-15, 2.5e-14));
    probe(make_device(to_si(g), mat, u(0.5, 4.0)));
  }
  const double elapsed = seconds_since(t0);
  c.expect(worst_v <= 1e-2, "sweep deviates > 1e-2 V");
  c.expect(worst_x <= 1e-2, "instability deflection off g/3 by > 1%");
  c.expect(elapsed < 1.0, "runtime >= 1 s");
  c.why << " nominal=" << nominal_sweep << "V max|dV|=" << worst_v << " max|dx|=" << worst_x
        << " t=" << elapsed << "s";
  return c;
}

Check resonance() {
  Check c;
  const double f1 = natural_frequency(nominal_device().mechanics);
  const double f37 = natural_frequency(nominal_device(kResonanceCalibratedStiffness).mechanics);
  c.expect(f1 >= 10e3 && f1 <= 20e3, "c_k=1 frequency outside [10, 20] kHz");
  c.expect(std::abs(f37 / 28e3 - 1.0) <= 0.05, "c_k=3.7 frequency not within 5% of 28 kHz");
  c.why << " f0(1)=" << f1 << "Hz f0(3.7)=" << f37 << "Hz";
  return c;
}

Check phenomenology() {
  Check c;
  const auto device = nominal_device();
  const auto params = calibrate_defaults(device);
  const ProtocolSettings settings;
  const auto t0 = Clock::now();
  std::map<double, FatigueRunRecord> runs;
  for (double va : {0.0, 13.0, 14.0, 15.0, 21.0, 22.5}) {
    runs[va] = run_fatigue_test(va, {}, device, params, settings);
  }
  const double elapsed = seconds_since(t0);

  for (double va : {0.0, 13.0}) {
    const auto& r = runs[va];
    const double v0 = r.detections.front().pull_in;
    bool flat = true;
    for (const auto& d : r.detections) flat = flat && d.pull_in == v0;
    c.expect(r.outcome == RunOutcome::survived, "control run did not survive");
    c.expect(r.final_cycles() == settings.reference_cycles, "control run stopped early");
    c.expect(flat, "control run pull-in changed");
  }
  for (double va : {21.0, 22.5}) {
    const auto& r = runs[va];
    c.expect(r.outcome == RunOutcome::failed, "high-amplitude run did not fail");
    c.expect(r.final_cycles() <= settings.detection_interval, "high-amplitude run outlived one interval");
  }
  const double onset_pull_in = run_pull_in_detection(
      DamageState{params.hardening_onset, 0, false, false}, device, params, settings.sweep_step);
  for (double va : {14.0, 15.0}) {
    const auto& r = runs[va];
    c.expect(r.outcome == RunOutcome::failed, "intermediate run did not fail");
    c.expect(r.final_cycles() < settings.reference_cycles, "intermediate run reached reference");
    double peak = 0.0;
    for (std::size_t i = 1; i < r.detections.size(); ++i) peak = std::max(peak, r.detections[i].pull_in);
    c.expect(peak > onset_pull_in, "no hardening bump");
    const auto n = r.detections.size();
    c.expect(n >= 2 && r.detections[n - 1].pull_in <= 0.8 * r.detections[n - 2].pull_in,
             "final drop < 20%");
    c.why << " " << va << "V:fail@" << r.final_cycles() << ",peak=" << peak;
  }
  c.expect(elapsed < 5.0, "runtime >= 5 s");
  c.why << " onset=" << onset_pull_in << "V t=" << elapsed << "s";
  return c;
}

Check displacement_guard() {
  Check c;
  const auto device = nominal_device();
  auto slow = calibrate_defaults(device);
  slow.softening_exponent = 4.0;
  slow.hardening_amplitude = 0.0;
  slow.endurance_stress = 0.0;
  slow.basquin_exponent = -0.1;
  slow.basquin_coefficient = alternating_stress(20.0, device) / std::pow(3.0e6, slow.basquin_exponent);
  ProtocolSettings settings;
  settings.reference_cycles = 4'000'000;
  const auto r = run_fatigue_test(20.0, {}, device, slow, settings);
  c.expect(r.outcome == RunOutcome::invalid_displacement_imposed, "outcome is not invalid");
  c.expect(r.outcome != RunOutcome::failed, "outcome is failed");
  c.expect(r.detections.back().pull_in <= 20.0, "pull-in never reached the drive");
  c.why << " outcome=" << to_string(r.outcome) << " at " << r.final_cycles()
        << " cycles, pull-in=" << r.detections.back().pull_in << "V";
  return c;
}

Check recovery() {
  Check c;
  const auto t0 = Clock::now();
  const auto s = estimator_recovery_trial(13.0, 0.55, 6, 200, 1);
  const double elapsed = seconds_since(t0);
  c.expect(s.estimated > 0, "no replication produced an estimate");
  c.expect(std::abs(s.mean_bias) < 0.3, "|mean bias| >= 0.3 V");
  c.expect(elapsed < 10.0, "runtime >= 10 s");
  c.why << " bias=" << s.mean_bias << "V estimated=" << s.estimated << "/" << s.replications
        << " t=" << elapsed << "s";
  return c;
}

Check basquin() {
  Check c;
  constexpr double kExponent = -0.12;
  constexpr double kCoefficient = 45.0;
  auto level_at = [](double n) { return kCoefficient * std::pow(n, kExponent); };
  std::vector<double> lives;
  for (double e = 3.0; e <= 7.0; e += 0.25) lives.push_back(std::pow(10.0, e));

  std::vector<WohlerPoint> clean;
  for (double n : lives) {
    const auto cycles = static_cast<std::uint64_t>(std::llround(n));
    clean.push_back({level_at(static_cast<double>(cycles)), cycles, false});
  }
  const auto exact = fit_basquin(clean);
  c.expect(std::abs(exact.exponent - kExponent) <= 1e-6, "noiseless exponent off by > 1e-6");

  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 0.05);
    std::vector<WohlerPoint> noisy;
    for (double n : lives) {
      const double observed = n * (1.0 + z(rng));
      noisy.push_back({level_at(n), static_cast<std::uint64_t>(std::llround(observed)), false});
    }
    const auto fit = fit_basquin(noisy);
    worst = std::max(worst, std::abs(fit.exponent / kExponent - 1.0));
  }
  c.expect(worst <= 0.05, "noisy exponent off by > 5%");
  c.why << " noiseless|db|=" << std::abs(exact.exponent - kExponent) << " noisy max rel=" << worst;
  return c;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream f(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    files[fs::relative(entry.path(), root).string()] = ss.str();
  }
  return files;
}

Check determinism() {
  Check c;
  const auto base = fs::temp_directory_path() / "microfatigue_acceptance_det";
  const auto out = base / "bundle";
  fs::remove_all(base);
  std::vector<std::map<std::string, std::string>> bundles;
  for (const char* threads : {"1", "4", "1"}) {
    fs::remove_all(out);
    std::ostringstream so;
    std::ostringstream se;
    const int code = cli_dispatch({"microfatigue", "--seed", "424242", "--threads", threads, "--out",
                                   out.string(), "staircase"},
                                  so, se);
    c.expect(code == kExitOk || code == kExitRuntime, "staircase exited with " + std::to_string(code));
    bundles.push_back(snapshot(out));
  }
  fs::remove_all(base);
  c.expect(!bundles[0].empty() && bundles[0].count("campaign.json") && bundles[0].count("staircase.csv"),
           "bundle incomplete");
  c.expect(bundles[0] == bundles[1], "threads=1 and threads=4 bundles differ");
  c.expect(bundles[0] == bundles[2], "repeated threads=1 bundles differ");
  c.why << " files=" << bundles[0].size();
  return c;
}

Check algebra() {
  Check c;
  std::mt19937_64 rng(31337);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::bernoulli_distribution coin(0.5);
  int checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<LevelOutcome> seq;
    int level = 0;
    for (int i = 0; i < 10; ++i) {
      const int o = coin(rng) ? 1 : 0;
      seq.push_back({static_cast<double>(level), o});
      level += o ? -1 : 1;
    }
    const bool mixed = std::any_of(seq.begin(), seq.end(), [](auto& t) { return t.outcome == 1; }) &&
                       std::any_of(seq.begin(), seq.end(), [](auto& t) { return t.outcome == 0; });
    if (!mixed) continue;
    ++checked;
    const auto e = dixon_mood(seq, 1.0);
    const double a = u(0.1, 10.0);
    const double b = u(-50.0, 50.0);
    auto mapped = seq;
    for (auto& t : mapped) t.level = a * t.level + b;
    const auto m = dixon_mood(mapped, a);
    const double scale = 1.0 + std::abs(m.mean);
    worst = std::max({worst, std::abs(m.mean - (a * e.mean + b)) / scale,
                      std::abs(m.std_dev - a * e.std_dev) / (a * (1.0 + e.std_dev))});
    c.expect(m.basis_event == e.basis_event, "basis event changed under affine map");
    if (m.quantile_90 - m.mean <= std::abs(m.mean)) {
      c.expect(m.quantile_10 + m.quantile_90 == 2.0 * m.mean, "quantiles not symmetric about the mean");
    } else {
      const double ulps = 4.0 * std::numeric_limits<double>::epsilon() *
                          (std::abs(m.quantile_10) + std::abs(m.quantile_90));
      c.expect(std::abs(m.quantile_10 + m.quantile_90 - 2.0 * m.mean) <= ulps,
               "quantiles not symmetric about a near-zero mean");
    }

    // power-of-two scaling is exact in floating point
    auto doubled = seq;
    for (auto& t : doubled) t.level *= 2.0;
    const auto d = dixon_mood(doubled, 2.0);
    c.expect(d.mean == 2.0 * e.mean && d.std_dev == 2.0 * e.std_dev, "doubling not exact");
  }
  c.expect(worst <= 1e-13, "affine map deviates beyond rounding");

  for (int i = 0; i < 10000; ++i) {
    const double smax = u(0.0, 1e9);
    const auto t = fatigue_parameters_from_extremes(smax, 0.0, LoadSide::tension);
    c.expect(t.mean_stress == t.alternating_stress, "tension sigma_m != sigma_a");
    c.expect(t.stress_ratio.value == 0.0 && !t.stress_ratio.infinite, "tension R != 0");
    c.expect(t.max_stress == t.mean_stress + t.alternating_stress, "sigma_max != sigma_m + sigma_a");
    c.expect(t.min_stress == t.mean_stress - t.alternating_stress, "sigma_min != sigma_m - sigma_a");
  }
  const auto device = nominal_device();
  for (int i = 0; i < 200; ++i) {
    const double va = u(0.0, 26.0);
    const auto p = fatigue_parameters(va, device);
    c.expect(p.tension.mean_stress == p.tension.alternating_stress, "device tension sigma_m != sigma_a");
    c.expect(p.tension.stress_ratio.value == 0.0 && !p.tension.stress_ratio.infinite,
             "device tension R != 0");
    c.expect(p.compression.stress_ratio.infinite || va == 0.0, "compression R not infinite");
  }
  c.why << " sequences=" << checked << " max rel affine err=" << worst;
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"1 reference stair-case reproduction", reference_sequence},
      {"2 cycle doubling", cycle_doubling},
      {"3 pull-in solver oracle", pull_in_oracle},
      {"4 resonance sanity", resonance},
      {"5 fatigue-run phenomenology", phenomenology},
      {"6 displacement-imposed guard", displacement_guard},
      {"7 estimator recovery", recovery},
      {"8 basquin fit", basquin},
      {"9 staircase determinism", determinism},
      {"10 affine and stress-ratio identities", algebra},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Check r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.ok = false;
      r.why << "exception: " << e.what();
    }
    if (!r.ok) ++failures;
    std::cout << (r.ok ? "PASS " : "FAIL ") << name << " :" << r.why.str() << "\n";
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
