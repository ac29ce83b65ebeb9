#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#ifdef SQUIDMECH_SYSTEM_CLI11
#include <CLI/CLI.hpp>
#else
#include "CLI11.hpp"
#endif
#include "squidmech/circuit_model.hpp"
#include "squidmech/csv.hpp"
#include "squidmech/errors.hpp"
#include "squidmech/estimation.hpp"
#include "squidmech/fluxlock_sim.hpp"
#include "squidmech/mechanics_model.hpp"
#include "squidmech/serialization.hpp"
#include "squidmech/spectra.hpp"
#include "squidmech/svg_plot.hpp"

namespace squidmech::cli {

namespace {

using nlohmann::json;
using constants::pi;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_path;

  // calibrate
  std::optional<double> omega_max_hz;
  std::optional<double> omega_min_hz;
  std::optional<double> lj_min_h;
  std::optional<double> phi_edge_over_pi;
  // sweep, lock
  std::string resonator_path;
  // fits, plot
  std::string in_path;
  std::optional<double> sigma_hz;
  std::string powerlaw_out;
  std::string kind;
  // lock
  std::optional<double> kp;
  std::optional<double> ki;
  std::string summary_path;
};

RunConfig load_config(const Options& opt) {
  RunConfig config;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot open config " + opt.config_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(opt.config_path + ": " + e.what());
    }
    config = parse_run_config(j);
  }
  if (const char* env = std::getenv("SQUIDMECH_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      config.seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("SQUIDMECH_SEED is not an unsigned integer: ") + env);
    }
  }
  if (opt.seed) config.seed = *opt.seed;
  if (opt.threads) config.threads = *opt.threads;
  if (config.threads == 0) config.threads = 1;
  return config;
}

void emit(const Options& opt, std::ostream& out, const std::string& content) {
  if (opt.out_path.empty()) {
    out << content;
  } else {
    write_file_atomic(opt.out_path, content);
  }
}

/// Parameter echo written next to every file export.
void emit_sidecar(const Options& opt, const RunConfig& config, const std::string& command,
                  json extra = json::object()) {
  if (opt.out_path.empty()) return;
  json j = {{"command", command}, {"config", to_json(config)}};
  for (auto& item : extra.items()) j[item.key()] = item.value();
  write_file_atomic(opt.out_path + ".json", j.dump(2) + "\n");
}

ResonatorParams resonator_for(const Options& opt, const RunConfig& config) {
  if (opt.resonator_path.empty()) {
    return calibrate_lc(config.resonator.targets(config.squid.alpha));
  }
  std::ifstream in(opt.resonator_path);
  if (!in) throw ConfigError("cannot open resonator file " + opt.resonator_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(opt.resonator_path + ": " + e.what());
  }
  ResonatorParams res = resonator_params_from_json(j);
  res.validate();
  return res;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("grid needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

int cmd_calibrate(const Options& opt, std::ostream& out) {
  RunConfig config = load_config(opt);
  if (opt.omega_max_hz) config.resonator.f_max_Hz = *opt.omega_max_hz;
  if (opt.omega_min_hz) config.resonator.f_min_Hz = *opt.omega_min_hz;
  if (opt.lj_min_h) config.resonator.lj_min_H = *opt.lj_min_h;
  if (opt.phi_edge_over_pi) config.resonator.phi_edge_over_pi = *opt.phi_edge_over_pi;
  config.squid.validate();
  const ResonatorParams res = calibrate_lc(config.resonator.targets(config.squid.alpha));
  emit(opt, out, to_json(res).dump(2) + "\n");
  return kOk;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const RunConfig config = load_config(opt);
  config.squid.validate();
  const ResonatorParams res = resonator_for(opt, config);
  std::vector<double> phi = linspace(config.sweep.phi_over_pi_min, config.sweep.phi_over_pi_max,
                                     config.sweep.phi_points);
  for (double& p : phi) p *= pi;
  std::vector<double> omega = linspace(config.sweep.f_min_Hz, config.sweep.f_max_Hz, config.sweep.f_points);
  for (double& w : omega) w *= 2.0 * pi;
  const FluxMap map = flux_sweep_map(res, config.squid, phi, omega, config.threads);
  emit(opt, out, to_string(to_csv(map)));
  emit_sidecar(opt, config, "sweep", {{"resonator_params", to_json(res)}});
  return kOk;
}

std::vector<TuningPoint> tuning_points(const RunConfig& config) {
  config.squid.validate();
  const StringParams string = config.string.params();
  string.validate();
  std::vector<double> phi = linspace(config.tune.phi_over_pi_min, config.tune.phi_over_pi_max,
                                     config.tune.points);
  for (double& p : phi) p *= pi;
  std::vector<double> omega0;
  if (config.tune.use_labusch) {
    const LabuschModel model = config.labusch_model();
    for (double b : config.tune.b_ip_T) omega0.push_back(labusch_frequency(model, string, b));
  }
  auto points = tuning_sweep(string, config.squid, config.e_j(), phi, config.tune.b_ip_T, omega0,
                             config.tune.s_min, config.threads);
  if (config.tune.noise_Hz > 0.0) {
    std::mt19937_64 rng(derive_seed(config.seed, 0));
    std::normal_distribution<double> noise(0.0, 2.0 * pi * config.tune.noise_Hz);
    for (auto& p : points) p.omega_m += noise(rng);
  }
  return points;
}

int cmd_tune(const Options& opt, std::ostream& out) {
  const RunConfig config = load_config(opt);
  const auto points = tuning_points(config);
  emit(opt, out, to_string(to_csv(points)));
  emit_sidecar(opt, config, "tune", {{"e_j_J", config.e_j()}});
  return kOk;
}

int cmd_spectrum(const Options& opt, std::ostream& out) {
  const RunConfig config = load_config(opt);
  config.squid.validate();
  const StringParams string = config.string.params();
  string.validate();
  const BiasPoint bias = config.bias.point();
  ThermalNoiseConfig noise;
  noise.temperature_K = config.temperature_K;
  noise.transduction_gain = config.spectrum.gain_V_per_m;
  noise.floor = config.spectrum.floor_V2_per_Hz;
  noise.n_avg = config.spectrum.n_avg;
  noise.seed = config.seed;
  noise.omega_m = mechanical_frequency(string, config.squid, bias, config.e_j(), config.tune.s_min);
  if (config.spectrum.bins < 5) throw ConfigError("spectrum.bins must be at least 5");
  const auto grid = centered_grid(*noise.omega_m / (2.0 * pi),
                                  config.spectrum.half_span_fwhm * config.string.gamma_Hz,
                                  static_cast<std::size_t>(config.spectrum.bins));
  SpectrumTrace trace = synth_thermal_spectrum(string, noise, grid);
  trace.meta.bias = bias;
  trace.meta.probe_power_W = config.spectrum.probe_power_W;
  trace.meta.stabilizer_power_W = config.spectrum.stabilizer_power_W;
  emit(opt, out, to_string(to_csv(trace)));
  emit_sidecar(opt, config, "spectrum",
               {{"meta", to_json(trace.meta)}, {"center_Hz", *noise.omega_m / (2.0 * pi)}});
  return kOk;
}

int cmd_fit_lorentz(const Options& opt, std::ostream& out) {
  if (opt.in_path.empty()) throw ConfigError("fit-lorentz requires --in");
  const SpectrumTrace trace = spectrum_from_csv(read_csv_file(opt.in_path));
  const LorentzFit fit = fit_lorentzian(trace);
  emit(opt, out, to_json(fit).dump(2) + "\n");
  return fit.converged ? kOk : kNonConvergence;
}

int cmd_fit_tune(const Options& opt, std::ostream& out) {
  if (opt.in_path.empty()) throw ConfigError("fit-tune requires --in");
  const RunConfig config = load_config(opt);
  config.squid.validate();
  const auto points = tuning_from_csv(read_csv_file(opt.in_path));
  std::map<double, std::vector<FluxTuningSample>> by_field;
  const double sigma = opt.sigma_hz ? 2.0 * pi * *opt.sigma_hz : 0.0;
  for (const auto& p : points) by_field[p.b_ip_T].push_back({p.phi_b, p.omega_m, sigma});

  json fits = json::array();
  CsvTable powerlaw;
  powerlaw.header = {"b_ip_T", "omega0_hz", "sigma_hz"};
  bool all_converged = true;
  for (const auto& [field, samples] : by_field) {
    FluxTuningFixed fixed;
    fixed.squid = config.squid;
    fixed.string = config.string.params();
    fixed.b_ip_T = field;
    fixed.s_min = config.tune.s_min;
    const FitReport report = fit_flux_tuning(samples, fixed);
    all_converged = all_converged && report.converged;
    fits.push_back({{"b_ip_T", field},
                    {"e_j_J", report.param("e_j")},
                    {"f0_Hz", report.param("omega0") / (2.0 * pi)},
                    {"f0_err_Hz", report.error("omega0") / (2.0 * pi)},
                    {"report", to_json(report)}});
    powerlaw.rows.push_back({field, report.param("omega0") / (2.0 * pi),
                             report.error("omega0") / (2.0 * pi)});
  }
  emit(opt, out, json{{"fits", fits}}.dump(2) + "\n");
  if (!opt.powerlaw_out.empty()) write_file_atomic(opt.powerlaw_out, to_string(powerlaw));
  return all_converged ? kOk : kNonConvergence;
}

int cmd_fit_powerlaw(const Options& opt, std::ostream& out) {
  if (opt.in_path.empty()) throw ConfigError("fit-powerlaw requires --in");
  const RunConfig config = load_config(opt);
  const CsvTable table = read_csv_file(opt.in_path);
  const std::size_t bc = table.column("b_ip_T");
  const std::size_t fc = table.column("omega0_hz");
  const bool weighted = opt.sigma_hz.has_value();
  std::vector<FieldSample> samples;
  for (const auto& row : table.rows) {
    samples.push_back({row[bc], 2.0 * pi * row[fc], weighted ? 2.0 * pi * *opt.sigma_hz : 0.0});
  }
  const PowerLawFit fit = fit_power_law(samples, config.string.rho_kg_m3, config.labusch.b_ref_T);
  emit(opt, out, to_json(fit).dump(2) + "\n");
  return fit.report.converged ? kOk : kNonConvergence;
}

int cmd_lock(const Options& opt, std::ostream& out) {
  RunConfig config = load_config(opt);
  if (opt.kp) config.lock.kp = *opt.kp;
  if (opt.ki) config.lock.ki = *opt.ki;
  config.squid.validate();
  const ResonatorParams res = resonator_for(opt, config);
  const LockResult result = run_lock(config.lock.config(config.seed), res, config.squid);
  if (!opt.out_path.empty()) {
    write_file_atomic(opt.out_path, to_string(to_csv(result)));
    emit_sidecar(opt, config, "lock", {{"summary", to_json(result.summary)}});
  }
  const std::string summary = to_json(result.summary).dump(2) + "\n";
  if (opt.summary_path.empty()) {
    out << summary;
  } else {
    write_file_atomic(opt.summary_path, summary);
  }
  return kOk;
}

int cmd_plot(const Options& opt, std::ostream& out) {
  if (opt.in_path.empty()) throw ConfigError("plot requires --in");
  const CsvTable table = read_csv_file(opt.in_path);
  const PlotKind kind = opt.kind.empty() ? detect_plot_kind(table) : parse_plot_kind(opt.kind);
  emit(opt, out, render_svg(plot_from_csv(table, kind)));
  return kOk;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "JSON parameter file");
  sub->add_option("--seed", opt.seed, "Master seed (overrides config and SQUIDMECH_SEED)");
  sub->add_option("--threads", opt.threads, "Worker threads for sweeps");
  sub->add_option("--out", opt.out_path, "Output file (default: stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Modeling and parameter estimation for SQUID-coupled nanostrings", "squidmech"};
  app.require_subcommand(1);
  Options opt;

  auto* calibrate = app.add_subcommand("calibrate", "Solve the lumped LC model for two frequency endpoints");
  add_common(calibrate, opt);
  calibrate->add_option("--omega-max", opt.omega_max_hz, "Maximum resonance frequency (Hz)");
  calibrate->add_option("--omega-min", opt.omega_min_hz, "Resonance frequency at phi_edge (Hz)");
  calibrate->add_option("--lj-min", opt.lj_min_h, "Josephson inductance at zero flux (H)");
  calibrate->add_option("--phi-edge-over-pi", opt.phi_edge_over_pi, "Flux of the lower endpoint / pi");

  auto* sweep = app.add_subcommand("sweep", "|S21|^2 over flux and frequency (CSV)");
  add_common(sweep, opt);
  sweep->add_option("--resonator", opt.resonator_path, "Calibrated resonator JSON");

  auto* tune = app.add_subcommand("tune", "Mechanical frequency over flux for each in-plane field (CSV)");
  add_common(tune, opt);

  auto* spectrum = app.add_subcommand("spectrum", "Synthetic thermal sideband PSD (CSV)");
  add_common(spectrum, opt);

  auto* fit_lorentz = app.add_subcommand("fit-lorentz", "Lorentzian fit of a spectrum CSV (JSON)");
  add_common(fit_lorentz, opt);
  fit_lorentz->add_option("--in", opt.in_path, "Spectrum CSV")->required();

  auto* fit_tune = app.add_subcommand("fit-tune", "Fit E_J and Omega_0 per field from a tuning CSV (JSON)");
  add_common(fit_tune, opt);
  fit_tune->add_option("--in", opt.in_path, "Tuning CSV")->required();
  fit_tune->add_option("--sigma-hz", opt.sigma_hz, "Per-point frequency uncertainty (Hz)");
  fit_tune->add_option("--powerlaw-out", opt.powerlaw_out, "Write per-field Omega_0 CSV for fit-powerlaw");

  auto* fit_powerlaw = app.add_subcommand("fit-powerlaw", "Labusch power-law fit of Omega_0 vs field (JSON)");
  add_common(fit_powerlaw, opt);
  fit_powerlaw->add_option("--in", opt.in_path, "CSV with b_ip_T,omega0_hz")->required();
  fit_powerlaw->add_option("--sigma-hz", opt.sigma_hz, "Per-point uncertainty (Hz)");

  auto* lock = app.add_subcommand("lock", "Simulate the flux-lock loop");
  add_common(lock, opt);
  lock->add_option("--resonator", opt.resonator_path, "Calibrated resonator JSON");
  lock->add_option("--kp", opt.kp, "Proportional gain");
  lock->add_option("--ki", opt.ki, "Integral gain");
  lock->add_option("--summary", opt.summary_path, "Write the summary JSON here instead of stdout");

  auto* plot = app.add_subcommand("plot", "Render a CSV export as SVG");
  add_common(plot, opt);
  plot->add_option("--in", opt.in_path, "CSV produced by this tool")->required();
  plot->add_option("--kind", opt.kind, "tune, sweep, spectrum or lock (default: from header)");

  std::vector<const char*> argv{"squidmech"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out;
    std::ostringstream cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (calibrate->parsed()) return cmd_calibrate(opt, out);
    if (sweep->parsed()) return cmd_sweep(opt, out);
    if (tune->parsed()) return cmd_tune(opt, out);
    if (spectrum->parsed()) return cmd_spectrum(opt, out);
    if (fit_lorentz->parsed()) return cmd_fit_lorentz(opt, out);
    if (fit_tune->parsed()) return cmd_fit_tune(opt, out);
    if (fit_powerlaw->parsed()) return cmd_fit_powerlaw(opt, out);
    if (lock->parsed()) return cmd_lock(opt, out);
    if (plot->parsed()) return cmd_plot(opt, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace squidmech::cli
