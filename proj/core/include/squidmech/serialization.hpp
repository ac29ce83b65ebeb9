#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "squidmech/circuit_model.hpp"
#include "squidmech/estimation.hpp"
#include "squidmech/fluxlock_sim.hpp"
#include "squidmech/mechanics_model.hpp"
#include "squidmech/spectra.hpp"
#include "squidmech/squid_model.hpp"

namespace squidmech {

// Every physical key carries its SI unit. Frequencies are in Hz here and
// converted to angular frequency when the model structs are built.

struct StringConfig {
  double m_r_kg = 0.6e-15;
  double f0_Hz = 5.8e6;
  double gamma_Hz = 20.0;
  double length_m = 20e-6;
  double width_m = 0.2e-6;
  double thickness_m = 0.11e-6;
  double rho_kg_m3 = 2700.0;

  [[nodiscard]] StringParams params() const;
  bool operator==(const StringConfig&) const = default;
};

struct ResonatorConfig {
  double f_max_Hz = 7.45e9;
  double f_min_Hz = 6.6e9;
  double lj_min_H = 0.36e-9;
  double phi_edge_over_pi = 0.45;
  double kappa_Hz = 2.5e6;
  double kappa_ext_fraction = 0.5;

  [[nodiscard]] CalibrationTargets targets(double alpha) const;
  bool operator==(const ResonatorConfig&) const = default;
};

struct BiasConfig {
  double phi_over_pi = 0.0;
  double b_ip_T = 0.035;
  double b_oop_T = 0.0;

  [[nodiscard]] BiasPoint point() const;
  bool operator==(const BiasConfig&) const = default;
};

struct SpectrumConfig {
  double gain_V_per_m = 4.5e6;
  double floor_V2_per_Hz = 1e-13;
  int n_avg = 100;
  int bins = 401;
  double half_span_fwhm = 10.0;   ///< grid covers center +- this many linewidths
  double probe_power_W = 2e-15;
  double stabilizer_power_W = 1e-15;

  bool operator==(const SpectrumConfig&) const = default;
};

struct SweepConfig {
  double phi_over_pi_min = -1.0;
  double phi_over_pi_max = 1.0;
  int phi_points = 201;
  double f_min_Hz = 6.4e9;
  double f_max_Hz = 7.6e9;
  int f_points = 241;

  bool operator==(const SweepConfig&) const = default;
};

struct TuneConfig {
  std::vector<double> b_ip_T{0.0062, 0.035};
  double phi_over_pi_min = -0.45;
  double phi_over_pi_max = 0.45;
  int points = 25;
  double noise_Hz = 0.0;            ///< Gaussian noise added to emitted Omega_m/2pi
  double s_min = default_s_min;
  std::optional<double> e_j_J;      ///< derived from the SQUID critical current when absent
  bool use_labusch = false;         ///< Omega_0 per field from the Labusch model

  bool operator==(const TuneConfig&) const = default;
};

struct LabuschConfig {
  double alpha_l_ref_N_m4 = 7.88e14;
  double b_ref_T = 0.035;
  double k = 1.81;

  bool operator==(const LabuschConfig&) const = default;
};

struct LockSettings {
  double dt_s = 0.01;
  double tau_s = 10.0;
  double sigma_phi0 = 0.005;
  double detuning_Hz = 500e3;
  double kp = 0.2;
  double ki = 0.8;
  double setpoint_phi_over_pi = 0.1;
  std::uint64_t steps = 100000;
  double sensor_noise = 0.0;

  [[nodiscard]] LockConfig config(std::uint64_t seed) const;
  bool operator==(const LockSettings&) const = default;
};

/// Full parameter tree read by every command.
struct RunConfig {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  SquidParams squid;
  StringConfig string;
  ResonatorConfig resonator;
  BiasConfig bias;
  double temperature_K = 0.085;
  SpectrumConfig spectrum;
  SweepConfig sweep;
  TuneConfig tune;
  LabuschConfig labusch;
  LockSettings lock;

  [[nodiscard]] double e_j() const;
  [[nodiscard]] LabuschModel labusch_model() const;
  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError on unknown keys or wrong value types. Missing keys keep
/// their defaults.
[[nodiscard]] RunConfig parse_run_config(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const RunConfig& config);

[[nodiscard]] nlohmann::json to_json(const SquidParams& params);
[[nodiscard]] SquidParams squid_params_from_json(const nlohmann::json& j);

/// Keys: L_H, C_F, kappa_int_Hz, kappa_ext_Hz.
[[nodiscard]] nlohmann::json to_json(const ResonatorParams& res);
[[nodiscard]] ResonatorParams resonator_params_from_json(const nlohmann::json& j);

/// {"params", "stderr", "cov", "red_chisq", "iterations", "converged", "message"}
[[nodiscard]] nlohmann::json to_json(const FitReport& report);
[[nodiscard]] nlohmann::json to_json(const PowerLawFit& fit);
[[nodiscard]] nlohmann::json to_json(const LorentzFit& fit);
[[nodiscard]] nlohmann::json to_json(const LockSummary& summary);
[[nodiscard]] nlohmann::json to_json(const SpectrumMeta& meta);

}  // namespace squidmech
