#pragma once

#include <cstdint>
#include <vector>

#include "squidmech/circuit_model.hpp"
#include "squidmech/constants.hpp"
#include "squidmech/squid_model.hpp"

namespace squidmech {

/// Flux-lock loop settings. Flux quantities are in units of Phi_0.
struct LockConfig {
  double dt_s = 0.01;
  double tau_s = 10.0;            ///< drift mean-reversion time
  double sigma_phi0 = 0.005;      ///< stationary drift std
  double detuning_hz = 500e3;     ///< stabilizer tone above omega_c(setpoint)
  double kp = 0.2;
  double ki = 0.8;
  double setpoint_phi_b = 0.1 * constants::pi;
  std::size_t steps = 100000;
  std::uint64_t seed = 1;
  double sensor_noise = 0.0;      ///< additive std on the error signal

  void validate() const;

  bool operator==(const LockConfig&) const = default;
};

struct LockRecord {
  double drift = 0.0;
  double correction = 0.0;
  double residual = 0.0;
  double error_signal = 0.0;
};

struct LockSummary {
  double open_loop_rms = 0.0;
  double closed_loop_rms = 0.0;
  double suppression_factor = 0.0;
  double discriminant_gain = 0.0;  ///< d(error signal)/d(flux) at the setpoint, per Phi_0
  std::size_t warmup_steps = 0;
};

struct LockResult {
  std::vector<LockRecord> trace;
  LockSummary summary;
};

/// Ornstein-Uhlenbeck flux drift starting at zero:
///   x_{n+1} = x_n e^{-dt/tau} + sigma sqrt(1 - e^{-2 dt/tau}) xi_n
[[nodiscard]] std::vector<double> drift_process(const LockConfig& config, std::size_t steps);

/// Transmission of the stabilizer tone as a flux discriminator. The tone
/// sits at omega_c(setpoint) + 2 pi detuning; the signal is the change of
/// |S21|^2 there relative to its value at the setpoint.
class ErrorSignal {
 public:
  ErrorSignal(const LockConfig& config, const ResonatorParams& res, const SquidParams& squid);

  /// Deviation for a total flux (units of Phi_0).
  [[nodiscard]] double operator()(double total_flux_phi0) const;
  [[nodiscard]] double setpoint_flux() const { return setpoint_flux_; }
  /// Central-difference slope at the setpoint (per Phi_0).
  [[nodiscard]] double discriminant_gain() const;

 private:
  [[nodiscard]] double transmission(double total_flux_phi0) const;

  ResonatorParams res_;
  SquidParams squid_;
  double setpoint_flux_;
  double omega_stab_;
  double reference_;
};

[[nodiscard]] double error_signal(double total_flux_phi0, const LockConfig& config,
                                  const ResonatorParams& res, const SquidParams& squid);

/// Closed-loop run. Each step measures the error signal for the current
/// residual, updates the PI state and applies the new correction on the
/// next step. RMS summaries skip a warm-up of 10 tau. Throws
/// LockDivergenceError when a block of residuals exceeds 10 sigma RMS, and
/// DomainError when the discriminant gain vanishes.
[[nodiscard]] LockResult run_lock(const LockConfig& config, const ResonatorParams& res,
                                  const SquidParams& squid);

}  // namespace squidmech
