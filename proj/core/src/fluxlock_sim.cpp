#include "squidmech/fluxlock_sim.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "squidmech/errors.hpp"
#include "squidmech/estimation.hpp"

namespace squidmech {

using constants::pi;

void LockConfig::validate() const {
  if (!(dt_s > 0.0)) throw DomainError("lock: dt must be positive");
  if (!(tau_s > 0.0)) throw DomainError("lock: tau must be positive");
  if (!(sigma_phi0 >= 0.0)) throw DomainError("lock: drift sigma must be non-negative");
  if (!(sensor_noise >= 0.0)) throw DomainError("lock: sensor noise must be non-negative");
  if (steps < 1) throw DomainError("lock: run length must be at least one step");
}

std::vector<double> drift_process(const LockConfig& config, std::size_t steps) {
  config.validate();
  std::vector<double> series(steps, 0.0);
  if (config.sigma_phi0 == 0.0) return series;
  const double decay = std::exp(-config.dt_s / config.tau_s);
  const double kick = config.sigma_phi0 * std::sqrt(1.0 - decay * decay);
  std::mt19937_64 rng(derive_seed(config.seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  double x = 0.0;
  for (std::size_t n = 0; n < steps; ++n) {
    x = x * decay + kick * normal(rng);
    series[n] = x;
  }
  return series;
}

ErrorSignal::ErrorSignal(const LockConfig& config, const ResonatorParams& res,
                         const SquidParams& squid)
    : res_(res), squid_(squid), setpoint_flux_(config.setpoint_phi_b / pi) {
  omega_stab_ = cavity_frequency_at_flux(res_, squid_, pi * setpoint_flux_) +
                2.0 * pi * config.detuning_hz;
  reference_ = transmission(setpoint_flux_);
}

double ErrorSignal::transmission(double total_flux_phi0) const {
  const double wc = cavity_frequency_at_flux(res_, squid_, pi * total_flux_phi0);
  return std::norm(s21(omega_stab_, res_, wc));
}

double ErrorSignal::operator()(double total_flux_phi0) const {
  return transmission(total_flux_phi0) - reference_;
}

double ErrorSignal::discriminant_gain() const {
  constexpr double h = 1e-7;
  return ((*this)(setpoint_flux_ + h) - (*this)(setpoint_flux_ - h)) / (2.0 * h);
}

double error_signal(double total_flux_phi0, const LockConfig& config, const ResonatorParams& res,
                    const SquidParams& squid) {
  return ErrorSignal(config, res, squid)(total_flux_phi0);
}

namespace {

double rms_after(const std::vector<LockRecord>& trace, std::size_t warmup, bool residual) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t n = warmup; n < trace.size(); ++n) {
    const double v = residual ? trace[n].residual : trace[n].drift;
    sum += v * v;
    ++count;
  }
  return count > 0 ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

}  // namespace

LockResult run_lock(const LockConfig& config, const ResonatorParams& res, const SquidParams& squid) {
  config.validate();
  const ErrorSignal sensor(config, res, squid);
  const double gain = sensor.discriminant_gain();
  if (!(std::abs(gain) > 0.0) || !std::isfinite(gain)) {
    throw DomainError("run_lock: discriminant gain vanishes at the setpoint");
  }

  const std::vector<double> drift = drift_process(config, config.steps);
  std::mt19937_64 sensor_rng(derive_seed(config.seed, 1));
  std::normal_distribution<double> sensor_noise(0.0, 1.0);

  LockResult result;
  result.trace.resize(config.steps);
  double correction = 0.0;
  double integral = 0.0;
  constexpr std::size_t block = 1000;
  double block_sum = 0.0;
  for (std::size_t n = 0; n < config.steps; ++n) {
    LockRecord& rec = result.trace[n];
    rec.drift = drift[n];
    rec.correction = correction;
    rec.residual = rec.drift - rec.correction;
    double signal = sensor(sensor.setpoint_flux() + rec.residual);
    if (config.sensor_noise > 0.0) signal += config.sensor_noise * sensor_noise(sensor_rng);
    rec.error_signal = signal;

    const double flux_error = signal / gain;
    integral += flux_error;
    correction = config.kp * flux_error + config.ki * integral;

    block_sum += rec.residual * rec.residual;
    if ((n + 1) % block == 0 || n + 1 == config.steps) {
      const std::size_t len = n % block + 1;
      const double block_rms = std::sqrt(block_sum / static_cast<double>(len));
      if (!std::isfinite(block_rms) ||
          (config.sigma_phi0 > 0.0 && block_rms > 10.0 * config.sigma_phi0)) {
        std::ostringstream msg;
        msg << "run_lock: controller diverged near step " << n << " (residual rms " << block_rms
            << " Phi0, kp = " << config.kp << ", ki = " << config.ki
            << ", discriminant gain = " << gain << " per Phi0)";
        throw LockDivergenceError(msg.str());
      }
      block_sum = 0.0;
    }
  }

  auto& s = result.summary;
  s.discriminant_gain = gain;
  const auto warmup = static_cast<std::size_t>(std::ceil(10.0 * config.tau_s / config.dt_s));
  s.warmup_steps = warmup < config.steps ? warmup : 0;
  s.open_loop_rms = rms_after(result.trace, s.warmup_steps, false);
  s.closed_loop_rms = rms_after(result.trace, s.warmup_steps, true);
  if (s.closed_loop_rms > 0.0) {
    s.suppression_factor = s.open_loop_rms / s.closed_loop_rms;
  } else {
    s.suppression_factor = s.open_loop_rms > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return result;
}

}  // namespace squidmech
