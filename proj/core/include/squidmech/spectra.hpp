#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "squidmech/mechanics_model.hpp"
#include "squidmech/squid_model.hpp"

namespace squidmech {

struct SpectrumMeta {
  BiasPoint bias;
  std::uint64_t seed = 0;
  int n_avg = 1;
  double probe_power_W = 0.0;
  double stabilizer_power_W = 0.0;
};

/// Frequency-indexed PSD (Hz, V^2/Hz).
struct SpectrumTrace {
  std::vector<double> freqs;
  std::vector<double> psd;
  int n_avg = 1;
  SpectrumMeta meta;

  /// Equal lengths, strictly increasing freqs, psd >= 0.
  void validate() const;
};

struct LorentzFit {
  double center = 0.0;  ///< Hz
  double fwhm = 0.0;    ///< Hz
  double area = 0.0;    ///< V^2
  double floor = 0.0;   ///< V^2/Hz
  double center_error = 0.0;
  double fwhm_error = 0.0;
  double area_error = 0.0;
  double floor_error = 0.0;
  double red_chisq = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Area-normalized Lorentzian on a flat floor:
///   floor + (2 area / pi) * fwhm / (4 (f - center)^2 + fwhm^2)
[[nodiscard]] double lorentzian(double f, double center, double fwhm, double area, double floor);

[[nodiscard]] SpectrumTrace lorentzian_psd(std::span<const double> freq_grid, double center,
                                           double fwhm, double area, double floor);

struct ThermalNoiseConfig {
  double temperature_K = 0.085;
  double transduction_gain = 4.5e6;   ///< V/m
  double floor = 1e-13;               ///< V^2/Hz
  int n_avg = 100;
  std::uint64_t seed = 1;
  std::optional<double> omega_m;      ///< rad/s; string.omega0 when absent
};

/// Expected PSD is lorentzian_psd(center = Omega_m/2pi, fwhm = Gamma_m/2pi,
/// area = gain^2 <x^2>); every bin is multiplied by an independent
/// Gamma(n_avg, 1/n_avg) variate. Deterministic for a given seed.
[[nodiscard]] SpectrumTrace synth_thermal_spectrum(const StringParams& string,
                                                   const ThermalNoiseConfig& noise,
                                                   std::span<const double> freq_grid);

/// Uniform grid of `bins` points covering center +- half_span.
[[nodiscard]] std::vector<double> centered_grid(double center, double half_span, std::size_t bins);

/// Damped least-squares Lorentzian fit. Without `init` the start comes from
/// the data: peak bin, half-maximum crossings and the median of the outer
/// bins. Throws NoPeakError for a flat trace, DomainError when the trace
/// spans fewer than five linewidths. A fit that hits the iteration cap is
/// returned with converged = false.
[[nodiscard]] LorentzFit fit_lorentzian(const SpectrumTrace& trace,
                                        const std::optional<LorentzFit>& init = std::nullopt);

[[nodiscard]] double q_factor(double center, double fwhm);

}  // namespace squidmech
