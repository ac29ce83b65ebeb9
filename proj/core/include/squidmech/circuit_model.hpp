#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "squidmech/constants.hpp"
#include "squidmech/squid_model.hpp"

namespace squidmech {

/// Lumped LC resonator shorted by the SQUID inductance. Rates in rad/s.
struct ResonatorParams {
  double L_H = 0.0;
  double C_F = 0.0;
  double kappa_int = 0.0;
  double kappa_ext = 0.0;

  [[nodiscard]] double kappa() const { return kappa_int + kappa_ext; }
  void validate() const;

  bool operator==(const ResonatorParams&) const = default;
};

/// omega_c = 1 / sqrt(C (L + L_J)).
[[nodiscard]] double cavity_frequency(const ResonatorParams& res, double lj_H);

/// cavity_frequency with L_J taken from the SQUID at phi_b.
[[nodiscard]] double cavity_frequency_at_flux(const ResonatorParams& res, const SquidParams& squid,
                                              double phi_b);

/// Targets for a two-point calibration of the lumped model.
struct CalibrationTargets {
  double omega_max = 2.0 * constants::pi * 7.45e9;
  double omega_min = 2.0 * constants::pi * 6.6e9;
  double lj_min_H = 0.36e-9;
  double phi_edge = 0.45 * constants::pi;  ///< flux at which omega_min is reached
  double alpha = 0.01;
  double kappa_total = 2.0 * constants::pi * 2.5e6;
  double kappa_ext_fraction = 0.5;

  bool operator==(const CalibrationTargets&) const = default;
};

/// Solves for (L, C) so that omega_c(L_J(0)) = omega_max and
/// omega_c(L_J(phi_edge)) = omega_min, with L_J(phi) = lj_min / S0(phi).
/// Throws CalibrationError when no positive solution exists.
[[nodiscard]] ResonatorParams calibrate_lc(const CalibrationTargets& targets);
[[nodiscard]] ResonatorParams calibrate_lc(double omega_max, double omega_min, double lj_min_H,
                                           double phi_edge, double alpha);

/// Side-coupled notch: S21 = 1 - (kappa_ext/2) / (i (omega - omega_c) + kappa/2).
[[nodiscard]] std::complex<double> s21(double omega, const ResonatorParams& res, double omega_c);

/// |S21|^2 over a (phi_b, omega) grid, row-major with one row per phi_b.
struct FluxMap {
  std::vector<double> phi_b;
  std::vector<double> omega;
  std::vector<double> s21_sq;

  [[nodiscard]] double at(std::size_t phi_index, std::size_t omega_index) const {
    return s21_sq[phi_index * omega.size() + omega_index];
  }
  /// Frequency (rad/s) of the transmission minimum in row `phi_index`.
  [[nodiscard]] double dip_frequency(std::size_t phi_index) const;
};

[[nodiscard]] FluxMap flux_sweep_map(const ResonatorParams& res, const SquidParams& squid,
                                     std::span<const double> phi_grid,
                                     std::span<const double> omega_grid, unsigned threads = 1);

}  // namespace squidmech
