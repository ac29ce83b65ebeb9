#pragma once

#include "squidmech/constants.hpp"

namespace squidmech {

/// dc-SQUID with one effective suspended string in its loop.
struct SquidParams {
  double i0_A = constants::flux_quantum / (4.0 * constants::pi * 0.36e-9);  ///< average critical current
  double alpha = 0.01;   ///< junction asymmetry, I1 = i0(1-alpha), I2 = i0(1+alpha)
  double l_m = 20e-6;    ///< string length
  double lambda = 0.9;   ///< mode shape factor

  [[nodiscard]] double i1() const { return i0_A * (1.0 - alpha); }
  [[nodiscard]] double i2() const { return i0_A * (1.0 + alpha); }

  /// Throws DomainError unless i0 > 0, 0 <= alpha < 1, l > 0, 0 < lambda <= 1.
  void validate() const;

  bool operator==(const SquidParams&) const = default;
};

/// Operating point. phi_b = pi * Phi_b / Phi_0 (radians).
struct BiasPoint {
  double phi_b = 0.0;
  double b_ip_T = 0.0;
  double b_oop_T = 0.0;

  void validate() const;

  bool operator==(const BiasPoint&) const = default;
};

/// sqrt(cos^2 phi_b + alpha^2 sin^2 phi_b). Bounded in [alpha, 1], pi-periodic.
[[nodiscard]] double s0(double phi_b, double alpha);

/// Average Josephson energy hbar (I1 + I2) / 4e.
[[nodiscard]] double josephson_energy(double i1_A, double i2_A);
[[nodiscard]] double josephson_energy(const SquidParams& params);

/// Critical current that gives `lj_min` at zero flux.
[[nodiscard]] double critical_current_for_inductance(double lj_min_H);

/// Phi_0 / (4 pi i0 S0). Throws SingularityError when S0 vanishes (below 1e-12).
[[nodiscard]] double josephson_inductance(const SquidParams& params, double phi_b);

/// Flux change per unit string displacement, B_IP * l * lambda (Wb/m).
[[nodiscard]] double flux_transduction(const SquidParams& params, double b_ip_T);

/// Two-junction potential energy (J) with zero loop inductance:
///   E = -E_J1 cos(phi_plus + delta/2) - E_J2 cos(phi_plus - delta/2)
///   delta = 2 phi_b + 2 pi B_IP l lambda x / Phi_0
[[nodiscard]] double squid_potential(double phi_plus, double x_m, const BiasPoint& bias,
                                     const SquidParams& params);

struct PotentialMinimum {
  double phi_plus = 0.0;
  double energy = 0.0;
  int iterations = 0;
};

/// Numerical minimum of squid_potential over phi_plus in [-pi, pi]: coarse
/// scan to bracket, then golden-section search down to `tolerance`.
[[nodiscard]] PotentialMinimum minimize_potential(double x_m, const BiasPoint& bias,
                                                  const SquidParams& params,
                                                  double tolerance = 1e-12);

/// Circulating current dE_min/dPhi_b = i0 (1 - alpha^2) sin(phi_b) cos(phi_b) / S0.
[[nodiscard]] double circulating_current(const SquidParams& params, double phi_b);

/// F = B_IP * l * I.
[[nodiscard]] double lorentz_force(const BiasPoint& bias, const SquidParams& params,
                                   double circulating_current_A);

}  // namespace squidmech
