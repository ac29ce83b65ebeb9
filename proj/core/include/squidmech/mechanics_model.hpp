#pragma once

#include <span>
#include <vector>

#include "squidmech/circuit_model.hpp"
#include "squidmech/constants.hpp"
#include "squidmech/squid_model.hpp"

namespace squidmech {

/// Suspended nanostring. Angular frequencies in rad/s.
struct StringParams {
  double m_r_kg = 0.6e-15;
  double omega0 = 2.0 * constants::pi * 5.8e6;
  double gamma_m = 2.0 * constants::pi * 20.0;
  double length_m = 20e-6;
  double width_m = 0.2e-6;
  double thickness_m = 0.11e-6;
  double rho_kg_m3 = 2700.0;

  [[nodiscard]] double q_factor() const { return omega0 / gamma_m; }
  [[nodiscard]] double geometric_mass() const {
    return rho_kg_m3 * length_m * width_m * thickness_m;
  }
  /// All positive, Q > 1, geometric mass >= effective mass.
  void validate() const;

  bool operator==(const StringParams&) const = default;
};

/// Flux-line pinning stiffness alpha_L(B) = prefactor * B^exponent (N/m^4).
struct LabuschModel {
  double omega00 = 2.0 * constants::pi * 5.8e6;
  double prefactor = 0.0;
  double exponent = 2.0;

  [[nodiscard]] double alpha_l(double b_T) const;
  /// prefactor >= 0 and 1 <= exponent <= 3.
  void validate() const;

  /// Model whose alpha_L equals `alpha_l_ref` at `b_ref_T`.
  [[nodiscard]] static LabuschModel from_reference(double omega00, double alpha_l_ref,
                                                   double b_ref_T, double exponent);
};

inline constexpr double default_s_min = 0.05;

/// Closed-form Lorentz-force shift of Omega^2 (rad^2/s^2):
///   4 E_J pi^2 B^2 l^2 lambda^2 (1 - a^2) [cos^4 - a^2 sin^4] / (m_r Phi_0^2 S0^3)
/// Throws DomainError when S0 < s_min.
[[nodiscard]] double spring_shift(const StringParams& string, const SquidParams& squid,
                                  const BiasPoint& bias, double e_j, double s_min = default_s_min);

/// sqrt(Omega_0^2 + spring_shift). Throws InstabilityError when Omega_m^2 <= 0.
[[nodiscard]] double mechanical_frequency(const StringParams& string, const SquidParams& squid,
                                          const BiasPoint& bias, double e_j,
                                          double s_min = default_s_min);

/// Same shift computed from the two-junction potential: minimize over phi_plus,
/// second central difference in x at x = 0, divided by m_r. The step is
/// 1e-3 Phi_0 of transduced flux. E_J enters through the junction energies,
/// so e_j rescales the SQUID critical current.
[[nodiscard]] double numeric_spring_shift(const StringParams& string, const SquidParams& squid,
                                          const BiasPoint& bias, double e_j,
                                          double s_min = default_s_min);

/// sqrt(omega00^2 + alpha_L(B) / rho).
[[nodiscard]] double labusch_frequency(const LabuschModel& model, const StringParams& string,
                                       double b_ip_T);

[[nodiscard]] double zero_point_fluctuation(double m_r_kg, double omega);
[[nodiscard]] double zero_point_fluctuation(const StringParams& string);

struct ThermalScales {
  double mean_square_displacement = 0.0;  ///< m^2
  double occupation = 0.0;
};

[[nodiscard]] ThermalScales thermal_scales(double m_r_kg, double omega, double temperature_K);
[[nodiscard]] ThermalScales thermal_scales(const StringParams& string, double temperature_K);

/// g0 = |d omega_c / d Phi_b| * B_IP l lambda * x_zpf (rad/s).
[[nodiscard]] double vacuum_coupling_estimate(const ResonatorParams& res, const SquidParams& squid,
                                              const StringParams& string, const BiasPoint& bias);

struct TuningPoint {
  double phi_b = 0.0;
  double b_ip_T = 0.0;
  double omega_m = 0.0;
};

/// Omega_m over the (b_ip, phi_b) grid, ordered by field then flux.
/// `omega0_of_field` may be empty; otherwise it supplies Omega_0 per field.
[[nodiscard]] std::vector<TuningPoint> tuning_sweep(const StringParams& string,
                                                    const SquidParams& squid, double e_j,
                                                    std::span<const double> phi_grid,
                                                    std::span<const double> field_grid,
                                                    std::span<const double> omega0_of_field = {},
                                                    double s_min = default_s_min,
                                                    unsigned threads = 1);

}  // namespace squidmech
