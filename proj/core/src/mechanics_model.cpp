#include "squidmech/mechanics_model.hpp"

#include <cmath>
#include <string>

#include "squidmech/errors.hpp"
#include "squidmech/parallel.hpp"

namespace squidmech {

using constants::flux_quantum;
using constants::pi;

void StringParams::validate() const {
  const double fields[] = {m_r_kg, omega0, gamma_m, length_m, width_m, thickness_m, rho_kg_m3};
  for (double v : fields) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("string: all parameters must be positive");
  }
  if (!(q_factor() > 1.0)) throw DomainError("string: quality factor must exceed 1");
  if (geometric_mass() < m_r_kg) {
    throw DomainError("string: effective mass exceeds geometric mass rho*l*w*t");
  }
}

double LabuschModel::alpha_l(double b_T) const { return prefactor * std::pow(b_T, exponent); }

void LabuschModel::validate() const {
  if (!(omega00 > 0.0)) throw DomainError("labusch: omega00 must be positive");
  if (!(prefactor >= 0.0)) throw DomainError("labusch: prefactor must be non-negative");
  if (!(exponent >= 1.0 && exponent <= 3.0)) throw DomainError("labusch: exponent outside [1, 3]");
}

LabuschModel LabuschModel::from_reference(double omega00, double alpha_l_ref, double b_ref_T,
                                          double exponent) {
  if (!(b_ref_T > 0.0)) throw DomainError("labusch: reference field must be positive");
  return {omega00, alpha_l_ref / std::pow(b_ref_T, exponent), exponent};
}

double spring_shift(const StringParams& string, const SquidParams& squid, const BiasPoint& bias,
                    double e_j, double s_min) {
  const double a = squid.alpha;
  const double s = s0(bias.phi_b, a);
  if (s < s_min) {
    throw DomainError("spring_shift: S0 = " + std::to_string(s) + " below guard " +
                      std::to_string(s_min));
  }
  const double c = std::cos(bias.phi_b);
  const double sn = std::sin(bias.phi_b);
  const double bracket = c * c * c * c - a * a * sn * sn * sn * sn;
  const double coupling = flux_transduction(squid, bias.b_ip_T);
  return 4.0 * e_j * pi * pi * coupling * coupling * (1.0 - a * a) * bracket /
         (string.m_r_kg * flux_quantum * flux_quantum * s * s * s);
}

double mechanical_frequency(const StringParams& string, const SquidParams& squid,
                            const BiasPoint& bias, double e_j, double s_min) {
  const double omega_sq = string.omega0 * string.omega0 + spring_shift(string, squid, bias, e_j, s_min);
  if (!(omega_sq > 0.0)) {
    throw InstabilityError("mechanical_frequency: Omega_m^2 <= 0 (spring softened past zero)");
  }
  return std::sqrt(omega_sq);
}

double numeric_spring_shift(const StringParams& string, const SquidParams& squid,
                            const BiasPoint& bias, double e_j, double s_min) {
  if (s0(bias.phi_b, squid.alpha) < s_min) {
    throw DomainError("numeric_spring_shift: S0 below guard");
  }
  const double coupling = flux_transduction(squid, bias.b_ip_T);
  if (coupling == 0.0) return 0.0;

  SquidParams scaled = squid;
  scaled.i0_A = e_j * 2.0 * pi / flux_quantum;
  const double h = 1e-3 * flux_quantum / std::abs(coupling);
  const double e_minus = minimize_potential(-h, bias, scaled).energy;
  const double e_zero = minimize_potential(0.0, bias, scaled).energy;
  const double e_plus = minimize_potential(h, bias, scaled).energy;
  return (e_plus - 2.0 * e_zero + e_minus) / (h * h) / string.m_r_kg;
}

double labusch_frequency(const LabuschModel& model, const StringParams& string, double b_ip_T) {
  if (b_ip_T < 0.0) throw DomainError("labusch_frequency: field must be non-negative");
  return std::sqrt(model.omega00 * model.omega00 + model.alpha_l(b_ip_T) / string.rho_kg_m3);
}

double zero_point_fluctuation(double m_r_kg, double omega) {
  if (!(m_r_kg > 0.0) || !(omega > 0.0)) throw DomainError("zero_point_fluctuation: need m, omega > 0");
  return std::sqrt(constants::hbar / (2.0 * m_r_kg * omega));
}

double zero_point_fluctuation(const StringParams& string) {
  return zero_point_fluctuation(string.m_r_kg, string.omega0);
}

ThermalScales thermal_scales(double m_r_kg, double omega, double temperature_K) {
  if (!(temperature_K > 0.0)) throw DomainError("thermal_scales: temperature must be positive");
  const double kt = constants::k_boltzmann * temperature_K;
  return {kt / (m_r_kg * omega * omega), kt / (constants::hbar * omega)};
}

ThermalScales thermal_scales(const StringParams& string, double temperature_K) {
  return thermal_scales(string.m_r_kg, string.omega0, temperature_K);
}

double vacuum_coupling_estimate(const ResonatorParams& res, const SquidParams& squid,
                                const StringParams& string, const BiasPoint& bias) {
  const double coupling = flux_transduction(squid, bias.b_ip_T);
  if (coupling == 0.0) return 0.0;
  // d omega_c / d Phi_b, with phi_b = pi Phi_b / Phi_0.
  const double dflux = 1e-5 * flux_quantum;
  const double dphi = pi * dflux / flux_quantum;
  const double up = cavity_frequency_at_flux(res, squid, bias.phi_b + dphi);
  const double down = cavity_frequency_at_flux(res, squid, bias.phi_b - dphi);
  const double slope = (up - down) / (2.0 * dflux);
  return std::abs(slope) * std::abs(coupling) * zero_point_fluctuation(string);
}

std::vector<TuningPoint> tuning_sweep(const StringParams& string, const SquidParams& squid,
                                      double e_j, std::span<const double> phi_grid,
                                      std::span<const double> field_grid,
                                      std::span<const double> omega0_of_field, double s_min,
                                      unsigned threads) {
  if (!omega0_of_field.empty() && omega0_of_field.size() != field_grid.size()) {
    throw DomainError("tuning_sweep: one Omega_0 per field required");
  }
  const std::size_t n_phi = phi_grid.size();
  std::vector<TuningPoint> out(n_phi * field_grid.size());
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const std::size_t f = idx / n_phi;
    const std::size_t p = idx % n_phi;
    StringParams local = string;
    if (!omega0_of_field.empty()) local.omega0 = omega0_of_field[f];
    const BiasPoint bias{phi_grid[p], field_grid[f], 0.0};
    out[idx] = {phi_grid[p], field_grid[f], mechanical_frequency(local, squid, bias, e_j, s_min)};
  });
  return out;
}

}  // namespace squidmech
