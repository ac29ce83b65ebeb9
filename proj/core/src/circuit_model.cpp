#include "squidmech/circuit_model.hpp"

#include <algorithm>
#include <cmath>

#include "squidmech/errors.hpp"
#include "squidmech/parallel.hpp"

namespace squidmech {

namespace {

void require_increasing(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw DomainError(std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw DomainError(std::string(what) + " grid must be strictly increasing");
    }
  }
}

}  // namespace

void ResonatorParams::validate() const {
  if (!(L_H > 0.0) || !(C_F > 0.0)) throw DomainError("resonator: L and C must be positive");
  if (!(kappa_int >= 0.0)) throw DomainError("resonator: kappa_int must be non-negative");
  if (!(kappa_ext > 0.0)) throw DomainError("resonator: kappa_ext must be positive");
}

double cavity_frequency(const ResonatorParams& res, double lj_H) {
  if (lj_H < 0.0) throw DomainError("cavity_frequency: negative Josephson inductance");
  if (std::isinf(lj_H)) return 0.0;
  return 1.0 / std::sqrt(res.C_F * (res.L_H + lj_H));
}

double cavity_frequency_at_flux(const ResonatorParams& res, const SquidParams& squid, double phi_b) {
  return cavity_frequency(res, josephson_inductance(squid, phi_b));
}

ResonatorParams calibrate_lc(const CalibrationTargets& t) {
  if (!(t.omega_max > t.omega_min) || !(t.omega_min > 0.0)) {
    throw CalibrationError("calibrate_lc: need omega_max > omega_min > 0");
  }
  if (!(t.lj_min_H > 0.0)) throw CalibrationError("calibrate_lc: lj_min must be positive");
  const double s_edge = s0(t.phi_edge, t.alpha);
  if (!(s_edge > 0.0)) throw CalibrationError("calibrate_lc: S0(phi_edge) must be positive");
  const double lj_edge = t.lj_min_H / s_edge;
  if (!(lj_edge > t.lj_min_H)) {
    throw CalibrationError("calibrate_lc: phi_edge gives no inductance change");
  }

  // C (L + Lj) = 1 / omega^2 at both endpoints.
  const double inv_max = 1.0 / (t.omega_max * t.omega_max);
  const double inv_min = 1.0 / (t.omega_min * t.omega_min);
  const double c = (inv_min - inv_max) / (lj_edge - t.lj_min_H);
  const double l = inv_max / c - t.lj_min_H;
  if (!(c > 0.0) || !(l > 0.0)) {
    throw CalibrationError("calibrate_lc: endpoints admit no positive (L, C)");
  }
  if (!(t.kappa_total > 0.0) || !(t.kappa_ext_fraction > 0.0 && t.kappa_ext_fraction <= 1.0)) {
    throw CalibrationError("calibrate_lc: invalid linewidth split");
  }
  ResonatorParams res;
  res.L_H = l;
  res.C_F = c;
  res.kappa_ext = t.kappa_total * t.kappa_ext_fraction;
  res.kappa_int = t.kappa_total - res.kappa_ext;
  return res;
}

ResonatorParams calibrate_lc(double omega_max, double omega_min, double lj_min_H, double phi_edge,
                             double alpha) {
  CalibrationTargets t;
  t.omega_max = omega_max;
  t.omega_min = omega_min;
  t.lj_min_H = lj_min_H;
  t.phi_edge = phi_edge;
  t.alpha = alpha;
  return calibrate_lc(t);
}

std::complex<double> s21(double omega, const ResonatorParams& res, double omega_c) {
  const std::complex<double> denom(0.5 * res.kappa(), omega - omega_c);
  return 1.0 - 0.5 * res.kappa_ext / denom;
}

double FluxMap::dip_frequency(std::size_t phi_index) const {
  const auto row = s21_sq.begin() + static_cast<std::ptrdiff_t>(phi_index * omega.size());
  const auto it = std::min_element(row, row + static_cast<std::ptrdiff_t>(omega.size()));
  return omega[static_cast<std::size_t>(it - row)];
}

FluxMap flux_sweep_map(const ResonatorParams& res, const SquidParams& squid,
                       std::span<const double> phi_grid, std::span<const double> omega_grid,
                       unsigned threads) {
  require_increasing(phi_grid, "flux");
  require_increasing(omega_grid, "frequency");
  FluxMap map;
  map.phi_b.assign(phi_grid.begin(), phi_grid.end());
  map.omega.assign(omega_grid.begin(), omega_grid.end());
  map.s21_sq.resize(phi_grid.size() * omega_grid.size());
  const std::size_t n_omega = omega_grid.size();
  parallel_for(phi_grid.size(), threads, [&](std::size_t i) {
    const double wc = cavity_frequency_at_flux(res, squid, phi_grid[i]);
    for (std::size_t j = 0; j < n_omega; ++j) {
      map.s21_sq[i * n_omega + j] = std::norm(s21(omega_grid[j], res, wc));
    }
  });
  return map;
}

}  // namespace squidmech
