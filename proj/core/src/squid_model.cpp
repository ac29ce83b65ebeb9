#include "squidmech/squid_model.hpp"

#include <cmath>
#include <string>

#include "squidmech/errors.hpp"

namespace squidmech {

using constants::flux_quantum;
using constants::pi;

void SquidParams::validate() const {
  if (!(i0_A > 0.0) || !std::isfinite(i0_A)) throw DomainError("squid: i0 must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("squid: alpha must lie in [0, 1)");
  if (!(l_m > 0.0) || !std::isfinite(l_m)) throw DomainError("squid: string length must be positive");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("squid: lambda must lie in (0, 1]");
}

void BiasPoint::validate() const {
  if (!std::isfinite(phi_b) || !std::isfinite(b_ip_T) || !std::isfinite(b_oop_T)) {
    throw DomainError("bias point fields must be finite");
  }
}

double s0(double phi_b, double alpha) {
  const double c = std::cos(phi_b);
  const double s = std::sin(phi_b);
  return std::sqrt(c * c + alpha * alpha * s * s);
}

double josephson_energy(double i1_A, double i2_A) {
  if (i1_A < 0.0 || i2_A < 0.0) throw DomainError("josephson_energy: negative critical current");
  return constants::hbar * (i1_A + i2_A) / (4.0 * constants::elementary_charge);
}

double josephson_energy(const SquidParams& params) {
  return josephson_energy(params.i1(), params.i2());
}

double critical_current_for_inductance(double lj_min_H) {
  if (!(lj_min_H > 0.0)) throw DomainError("minimum Josephson inductance must be positive");
  return flux_quantum / (4.0 * pi * lj_min_H);
}

// cos(pi/2) evaluates to 6e-17, so an exact zero test never fires.
constexpr double singular_s0 = 1e-12;

double josephson_inductance(const SquidParams& params, double phi_b) {
  const double s = s0(phi_b, params.alpha);
  if (s < singular_s0) {
    throw SingularityError("josephson_inductance: S0 = 0 (symmetric SQUID at half flux quantum)");
  }
  return flux_quantum / (4.0 * pi * params.i0_A * s);
}

double flux_transduction(const SquidParams& params, double b_ip_T) {
  return b_ip_T * params.l_m * params.lambda;
}

double squid_potential(double phi_plus, double x_m, const BiasPoint& bias,
                       const SquidParams& params) {
  const double e1 = flux_quantum / (2.0 * pi) * params.i1();
  const double e2 = flux_quantum / (2.0 * pi) * params.i2();
  const double half_delta =
      bias.phi_b + pi * flux_transduction(params, bias.b_ip_T) * x_m / flux_quantum;
  return -e1 * std::cos(phi_plus + half_delta) - e2 * std::cos(phi_plus - half_delta);
}

PotentialMinimum minimize_potential(double x_m, const BiasPoint& bias, const SquidParams& params,
                                    double tolerance) {
  auto energy = [&](double p) { return squid_potential(p, x_m, bias, params); };

  constexpr int scan_points = 64;
  const double step = 2.0 * pi / scan_points;
  int best = 0;
  double best_energy = energy(-pi);
  for (int i = 1; i < scan_points; ++i) {
    const double e = energy(-pi + i * step);
    if (e < best_energy) {
      best_energy = e;
      best = i;
    }
  }

  // The potential is 2pi-periodic, so the bracket may straddle +-pi.
  double a = -pi + (best - 1) * step;
  double b = -pi + (best + 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = energy(c);
  double fd = energy(d);
  int iterations = 0;
  constexpr int max_iterations = 500;
  while (b - a > tolerance) {
    if (++iterations > max_iterations) {
      throw ConvergenceError("minimize_potential: golden-section search did not converge");
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = energy(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = energy(d);
    }
  }
  double phi_min = 0.5 * (a + b);
  const double e_min = energy(phi_min);
  phi_min = std::remainder(phi_min, 2.0 * pi);
  return {phi_min, e_min, iterations};
}

double circulating_current(const SquidParams& params, double phi_b) {
  const double s = s0(phi_b, params.alpha);
  if (s < singular_s0) throw SingularityError("circulating_current: S0 = 0");
  return params.i0_A * (1.0 - params.alpha * params.alpha) * std::sin(phi_b) * std::cos(phi_b) / s;
}

double lorentz_force(const BiasPoint& bias, const SquidParams& params, double circulating_current_A) {
  return bias.b_ip_T * params.l_m * circulating_current_A;
}

}  // namespace squidmech
