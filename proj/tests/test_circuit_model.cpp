#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "squidmech/circuit_model.hpp"
#include "squidmech/errors.hpp"
#include "support/oracles.hpp"

namespace sm = squidmech;
using oracle::pi;

namespace {

const double w_max = 2.0 * pi * 7.45e9;
const double w_min = 2.0 * pi * 6.6e9;

sm::ResonatorParams calibrated() { return sm::calibrate_lc(sm::CalibrationTargets{}); }

}  // namespace

TEST(Calibration, MatchesDirectSolve) {
  const auto res = calibrated();
  const auto lc = oracle::solve_lc(w_max, w_min, 0.36e-9, 0.45 * pi, 0.01);
  EXPECT_LT(oracle::rel(res.L_H, lc[0]), 1e-12);
  EXPECT_LT(oracle::rel(res.C_F, lc[1]), 1e-12);
  // published rounding of the same solve
  EXPECT_NEAR(res.L_H, 6.708e-9, 1e-3 * 6.708e-9);
  EXPECT_NEAR(res.C_F, 64.57e-15, 1e-3 * 64.57e-15);
  EXPECT_NEAR(res.kappa(), 2.0 * pi * 2.5e6, 1e-6);
  EXPECT_DOUBLE_EQ(res.kappa_int, res.kappa_ext);
}

TEST(Calibration, RoundTripEndpoints) {
  const auto res = calibrated();
  sm::SquidParams squid;
  squid.i0_A = sm::critical_current_for_inductance(0.36e-9);
  EXPECT_LT(oracle::rel(sm::cavity_frequency_at_flux(res, squid, 0.0), w_max), 1e-9);
  EXPECT_LT(oracle::rel(sm::cavity_frequency_at_flux(res, squid, 0.45 * pi), w_min), 1e-9);
  EXPECT_LT(oracle::rel(sm::cavity_frequency(res, 2.297e-9), w_min), 2e-4);
}

TEST(Calibration, Errors) {
  EXPECT_THROW((void)sm::calibrate_lc(w_max, w_max, 0.36e-9, 0.45 * pi, 0.01), sm::CalibrationError);
  EXPECT_THROW((void)sm::calibrate_lc(w_min, w_max, 0.36e-9, 0.45 * pi, 0.01), sm::CalibrationError);
  EXPECT_THROW((void)sm::calibrate_lc(w_max, w_min, 0.0, 0.45 * pi, 0.01), sm::DomainError);
  // the far endpoint needs more L_J swing than the SQUID provides
  EXPECT_THROW((void)sm::calibrate_lc(w_max, 2.0 * pi * 1e9, 0.36e-9, 0.05 * pi, 0.01),
               sm::CalibrationError);
}

TEST(CavityFrequency, MonotoneAndLimits) {
  const auto res = calibrated();
  double prev = sm::cavity_frequency(res, 0.0);
  for (int i = 1; i < 100; ++i) {
    const double w = sm::cavity_frequency(res, i * 0.1e-9);
    EXPECT_LT(w, prev);
    prev = w;
  }
  EXPECT_LT(sm::cavity_frequency(res, 1e20), 1e-3);
  EXPECT_THROW((void)sm::cavity_frequency(res, -1e-9), sm::DomainError);
}

TEST(S21, NotchProperties) {
  sm::ResonatorParams res{6.7e-9, 64.6e-15, 0.0, 2.0 * pi * 2.5e6};
  const double wc = 2.0 * pi * 7e9;
  EXPECT_NEAR(std::abs(sm::s21(wc, res, wc)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(sm::s21(wc + 1e4 * res.kappa(), res, wc)), 1.0, 1e-4);
}

TEST(S21, PassiveAndDipDepth) {
  for (double frac : {0.1, 0.5, 0.9, 1.0}) {
    const double kappa = 2.0 * pi * 2.5e6;
    sm::ResonatorParams res{6.7e-9, 64.6e-15, (1.0 - frac) * kappa, frac * kappa};
    const double wc = 2.0 * pi * 7e9;
    double min_t = 2.0;
    for (int i = -2000; i <= 2000; ++i) {
      const double w = wc + kappa * i / 200.0;
      const double t = std::norm(sm::s21(w, res, wc));
      EXPECT_LE(t, 1.0 + 1e-15);
      min_t = std::min(min_t, t);
    }
    const double expected = std::pow(res.kappa_int / kappa, 2);
    EXPECT_NEAR(min_t, expected, 1e-9);
  }
}

TEST(S21, DipFullWidthIsKappa) {
  const double kappa = 2.0 * pi * 2.5e6;
  sm::ResonatorParams res{6.7e-9, 64.6e-15, 0.3 * kappa, 0.7 * kappa};
  const double wc = 2.0 * pi * 7e9;
  auto dip = [&](double w) { return 1.0 - std::norm(sm::s21(w, res, wc)); };
  const double half = 0.5 * dip(wc);
  // bisection for the upper half-maximum point
  double lo = wc;
  double hi = wc + 10.0 * kappa;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dip(mid) > half ? lo : hi) = mid;
  }
  EXPECT_LT(oracle::rel(2.0 * (lo - wc), kappa), 1e-9);
}

TEST(FluxMap, DipLocusAndPeriodicity) {
  const auto res = calibrated();
  sm::SquidParams squid;
  std::vector<double> phi;
  for (int i = 0; i <= 40; ++i) phi.push_back(-pi + 2.0 * pi * i / 40.0);
  std::vector<double> omega;
  for (int i = 0; i <= 600; ++i) omega.push_back(2.0 * pi * (6.5e9 + 1.1e9 * i / 600.0));
  const auto map = sm::flux_sweep_map(res, squid, phi, omega, 1);
  ASSERT_EQ(map.s21_sq.size(), phi.size() * omega.size());
  // phi index 20 is phi_b = 0, index 0 and 40 are -pi, pi
  const double step = omega[1] - omega[0];
  EXPECT_NEAR(map.dip_frequency(20), w_max, step);
  for (std::size_t j = 0; j < omega.size(); ++j) {
    for (std::size_t i = 0; i + 20 < phi.size(); ++i) {
      EXPECT_NEAR(map.at(i, j), map.at(i + 20, j), 1e-9);
    }
    EXPECT_NEAR(map.at(0, j), map.at(40, j), 1e-9);
  }
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double wc = sm::cavity_frequency_at_flux(res, squid, phi[i]);
    if (wc < omega.front() || wc > omega.back()) continue;
    EXPECT_NEAR(map.dip_frequency(i), sm::cavity_frequency_at_flux(res, squid, phi[i]), step);
  }
}

TEST(FluxMap, DipDecreasesTowardEdge) {
  const auto res = calibrated();
  sm::SquidParams squid;
  std::vector<double> phi;
  for (int i = 0; i <= 18; ++i) phi.push_back(0.45 * pi * i / 18.0);
  std::vector<double> omega;
  for (int i = 0; i <= 4000; ++i) omega.push_back(2.0 * pi * (6.5e9 + 1.1e9 * i / 4000.0));
  const auto map = sm::flux_sweep_map(res, squid, phi, omega, 2);
  for (std::size_t i = 1; i < phi.size(); ++i) EXPECT_LE(map.dip_frequency(i), map.dip_frequency(i - 1));
}

TEST(FluxMap, ThreadCountDoesNotChangeBits) {
  const auto res = calibrated();
  sm::SquidParams squid;
  std::vector<double> phi;
  for (int i = 0; i < 37; ++i) phi.push_back(-1.0 + 0.05 * i);
  std::vector<double> omega;
  for (int i = 0; i < 53; ++i) omega.push_back(2.0 * pi * (6.5e9 + 2e7 * i));
  const auto a = sm::flux_sweep_map(res, squid, phi, omega, 1);
  for (unsigned t : {2u, 3u, 8u}) {
    const auto b = sm::flux_sweep_map(res, squid, phi, omega, t);
    EXPECT_EQ(a.s21_sq, b.s21_sq);
  }
}

TEST(FluxMap, RejectsBadGrids) {
  const auto res = calibrated();
  sm::SquidParams squid;
  std::vector<double> empty;
  std::vector<double> ok{1.0, 2.0};
  std::vector<double> unsorted{2.0, 1.0};
  EXPECT_THROW((void)sm::flux_sweep_map(res, squid, empty, ok), sm::DomainError);
  EXPECT_THROW((void)sm::flux_sweep_map(res, squid, ok, unsorted), sm::DomainError);
}
