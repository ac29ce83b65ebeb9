#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "squidmech/circuit_model.hpp"
#include "squidmech/errors.hpp"
#include "squidmech/mechanics_model.hpp"
#include "support/oracles.hpp"

namespace sm = squidmech;
using oracle::pi;

namespace {

const double e_j = sm::josephson_energy(sm::SquidParams{});

/// Direct transcription of the flux-corrected shift formula.
double shift_formula(double phi, double b, double ej, double alpha, double l, double lam, double m) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double s0 = oracle::s0(phi, alpha);
  return 4.0 * ej * pi * pi * b * b * l * l * lam * lam * (1.0 - alpha * alpha) *
         (std::pow(c, 4) - alpha * alpha * std::pow(s, 4)) /
         (m * oracle::flux_quantum * oracle::flux_quantum * s0 * s0 * s0);
}

}  // namespace

TEST(StringParams, Validation) {
  sm::StringParams s;
  EXPECT_NO_THROW(s.validate());
  EXPECT_NEAR(s.q_factor(), 290000.0, 1e-6);
  s.m_r_kg = 1e-12;
  EXPECT_THROW(s.validate(), sm::DomainError);
  s = {};
  s.gamma_m = s.omega0 * 2.0;
  EXPECT_THROW(s.validate(), sm::DomainError);
}

TEST(MechanicalFrequency, ZeroFieldIsIntrinsic) {
  sm::StringParams s;
  sm::SquidParams q;
  for (int i = 0; i <= 30; ++i) {
    const double phi = -0.45 * pi + 0.9 * pi * i / 30.0;
    EXPECT_EQ(sm::mechanical_frequency(s, q, {phi, 0.0, 0.0}, e_j), s.omega0);
  }
}

TEST(MechanicalFrequency, PaperPointShift) {
  sm::StringParams s;
  sm::SquidParams q;
  const double w = sm::mechanical_frequency(s, q, {0.0, 0.035, 0.0}, 1.504e-22);
  const double df = (w - s.omega0) / (2.0 * pi);
  EXPECT_NEAR(df, 2.0e3, 0.05e3);
  const double delta = shift_formula(0.0, 0.035, 1.504e-22, 0.01, 20e-6, 0.9, 0.6e-15);
  EXPECT_LT(oracle::rel(sm::spring_shift(s, q, {0.0, 0.035, 0.0}, 1.504e-22), delta), 1e-12);
}

TEST(MechanicalFrequency, MatchesFormulaOverGrid) {
  sm::StringParams s;
  sm::SquidParams q;
  q.alpha = 0.03;
  for (double b : {0.0062, 0.02, 0.035}) {
    for (int i = 0; i <= 20; ++i) {
      const double phi = -0.45 * pi + 0.9 * pi * i / 20.0;
      const double expected = std::sqrt(s.omega0 * s.omega0 + shift_formula(phi, b, e_j, 0.03, q.l_m, q.lambda, s.m_r_kg));
      EXPECT_LT(oracle::rel(sm::mechanical_frequency(s, q, {phi, b, 0.0}, e_j), expected), 1e-13);
    }
  }
}

TEST(MechanicalFrequency, EvenPeriodicMonotone) {
  sm::StringParams s;
  sm::SquidParams q;
  double prev = 1e300;
  for (int i = 0; i <= 200; ++i) {
    const double phi = 0.45 * pi * i / 200.0;
    const double w = sm::mechanical_frequency(s, q, {phi, 0.035, 0.0}, e_j);
    EXPECT_NEAR(w, sm::mechanical_frequency(s, q, {-phi, 0.035, 0.0}, e_j), 1e-12 * w);
    EXPECT_NEAR(w, sm::mechanical_frequency(s, q, {phi + pi, 0.035, 0.0}, e_j), 1e-12 * w);
    EXPECT_LE(w, prev);
    prev = w;
  }
}

TEST(MechanicalFrequency, GuardAndInstability) {
  sm::StringParams s;
  sm::SquidParams q;
  EXPECT_THROW((void)sm::mechanical_frequency(s, q, {0.49 * pi, 0.035, 0.0}, e_j), sm::DomainError);
  // a very soft string is pushed past zero stiffness near the guard, where the shift is negative
  s.omega0 = 2.0 * pi * 1e3;
  s.gamma_m = 2.0 * pi * 1.0;
  EXPECT_THROW((void)sm::mechanical_frequency(s, q, {0.48 * pi, 0.5, 0.0}, e_j), sm::InstabilityError);
  // the guard is configurable
  sm::StringParams d;
  EXPECT_NO_THROW((void)sm::mechanical_frequency(d, q, {0.49 * pi, 0.035, 0.0}, e_j, 0.01));
}

TEST(NumericSpringShift, ZeroField) {
  sm::StringParams s;
  sm::SquidParams q;
  EXPECT_EQ(sm::numeric_spring_shift(s, q, {0.3, 0.0, 0.0}, e_j), 0.0);
}

TEST(NumericSpringShift, SymmetricSquidAnalytic) {
  // E_min(x) = -2 E_J |cos(phi_b + k x)|, k = pi B l lambda / Phi_0, so
  // d2E/dx2 = 2 E_J k^2 cos(phi_b) for |phi_b| < pi/2.
  sm::StringParams s;
  sm::SquidParams q;
  q.alpha = 0.0;
  const double b = 0.035;
  const double k = pi * b * q.l_m * q.lambda / oracle::flux_quantum;
  for (double phi : {0.0, 0.1 * pi, 0.3 * pi, 0.4 * pi}) {
    const double expected = 2.0 * e_j * k * k * std::cos(phi) / s.m_r_kg;
    EXPECT_LT(oracle::rel(sm::numeric_spring_shift(s, q, {phi, b, 0.0}, e_j), expected), 1e-5) << phi;
  }
}

TEST(NumericSpringShift, RatioToClosedFormIsConstant) {
  sm::StringParams s;
  sm::SquidParams q;
  std::vector<double> ratios;
  for (int i = 0; i <= 36; ++i) {
    const double phi = -0.45 * pi + 0.9 * pi * i / 36.0;
    const sm::BiasPoint b{phi, 0.035, 0.0};
    ratios.push_back(sm::numeric_spring_shift(s, q, b, e_j) / sm::spring_shift(s, q, b, e_j));
  }
  for (double r : ratios) {
    EXPECT_NEAR(r, 0.5, 1e-3 * 0.5);
    EXPECT_LT(oracle::rel(r, ratios.front()), 1e-3);
  }
}

TEST(NumericSpringShift, SignAgreementOnGuardedDomain) {
  sm::StringParams s;
  sm::SquidParams q;
  // the closed form changes sign at tan^2 phi = 1/alpha, inside the guarded domain
  const double phi_zero = std::atan(std::sqrt(1.0 / q.alpha));
  for (int i = 0; i <= 400; ++i) {
    const double phi = -pi / 2 + pi * i / 400.0;
    if (oracle::s0(phi, q.alpha) < sm::default_s_min) continue;
    if (std::abs(std::abs(phi) - phi_zero) < 1e-3) continue;
    const sm::BiasPoint b{phi, 0.035, 0.0};
    const double closed = sm::spring_shift(s, q, b, e_j);
    const double numeric = sm::numeric_spring_shift(s, q, b, e_j);
    EXPECT_EQ(std::signbit(closed), std::signbit(numeric)) << phi;
  }
}

TEST(Labusch, FrequencyAndRoundTrip) {
  sm::StringParams s;
  const auto model = sm::LabuschModel::from_reference(s.omega0, 7.88e14, 0.035, 1.81);
  EXPECT_EQ(sm::labusch_frequency(model, s, 0.0), s.omega0);
  const double w = sm::labusch_frequency(model, s, 0.035);
  EXPECT_NEAR((w - s.omega0) / (2.0 * pi), 637.0, 5.0);
  EXPECT_NEAR(model.alpha_l(0.035), 7.88e14, 1e-3);
  const double expected = std::sqrt(s.omega0 * s.omega0 + 7.88e14 * std::pow(0.02 / 0.035, 1.81) / 2700.0);
  EXPECT_LT(oracle::rel(sm::labusch_frequency(model, s, 0.02), expected), 1e-14);
  EXPECT_THROW((void)sm::labusch_frequency(model, s, -0.01), sm::DomainError);
  sm::LabuschModel bad = model;
  bad.exponent = 3.5;
  EXPECT_THROW(bad.validate(), sm::DomainError);
}

TEST(ZeroPoint, ValueAndScaling) {
  sm::StringParams s;
  const double x = sm::zero_point_fluctuation(s);
  EXPECT_NEAR(x, 4.91e-14, 0.01e-14);
  EXPECT_NEAR(x, std::sqrt(oracle::hbar / (2.0 * 0.6e-15 * s.omega0)), 1e-20);
  EXPECT_NEAR(sm::zero_point_fluctuation(4.0 * s.m_r_kg, s.omega0), 0.5 * x, 1e-12 * x);
  EXPECT_NEAR(sm::zero_point_fluctuation(s.m_r_kg, 4.0 * s.omega0), 0.5 * x, 1e-12 * x);
}

TEST(ThermalScales, Values) {
  sm::StringParams s;
  const auto t = sm::thermal_scales(s, 0.085);
  EXPECT_NEAR(t.mean_square_displacement, 1.47e-24, 0.01e-24);
  EXPECT_NEAR(t.occupation, 305.0, 1.0);
  const auto t2 = sm::thermal_scales(s, 0.17);
  EXPECT_NEAR(t2.mean_square_displacement, 2.0 * t.mean_square_displacement, 1e-12 * t.mean_square_displacement);
  EXPECT_LT(sm::thermal_scales(s, 1e-9).mean_square_displacement, 1e-31);
  EXPECT_THROW((void)sm::thermal_scales(s, 0.0), sm::DomainError);
}

TEST(VacuumCoupling, Properties) {
  const auto res = sm::calibrate_lc(sm::CalibrationTargets{});
  sm::SquidParams q;
  sm::StringParams s;
  EXPECT_EQ(sm::vacuum_coupling_estimate(res, q, s, {0.2, 0.0, 0.0}), 0.0);
  double prev = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double phi = 0.45 * pi * i / 20.0;
    const double g = sm::vacuum_coupling_estimate(res, q, s, {phi, 0.035, 0.0});
    EXPECT_GT(g, prev);
    prev = g;
    const double g2 = sm::vacuum_coupling_estimate(res, q, s, {phi, 0.07, 0.0});
    EXPECT_LT(oracle::rel(g2, 2.0 * g), 1e-12);
  }
  // analytic d omega_c / d Phi through L_J = L0 / S0
  const double phi = 0.3 * pi;
  const double l0 = sm::josephson_inductance(q, 0.0);
  const double sq = oracle::s0(phi, q.alpha);
  const double ds = -(1.0 - q.alpha * q.alpha) * std::sin(phi) * std::cos(phi) / sq;
  const double lj = l0 / sq;
  const double dlj = -l0 * ds / (sq * sq);
  const double wc = 1.0 / std::sqrt(res.C_F * (res.L_H + lj));
  const double dw_dphi = -0.5 * wc * dlj / (res.L_H + lj);
  const double expected = std::abs(dw_dphi) * pi / oracle::flux_quantum * 0.035 * q.l_m * q.lambda *
                          sm::zero_point_fluctuation(s);
  EXPECT_LT(oracle::rel(sm::vacuum_coupling_estimate(res, q, s, {phi, 0.035, 0.0}), expected), 1e-6);
}

TEST(TuningSweep, OrderingAndThreads) {
  sm::StringParams s;
  sm::SquidParams q;
  std::vector<double> phi{-0.4, 0.0, 0.4};
  std::vector<double> fields{0.0062, 0.035};
  const auto a = sm::tuning_sweep(s, q, e_j, phi, fields);
  ASSERT_EQ(a.size(), 6u);
  EXPECT_EQ(a[0].b_ip_T, 0.0062);
  EXPECT_EQ(a[3].b_ip_T, 0.035);
  EXPECT_EQ(a[4].phi_b, 0.0);
  const auto b = sm::tuning_sweep(s, q, e_j, phi, fields, {}, sm::default_s_min, 4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].omega_m, b[i].omega_m);
  std::vector<double> w0{s.omega0, s.omega0 + 100.0};
  const auto c = sm::tuning_sweep(s, q, e_j, phi, fields, w0);
  EXPECT_GT(c[4].omega_m, a[4].omega_m);
}
