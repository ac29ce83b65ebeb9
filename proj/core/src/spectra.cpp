#include "squidmech/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "squidmech/errors.hpp"
#include "squidmech/estimation.hpp"

namespace squidmech {

using constants::pi;

void SpectrumTrace::validate() const {
  if (freqs.size() != psd.size()) throw DomainError("spectrum: freqs and psd lengths differ");
  if (freqs.empty()) throw DomainError("spectrum: empty trace");
  for (std::size_t i = 1; i < freqs.size(); ++i) {
    if (!(freqs[i] > freqs[i - 1])) throw DomainError("spectrum: frequencies must be strictly increasing");
  }
  for (double v : psd) {
    if (!(v >= 0.0)) throw DomainError("spectrum: psd must be non-negative");
  }
}

double lorentzian(double f, double center, double fwhm, double area, double floor) {
  const double d = f - center;
  return floor + (2.0 * area / pi) * fwhm / (4.0 * d * d + fwhm * fwhm);
}

SpectrumTrace lorentzian_psd(std::span<const double> freq_grid, double center, double fwhm,
                             double area, double floor) {
  if (!(fwhm > 0.0)) throw DomainError("lorentzian_psd: fwhm must be positive");
  SpectrumTrace trace;
  trace.freqs.assign(freq_grid.begin(), freq_grid.end());
  trace.psd.reserve(freq_grid.size());
  for (double f : freq_grid) trace.psd.push_back(lorentzian(f, center, fwhm, area, floor));
  return trace;
}

std::vector<double> centered_grid(double center, double half_span, std::size_t bins) {
  if (bins < 2 || !(half_span > 0.0)) throw DomainError("centered_grid: need >= 2 bins and a positive span");
  std::vector<double> grid(bins);
  const double step = 2.0 * half_span / static_cast<double>(bins - 1);
  for (std::size_t i = 0; i < bins; ++i) {
    grid[i] = center + (static_cast<double>(i) - 0.5 * static_cast<double>(bins - 1)) * step;
  }
  return grid;
}

SpectrumTrace synth_thermal_spectrum(const StringParams& string, const ThermalNoiseConfig& noise,
                                     std::span<const double> freq_grid) {
  if (noise.n_avg < 1) throw DomainError("synth_thermal_spectrum: n_avg must be >= 1");
  const double omega_m = noise.omega_m.value_or(string.omega0);
  const auto scales = thermal_scales(string.m_r_kg, omega_m, noise.temperature_K);
  const double area = noise.transduction_gain * noise.transduction_gain * scales.mean_square_displacement;
  SpectrumTrace trace = lorentzian_psd(freq_grid, omega_m / (2.0 * pi), string.gamma_m / (2.0 * pi),
                                       area, noise.floor);
  std::mt19937_64 rng(noise.seed);
  std::gamma_distribution<double> periodogram(static_cast<double>(noise.n_avg),
                                              1.0 / static_cast<double>(noise.n_avg));
  for (double& v : trace.psd) v *= periodogram(rng);
  trace.n_avg = noise.n_avg;
  trace.meta.seed = noise.seed;
  trace.meta.n_avg = noise.n_avg;
  return trace;
}

namespace {

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

LorentzFit initial_guess(const SpectrumTrace& trace) {
  const auto& f = trace.freqs;
  const auto& p = trace.psd;
  const std::size_t n = f.size();
  const auto [lo_it, hi_it] = std::minmax_element(p.begin(), p.end());
  if (*hi_it == *lo_it) throw NoPeakError("fit_lorentzian: flat trace has no peak");

  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  std::vector<double> outer(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(edge));
  outer.insert(outer.end(), p.end() - static_cast<std::ptrdiff_t>(edge), p.end());
  const double floor = median(outer);

  const std::size_t peak = static_cast<std::size_t>(hi_it - p.begin());
  const double height = p[peak] - floor;
  if (!(height > 0.0)) throw NoPeakError("fit_lorentzian: no bin rises above the floor");
  const double half = floor + 0.5 * height;

  auto crossing = [&](int direction) {
    std::size_t i = peak;
    while (true) {
      if ((direction < 0 && i == 0) || (direction > 0 && i + 1 == n)) return f[i];
      const std::size_t j = direction < 0 ? i - 1 : i + 1;
      if (p[j] < half) {
        const double t = (p[i] - half) / (p[i] - p[j]);
        return f[i] + t * (f[j] - f[i]);
      }
      i = j;
    }
  };
  double fwhm = crossing(+1) - crossing(-1);
  const double bin = (f.back() - f.front()) / static_cast<double>(n - 1);
  fwhm = std::max(fwhm, bin);

  LorentzFit guess;
  guess.center = f[peak];
  guess.fwhm = fwhm;
  guess.floor = std::max(floor, 0.0);
  guess.area = 0.5 * pi * height * fwhm;
  return guess;
}

}  // namespace

LorentzFit fit_lorentzian(const SpectrumTrace& trace, const std::optional<LorentzFit>& init) {
  trace.validate();
  if (trace.freqs.size() < 5) throw DomainError("fit_lorentzian: need at least five bins");
  const LorentzFit start = init ? *init : initial_guess(trace);
  if (!(start.fwhm > 0.0)) throw DomainError("fit_lorentzian: initial fwhm must be positive");
  const double span = trace.freqs.back() - trace.freqs.front();
  if (span < 5.0 * start.fwhm) {
    throw DomainError("fit_lorentzian: trace spans fewer than five linewidths");
  }

  // Work in offsets from the starting center so the problem is shift-invariant.
  const double reference = start.center;
  const double peak_height = start.floor + 2.0 * start.area / (pi * start.fwhm);

  FitProblem problem;
  problem.names = {"center_offset", "fwhm", "area", "floor"};
  problem.initial = {0.0, start.fwhm, start.area, start.floor};
  problem.scale = {start.fwhm, start.fwhm, start.area, std::max(start.floor, 1e-3 * peak_height)};
  problem.bounds = {{-span, span},
                    {1e-9 * start.fwhm, std::numeric_limits<double>::infinity()},
                    {0.0, std::numeric_limits<double>::infinity()},
                    {0.0, std::numeric_limits<double>::infinity()}};
  problem.x.reserve(trace.freqs.size());
  for (double f : trace.freqs) problem.x.push_back(f - reference);
  problem.y = trace.psd;
  problem.model = [](std::span<const double> p, double x) {
    return lorentzian(x, p[0], p[1], p[2], p[3]);
  };

  const FitReport report = least_squares(problem);
  LorentzFit fit;
  fit.center = reference + report.params[0];
  fit.fwhm = report.params[1];
  fit.area = report.params[2];
  fit.floor = report.params[3];
  fit.center_error = report.std_errors[0];
  fit.fwhm_error = report.std_errors[1];
  fit.area_error = report.std_errors[2];
  fit.floor_error = report.std_errors[3];
  fit.red_chisq = report.red_chisq;
  fit.converged = report.converged;
  fit.iterations = report.iterations;
  return fit;
}

double q_factor(double center, double fwhm) {
  if (!(fwhm > 0.0)) throw DomainError("q_factor: fwhm must be positive");
  return center / fwhm;
}

}  // namespace squidmech
