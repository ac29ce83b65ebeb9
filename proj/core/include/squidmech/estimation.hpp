#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "squidmech/mechanics_model.hpp"
#include "squidmech/squid_model.hpp"

namespace squidmech {

using ModelFunction = std::function<double(std::span<const double> params, double x)>;

struct ParameterBounds {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// A weighted nonlinear least-squares problem.
///
/// `sigma` empty means unit weights. `bounds`, `fixed` and `scale` may be
/// empty (unbounded, all free, scale = |initial|). `scale` is the typical
/// magnitude of each parameter; the engine works in parameters divided by it
/// and uses it as the floor of the finite-difference step.
struct FitProblem {
  ModelFunction model;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma;
  std::vector<double> initial;
  std::vector<ParameterBounds> bounds;
  std::vector<bool> fixed;
  std::vector<double> scale;
  std::vector<std::string> names;
  /// true: covariance = (J^T W J)^-1. false: additionally scaled by the
  /// reduced chi-square.
  bool absolute_sigma = false;

  void validate() const;
  [[nodiscard]] std::size_t free_count() const;
};

struct EngineOptions {
  int max_iterations = 200;
  double jacobian_step = 1e-7;     ///< relative forward-difference step
  double step_tolerance = 1e-10;   ///< on the relative norm of the scaled step
  double cost_tolerance = 1e-12;   ///< on the relative cost decrease
  double initial_damping = 1e-3;
  double central_step = 6e-6;      ///< relative step for the final refinement and the covariance
};

struct FitReport {
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> std_errors;
  std::vector<std::vector<double>> covariance;
  double chi_square = 0.0;
  double red_chisq = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
  /// Cost after the initial evaluation and after every accepted damped step.
  std::vector<double> cost_history;

  [[nodiscard]] double param(std::string_view name) const;
  [[nodiscard]] double error(std::string_view name) const;
};

/// Levenberg-Marquardt with Marquardt diagonal damping, forward-difference
/// Jacobian and projection onto the bounds. After convergence a few
/// Gauss-Newton steps with a central-difference Jacobian polish the optimum,
/// and the covariance is built from that Jacobian. Data are sorted by (x, y, sigma)
/// before any accumulation, so permuting the input leaves the result
/// bit-identical. Throws ConditioningError when the damped normal equations
/// or the covariance cannot be formed.
[[nodiscard]] FitReport least_squares(const FitProblem& problem, const EngineOptions& options = {});

/// Jacobian d model(params, x_j) / d params_k by forward or central differences.
[[nodiscard]] std::vector<std::vector<double>> forward_jacobian(const FitProblem& problem,
                                                                std::span<const double> params,
                                                                double rel_step = 1e-7);
[[nodiscard]] std::vector<std::vector<double>> central_jacobian(const FitProblem& problem,
                                                                std::span<const double> params,
                                                                double rel_step = 6e-6);

/// Largest |J_fwd - J_central| relative to the largest |J_central| in the same column.
[[nodiscard]] double jacobian_discrepancy(const FitProblem& problem, std::span<const double> params);

struct BootstrapResult {
  std::vector<double> mean;
  std::vector<double> std_dev;
  int resamples = 0;
  int failures = 0;
};

/// Refits `resamples` copies of the data drawn with replacement. Resample i
/// uses a seed derived from (master_seed, i), so the result does not depend
/// on the thread count.
[[nodiscard]] BootstrapResult bootstrap(const FitProblem& problem, const FitReport& best,
                                        int resamples = 200, std::uint64_t master_seed = 1,
                                        unsigned threads = 1);

/// SplitMix64 step; used to derive independent stream seeds.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// --- flux-tuning fit -------------------------------------------------------

struct FluxTuningSample {
  double phi_b = 0.0;
  double omega_m = 0.0;  ///< rad/s
  double sigma = 0.0;    ///< rad/s; 0 for unweighted
};

/// Everything held fixed while (E_J, Omega_0) float.
struct FluxTuningFixed {
  SquidParams squid;
  StringParams string;
  double b_ip_T = 0.035;
  double s_min = default_s_min;
};

/// Fits mechanical_frequency with E_J and Omega_0 free. Parameters are named
/// "e_j" (J) and "omega0" (rad/s). Throws IdentifiabilityError when the data
/// cannot constrain E_J (zero field, no flux variation).
[[nodiscard]] FitReport fit_flux_tuning(std::span<const FluxTuningSample> points,
                                        const FluxTuningFixed& fixed,
                                        std::optional<std::array<double, 2>> init = std::nullopt);

// --- Labusch power-law fit --------------------------------------------------

struct FieldSample {
  double b_ip_T = 0.0;
  double omega0 = 0.0;  ///< rad/s
  double sigma = 0.0;
};

struct PowerLawFit {
  /// Engine parameters: "omega00" (rad/s), "alpha_l_ref" (N/m^4 at b_ref), "k".
  FitReport report;
  double b_ref_T = 0.035;
  double rho_kg_m3 = 2700.0;
  double prefactor = 0.0;  ///< a in alpha_L = a B^k
  double prefactor_error = 0.0;

  [[nodiscard]] LabuschModel model() const;
};

/// Fits Omega_0(B)^2 = omega00^2 + a B^k / rho, reparameterized through
/// alpha_L(b_ref) for conditioning.
[[nodiscard]] PowerLawFit fit_power_law(std::span<const FieldSample> points, double rho_kg_m3,
                                        double b_ref_T = 0.035);

}  // namespace squidmech
