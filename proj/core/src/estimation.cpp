#include "squidmech/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

#include "squidmech/errors.hpp"
#include "squidmech/parallel.hpp"

namespace squidmech {

namespace {

struct SortedData {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> weight;  // 1 / sigma
};

SortedData sort_data(const FitProblem& problem) {
  const std::size_t n = problem.x.size();
  const bool weighted = !problem.sigma.empty();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = weighted ? problem.sigma[a] : 1.0;
    const double sb = weighted ? problem.sigma[b] : 1.0;
    return std::tie(problem.x[a], problem.y[a], sa) < std::tie(problem.x[b], problem.y[b], sb);
  });
  SortedData data;
  data.x.reserve(n);
  data.y.reserve(n);
  data.weight.reserve(n);
  for (std::size_t i : order) {
    data.x.push_back(problem.x[i]);
    data.y.push_back(problem.y[i]);
    data.weight.push_back(weighted ? 1.0 / problem.sigma[i] : 1.0);
  }
  return data;
}

class Engine {
 public:
  Engine(const FitProblem& problem, const EngineOptions& options)
      : problem_(problem), options_(options), data_(sort_data(problem)) {
    const std::size_t n = problem.initial.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (problem.fixed.empty() || !problem.fixed[k]) free_.push_back(k);
      double s = problem.scale.empty() ? 0.0 : problem.scale[k];
      if (!(s > 0.0)) s = std::abs(problem.initial[k]);
      if (!(s > 0.0)) s = 1.0;
      scale_.push_back(s);
    }
  }

  FitReport run() {
    const std::size_t n_data = data_.x.size();
    const std::size_t m = free_.size();
    FitReport report;
    report.names = problem_.names;
    if (report.names.size() != problem_.initial.size()) {
      report.names.clear();
      for (std::size_t k = 0; k < problem_.initial.size(); ++k) {
        report.names.push_back("p" + std::to_string(k));
      }
    }

    std::vector<double> params = problem_.initial;
    Eigen::VectorXd r(n_data);
    if (!residuals(params, r)) {
      throw DomainError("least_squares: model cannot be evaluated at the initial parameters");
    }
    double cost = r.squaredNorm();
    report.cost_history.push_back(cost);

    Eigen::MatrixXd jac(n_data, m);
    bool jac_current = false;
    double damping = options_.initial_damping;
    int iteration = 0;

    if (m == 0 || cost == 0.0) {
      report.converged = true;
      report.message = m == 0 ? "no free parameters" : "zero residual at start";
    }

    while (!report.converged && iteration < options_.max_iterations) {
      if (!jac_current) {
        jacobian(params, r, jac);
        jac_current = true;
      }
      ++iteration;
      const Eigen::MatrixXd normal = jac.transpose() * jac;
      const Eigen::VectorXd gradient = jac.transpose() * r;
      Eigen::VectorXd diag = normal.diagonal();
      const double diag_max = diag.maxCoeff();
      for (Eigen::Index k = 0; k < diag.size(); ++k) {
        diag[k] = std::max(diag[k], diag_max > 0.0 ? 1e-12 * diag_max : 1.0);
      }

      Eigen::VectorXd step = solve_damped(normal, gradient, diag, damping);

      double u_norm = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        const double u = params[free_[c]] / scale_[free_[c]];
        u_norm += u * u;
      }
      u_norm = std::sqrt(u_norm);
      if (step.norm() <= options_.step_tolerance * (u_norm + options_.step_tolerance)) {
        report.converged = true;
        report.message = "relative step below tolerance";
        break;
      }

      std::vector<double> trial = params;
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t k = free_[c];
        trial[k] = clamp_to_bounds(k, params[k] + scale_[k] * step[static_cast<Eigen::Index>(c)]);
      }
      Eigen::VectorXd r_trial(n_data);
      const bool ok = trial != params && residuals(trial, r_trial);
      const double trial_cost = ok ? r_trial.squaredNorm() : std::numeric_limits<double>::infinity();

      if (ok && trial_cost < cost) {
        const double relative_decrease = (cost - trial_cost) / cost;
        params = std::move(trial);
        r = r_trial;
        cost = trial_cost;
        report.cost_history.push_back(cost);
        jac_current = false;
        damping = std::max(damping / 3.0, 1e-15);
        if (cost == 0.0 || relative_decrease < options_.cost_tolerance) {
          report.converged = true;
          report.message = cost == 0.0 ? "zero residual" : "relative cost decrease below tolerance";
          break;
        }
      } else {
        damping *= 4.0;
        if (damping > 1e20) {
          report.message = "damping limit reached without progress";
          break;
        }
      }
    }
    if (!report.converged && report.message.empty()) report.message = "iteration cap reached";
    if (report.converged && m > 0 && cost > 0.0 && !at_bound(params)) refine(params, r, cost);

    report.iterations = iteration;
    report.params = params;
    report.chi_square = cost;
    const long dof = static_cast<long>(n_data) - static_cast<long>(m);
    report.red_chisq = dof > 0 ? cost / static_cast<double>(dof) : 0.0;

    report.covariance.assign(params.size(), std::vector<double>(params.size(), 0.0));
    report.std_errors.assign(params.size(), 0.0);
    if (m > 0) {
      central_jacobian(params, r, jac);
      const Eigen::MatrixXd normal = jac.transpose() * jac;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
      const double max_eig = eig.eigenvalues().maxCoeff();
      const double min_eig = eig.eigenvalues().minCoeff();
      if (!(max_eig > 0.0) || !(min_eig > 1e-15 * max_eig)) {
        throw ConditioningError("least_squares: singular normal equations at the optimum");
      }
      Eigen::MatrixXd cov = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                            eig.eigenvectors().transpose();
      const double factor = (!problem_.absolute_sigma && dof > 0) ? report.red_chisq : 1.0;
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          const std::size_t ka = free_[a];
          const std::size_t kb = free_[b];
          // Average with the transpose so the reported matrix is exactly symmetric.
          const double v = 0.5 * (cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +
                                  cov(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)));
          report.covariance[ka][kb] = v * scale_[ka] * scale_[kb] * factor;
        }
      }
      for (std::size_t k = 0; k < params.size(); ++k) {
        report.std_errors[k] = std::sqrt(std::max(report.covariance[k][k], 0.0));
      }
    }
    return report;
  }

 private:
  double clamp_to_bounds(std::size_t k, double v) const {
    if (problem_.bounds.empty()) return v;
    return std::clamp(v, problem_.bounds[k].lower, problem_.bounds[k].upper);
  }

  bool at_bound(const std::vector<double>& params) const {
    if (problem_.bounds.empty()) return false;
    return std::any_of(free_.begin(), free_.end(), [&](std::size_t k) {
      return params[k] == problem_.bounds[k].lower || params[k] == problem_.bounds[k].upper;
    });
  }

  // Undamped Gauss-Newton steps with a central-difference Jacobian. The
  // forward-difference Jacobian carries rounding of order eps / 1e-7, which
  // shifts the stationary point; these steps remove that bias. A step is
  // kept only when it lowers |J^T r| and leaves the cost within rounding.
  void refine(std::vector<double>& params, Eigen::VectorXd& r, double& cost) const {
    const std::size_t m = free_.size();
    Eigen::MatrixXd jac(r.size(), static_cast<Eigen::Index>(m));
    Eigen::VectorXd r_trial(r.size());
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(r.size());
    for (int pass = 0; pass < 4; ++pass) {
      central_jacobian(params, r, jac);
      const Eigen::VectorXd gradient = jac.transpose() * r;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(jac.transpose() * jac);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return;
      const Eigen::VectorXd step = ldlt.solve(-gradient);
      if (!step.allFinite()) return;
      std::vector<double> trial = params;
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t k = free_[c];
        trial[k] = clamp_to_bounds(k, params[k] + scale_[k] * step[static_cast<Eigen::Index>(c)]);
      }
      if (trial == params || !residuals(trial, r_trial)) return;
      const double trial_cost = r_trial.squaredNorm();
      if (trial_cost > cost * (1.0 + slack)) return;
      const double trial_gradient = (jac.transpose() * r_trial).norm();
      if (!(trial_gradient < gradient.norm())) return;
      params = std::move(trial);
      r = r_trial;
      cost = trial_cost;
    }
  }

  bool residuals(const std::vector<double>& params, Eigen::VectorXd& r) const {
    try {
      for (std::size_t j = 0; j < data_.x.size(); ++j) {
        const double f = problem_.model(params, data_.x[j]);
        if (!std::isfinite(f)) return false;
        r[static_cast<Eigen::Index>(j)] = (data_.y[j] - f) * data_.weight[j];
      }
    } catch (const DomainError&) {
      return false;
    }
    return true;
  }

  // Columns are derivatives of the residuals with respect to the scaled free
  // parameters u_k = p_k / scale_k.
  void jacobian(const std::vector<double>& params, const Eigen::VectorXd& r0,
                Eigen::MatrixXd& jac) const {
    Eigen::VectorXd r1(r0.size());
    for (std::size_t c = 0; c < free_.size(); ++c) {
      const std::size_t k = free_[c];
      const double h = options_.jacobian_step * std::max(std::abs(params[k]), scale_[k]);
      std::vector<double> shifted = params;
      bool ok = false;
      for (double direction : {1.0, -1.0}) {
        shifted[k] = params[k] + direction * h;
        if (shifted[k] != clamp_to_bounds(k, shifted[k])) continue;
        if (residuals(shifted, r1)) {
          ok = true;
          break;
        }
      }
      if (!ok) throw ConvergenceError("least_squares: Jacobian cannot be evaluated");
      const double actual = shifted[k] - params[k];
      jac.col(static_cast<Eigen::Index>(c)) = (r1 - r0) / actual * scale_[k];
    }
  }

  void central_jacobian(const std::vector<double>& params, const Eigen::VectorXd& r0,
                        Eigen::MatrixXd& jac) const {
    Eigen::VectorXd up(r0.size());
    Eigen::VectorXd down(r0.size());
    for (std::size_t c = 0; c < free_.size(); ++c) {
      const std::size_t k = free_[c];
      const double h = options_.central_step * std::max(std::abs(params[k]), scale_[k]);
      std::vector<double> hi = params;
      std::vector<double> lo = params;
      hi[k] = params[k] + h;
      lo[k] = params[k] - h;
      const bool hi_ok = hi[k] == clamp_to_bounds(k, hi[k]) && residuals(hi, up);
      const bool lo_ok = lo[k] == clamp_to_bounds(k, lo[k]) && residuals(lo, down);
      if (hi_ok && lo_ok) {
        jac.col(static_cast<Eigen::Index>(c)) = (up - down) / (hi[k] - lo[k]) * scale_[k];
      } else if (hi_ok) {
        jac.col(static_cast<Eigen::Index>(c)) = (up - r0) / (hi[k] - params[k]) * scale_[k];
      } else if (lo_ok) {
        jac.col(static_cast<Eigen::Index>(c)) = (r0 - down) / (params[k] - lo[k]) * scale_[k];
      } else {
        throw ConvergenceError("least_squares: Jacobian cannot be evaluated");
      }
    }
  }

  Eigen::VectorXd solve_damped(const Eigen::MatrixXd& normal, const Eigen::VectorXd& gradient,
                               const Eigen::VectorXd& diag, double& damping) const {
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd a = normal;
      a.diagonal() += damping * diag;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        Eigen::VectorXd step = ldlt.solve(-gradient);
        if (step.allFinite()) return step;
      }
      damping = std::max(damping * 10.0, 1e-12);
    }
    throw ConditioningError("least_squares: damped normal equations remain singular");
  }

  const FitProblem& problem_;
  EngineOptions options_;
  SortedData data_;
  std::vector<std::size_t> free_;
  std::vector<double> scale_;
};

std::vector<std::vector<double>> difference_jacobian(const FitProblem& problem,
                                                     std::span<const double> params,
                                                     double rel_step, bool central) {
  const std::size_t n = params.size();
  std::vector<std::vector<double>> jac(problem.x.size(), std::vector<double>(n, 0.0));
  std::vector<double> p(params.begin(), params.end());
  for (std::size_t k = 0; k < n; ++k) {
    double s = problem.scale.empty() ? 0.0 : problem.scale[k];
    if (!(s > 0.0)) s = std::abs(problem.initial.empty() ? params[k] : problem.initial[k]);
    if (!(s > 0.0)) s = 1.0;
    const double h = rel_step * std::max(std::abs(params[k]), s);
    std::vector<double> up = p;
    up[k] = p[k] + h;
    std::vector<double> down = p;
    down[k] = central ? p[k] - h : p[k];
    const double width = up[k] - down[k];
    for (std::size_t j = 0; j < problem.x.size(); ++j) {
      jac[j][k] = (problem.model(up, problem.x[j]) - problem.model(down, problem.x[j])) / width;
    }
  }
  return jac;
}

}  // namespace

void FitProblem::validate() const {
  if (!model) throw DomainError("fit problem: model function missing");
  if (x.size() != y.size()) throw DomainError("fit problem: x and y lengths differ");
  if (!sigma.empty() && sigma.size() != x.size()) throw DomainError("fit problem: sigma length differs");
  for (double s : sigma) {
    if (!(s > 0.0)) throw DomainError("fit problem: sigma must be positive");
  }
  if (initial.empty()) throw DomainError("fit problem: no parameters");
  if (!bounds.empty() && bounds.size() != initial.size()) throw DomainError("fit problem: bounds length");
  if (!fixed.empty() && fixed.size() != initial.size()) throw DomainError("fit problem: mask length");
  if (!scale.empty() && scale.size() != initial.size()) throw DomainError("fit problem: scale length");
  if (x.size() < free_count()) throw DomainError("fit problem: fewer data than free parameters");
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (!(initial[k] >= bounds[k].lower && initial[k] <= bounds[k].upper)) {
      throw DomainError("fit problem: initial parameter " + std::to_string(k) + " outside bounds");
    }
  }
}

std::size_t FitProblem::free_count() const {
  if (fixed.empty()) return initial.size();
  return static_cast<std::size_t>(std::count(fixed.begin(), fixed.end(), false));
}

double FitReport::param(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return params[k];
  }
  throw DomainError("FitReport: unknown parameter " + std::string(name));
}

double FitReport::error(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return std_errors[k];
  }
  throw DomainError("FitReport: unknown parameter " + std::string(name));
}

FitReport least_squares(const FitProblem& problem, const EngineOptions& options) {
  problem.validate();
  return Engine(problem, options).run();
}

std::vector<std::vector<double>> forward_jacobian(const FitProblem& problem,
                                                  std::span<const double> params, double rel_step) {
  return difference_jacobian(problem, params, rel_step, false);
}

std::vector<std::vector<double>> central_jacobian(const FitProblem& problem,
                                                  std::span<const double> params, double rel_step) {
  return difference_jacobian(problem, params, rel_step, true);
}

double jacobian_discrepancy(const FitProblem& problem, std::span<const double> params) {
  const auto fwd = forward_jacobian(problem, params);
  const auto ctr = central_jacobian(problem, params);
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    double column_max = 0.0;
    for (const auto& row : ctr) column_max = std::max(column_max, std::abs(row[k]));
    if (column_max == 0.0) continue;
    for (std::size_t j = 0; j < ctr.size(); ++j) {
      worst = std::max(worst, std::abs(fwd[j][k] - ctr[j][k]) / column_max);
    }
  }
  return worst;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

BootstrapResult bootstrap(const FitProblem& problem, const FitReport& best, int resamples,
                          std::uint64_t master_seed, unsigned threads) {
  problem.validate();
  if (resamples < 2) throw DomainError("bootstrap: need at least two resamples");
  const std::size_t n = problem.x.size();
  const std::size_t n_params = best.params.size();
  std::vector<std::vector<double>> fitted(static_cast<std::size_t>(resamples));
  std::vector<char> failed(static_cast<std::size_t>(resamples), 0);

  parallel_for(static_cast<std::size_t>(resamples), threads, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(master_seed, i));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    FitProblem copy = problem;
    copy.initial = best.params;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t src = pick(rng);
      copy.x[j] = problem.x[src];
      copy.y[j] = problem.y[src];
      if (!copy.sigma.empty()) copy.sigma[j] = problem.sigma[src];
    }
    try {
      fitted[i] = least_squares(copy).params;
    } catch (const Error&) {
      failed[i] = 1;
    }
  });

  BootstrapResult out;
  out.resamples = resamples;
  out.mean.assign(n_params, 0.0);
  out.std_dev.assign(n_params, 0.0);
  int used = 0;
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    if (failed[i]) {
      ++out.failures;
      continue;
    }
    ++used;
    for (std::size_t k = 0; k < n_params; ++k) out.mean[k] += fitted[i][k];
  }
  if (used < 2) throw ConvergenceError("bootstrap: fewer than two resamples converged");
  for (double& v : out.mean) v /= used;
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    if (failed[i]) continue;
    for (std::size_t k = 0; k < n_params; ++k) {
      const double d = fitted[i][k] - out.mean[k];
      out.std_dev[k] += d * d;
    }
  }
  for (double& v : out.std_dev) v = std::sqrt(v / (used - 1));
  return out;
}

namespace {

/// Weighted-or-not sigma policy shared by the domain fits.
template <typename Sample>
std::vector<double> collect_sigma(std::span<const Sample> points) {
  const auto weighted = std::count_if(points.begin(), points.end(),
                                      [](const Sample& s) { return s.sigma > 0.0; });
  if (weighted == 0) return {};
  if (static_cast<std::size_t>(weighted) != points.size()) {
    throw DomainError("fit: either all or none of the points must carry sigma");
  }
  std::vector<double> sigma;
  for (const auto& s : points) sigma.push_back(s.sigma);
  return sigma;
}

/// Least-squares line y = c0 + c1 x; returns {c0, c1, sse}.
std::array<double, 3> fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - (my + slope * (x[i] - mx));
    sse += d * d;
  }
  return {intercept, slope, sse};
}

}  // namespace

FitReport fit_flux_tuning(std::span<const FluxTuningSample> points, const FluxTuningFixed& fixed,
                          std::optional<std::array<double, 2>> init) {
  if (points.size() < 3) throw DomainError("fit_flux_tuning: need at least three points");
  if (fixed.b_ip_T == 0.0) {
    throw IdentifiabilityError("fit_flux_tuning: E_J is unidentifiable at zero in-plane field");
  }

  // Shift per unit E_J; Omega_m^2 is linear in (Omega_0^2, E_J).
  std::vector<double> g;
  std::vector<double> omega_sq;
  for (const auto& p : points) {
    g.push_back(spring_shift(fixed.string, fixed.squid, {p.phi_b, fixed.b_ip_T, 0.0}, 1.0, fixed.s_min));
    omega_sq.push_back(p.omega_m * p.omega_m);
  }
  const auto [g_min, g_max] = std::minmax_element(g.begin(), g.end());
  if (*g_max - *g_min <= 1e-12 * std::max(std::abs(*g_max), std::abs(*g_min))) {
    throw IdentifiabilityError("fit_flux_tuning: points carry no flux variation of the coupling");
  }

  std::array<double, 2> start{};
  if (init) {
    start = *init;
  } else {
    const auto line = fit_line(g, omega_sq);
    start = {line[1], line[0] > 0.0 ? std::sqrt(line[0]) : 0.0};
    if (!(start[0] > 0.0)) start[0] = josephson_energy(fixed.squid);
    if (!(start[1] > 0.0)) {
      start[1] = std::max_element(points.begin(), points.end(), [](const auto& a, const auto& b) {
                   return a.omega_m < b.omega_m;
                 })->omega_m;
    }
  }

  FitProblem problem;
  problem.names = {"e_j", "omega0"};
  problem.initial = {start[0], start[1]};
  problem.bounds = {{0.0, std::numeric_limits<double>::infinity()},
                    {0.0, std::numeric_limits<double>::infinity()}};
  for (const auto& p : points) {
    problem.x.push_back(p.phi_b);
    problem.y.push_back(p.omega_m);
  }
  problem.sigma = collect_sigma(points);
  problem.absolute_sigma = !problem.sigma.empty();
  problem.model = [fixed](std::span<const double> params, double phi_b) {
    StringParams string = fixed.string;
    string.omega0 = params[1];
    return mechanical_frequency(string, fixed.squid, {phi_b, fixed.b_ip_T, 0.0}, params[0],
                                fixed.s_min);
  };
  return least_squares(problem);
}

LabuschModel PowerLawFit::model() const {
  return {report.param("omega00"), prefactor, report.param("k")};
}

PowerLawFit fit_power_law(std::span<const FieldSample> points, double rho_kg_m3, double b_ref_T) {
  if (!(rho_kg_m3 > 0.0)) throw DomainError("fit_power_law: density must be positive");
  if (!(b_ref_T > 0.0)) throw DomainError("fit_power_law: reference field must be positive");
  std::vector<double> fields;
  for (const auto& p : points) {
    if (!(p.b_ip_T > 0.0)) throw DomainError("fit_power_law: fields must be positive");
    fields.push_back(p.b_ip_T);
  }
  std::sort(fields.begin(), fields.end());
  if (std::unique(fields.begin(), fields.end()) - fields.begin() < 3) {
    throw DomainError("fit_power_law: need at least three distinct fields");
  }

  // Start: scan the exponent, solving the linear problem in (omega00^2, a/rho) each time.
  std::vector<double> y_sq;
  for (const auto& p : points) y_sq.push_back(p.omega0 * p.omega0);
  double best_sse = std::numeric_limits<double>::infinity();
  double best_k = 2.0;
  double best_c = 0.0;
  double best_o2 = y_sq.front();
  std::vector<double> basis(points.size());
  for (int step = 0; step <= 700; ++step) {
    const double k = 0.5 + 0.005 * step;
    for (std::size_t i = 0; i < points.size(); ++i) basis[i] = std::pow(points[i].b_ip_T / b_ref_T, k);
    const auto line = fit_line(basis, y_sq);
    if (line[1] < 0.0 || line[0] <= 0.0) continue;
    if (line[2] < best_sse) {
      best_sse = line[2];
      best_k = k;
      best_c = line[1];
      best_o2 = line[0];
    }
  }

  FitProblem problem;
  problem.names = {"omega00", "alpha_l_ref", "k"};
  problem.initial = {std::sqrt(best_o2), best_c * rho_kg_m3, best_k};
  problem.bounds = {{0.0, std::numeric_limits<double>::infinity()},
                    {0.0, std::numeric_limits<double>::infinity()},
                    {0.1, 10.0}};
  for (const auto& p : points) {
    problem.x.push_back(p.b_ip_T);
    problem.y.push_back(p.omega0);
  }
  problem.sigma = collect_sigma(points);
  problem.absolute_sigma = !problem.sigma.empty();
  problem.model = [rho_kg_m3, b_ref_T](std::span<const double> params, double b) {
    return std::sqrt(params[0] * params[0] + params[1] * std::pow(b / b_ref_T, params[2]) / rho_kg_m3);
  };

  PowerLawFit fit;
  fit.report = least_squares(problem);
  fit.b_ref_T = b_ref_T;
  fit.rho_kg_m3 = rho_kg_m3;
  const double alpha_ref = fit.report.params[1];
  const double k = fit.report.params[2];
  fit.prefactor = alpha_ref / std::pow(b_ref_T, k);
  const double log_b = std::log(b_ref_T);
  const auto& cov = fit.report.covariance;
  const double da_dalpha = alpha_ref > 0.0 ? fit.prefactor / alpha_ref : std::pow(b_ref_T, -k);
  const double da_dk = -fit.prefactor * log_b;
  const double var = da_dalpha * da_dalpha * cov[1][1] + da_dk * da_dk * cov[2][2] +
                     2.0 * da_dalpha * da_dk * cov[1][2];
  fit.prefactor_error = std::sqrt(std::max(var, 0.0));
  return fit;
}

}  // namespace squidmech
