#include "squidmech/serialization.hpp"

#include <initializer_list>
#include <string>

#include "squidmech/errors.hpp"

namespace squidmech {

using nlohmann::json;
using constants::pi;

namespace {

void require_object(const json& j, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
}

void reject_unknown(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ConfigError(std::string(where) + ": unknown key \"" + item.key() + "\"");
  }
}

template <typename T>
void read(const json& j, const char* where, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

}  // namespace

StringParams StringConfig::params() const {
  StringParams p;
  p.m_r_kg = m_r_kg;
  p.omega0 = 2.0 * pi * f0_Hz;
  p.gamma_m = 2.0 * pi * gamma_Hz;
  p.length_m = length_m;
  p.width_m = width_m;
  p.thickness_m = thickness_m;
  p.rho_kg_m3 = rho_kg_m3;
  return p;
}

CalibrationTargets ResonatorConfig::targets(double alpha) const {
  CalibrationTargets t;
  t.omega_max = 2.0 * pi * f_max_Hz;
  t.omega_min = 2.0 * pi * f_min_Hz;
  t.lj_min_H = lj_min_H;
  t.phi_edge = phi_edge_over_pi * pi;
  t.alpha = alpha;
  t.kappa_total = 2.0 * pi * kappa_Hz;
  t.kappa_ext_fraction = kappa_ext_fraction;
  return t;
}

BiasPoint BiasConfig::point() const { return {phi_over_pi * pi, b_ip_T, b_oop_T}; }

LockConfig LockSettings::config(std::uint64_t seed) const {
  LockConfig c;
  c.dt_s = dt_s;
  c.tau_s = tau_s;
  c.sigma_phi0 = sigma_phi0;
  c.detuning_hz = detuning_Hz;
  c.kp = kp;
  c.ki = ki;
  c.setpoint_phi_b = setpoint_phi_over_pi * pi;
  c.steps = steps;
  c.seed = seed;
  c.sensor_noise = sensor_noise;
  return c;
}

double RunConfig::e_j() const { return tune.e_j_J.value_or(josephson_energy(squid)); }

LabuschModel RunConfig::labusch_model() const {
  return LabuschModel::from_reference(2.0 * pi * string.f0_Hz, labusch.alpha_l_ref_N_m4,
                                      labusch.b_ref_T, labusch.k);
}

json to_json(const SquidParams& p) {
  return {{"i0_A", p.i0_A}, {"alpha", p.alpha}, {"l_m", p.l_m}, {"lambda", p.lambda}};
}

SquidParams squid_params_from_json(const json& j) {
  require_object(j, "squid");
  reject_unknown(j, "squid", {"i0_A", "alpha", "l_m", "lambda"});
  SquidParams p;
  read(j, "squid", "i0_A", p.i0_A);
  read(j, "squid", "alpha", p.alpha);
  read(j, "squid", "l_m", p.l_m);
  read(j, "squid", "lambda", p.lambda);
  return p;
}

json to_json(const ResonatorParams& r) {
  return {{"L_H", r.L_H},
          {"C_F", r.C_F},
          {"kappa_int_Hz", r.kappa_int / (2.0 * pi)},
          {"kappa_ext_Hz", r.kappa_ext / (2.0 * pi)}};
}

ResonatorParams resonator_params_from_json(const json& j) {
  require_object(j, "resonator_params");
  reject_unknown(j, "resonator_params", {"L_H", "C_F", "kappa_int_Hz", "kappa_ext_Hz"});
  for (const char* key : {"L_H", "C_F", "kappa_int_Hz", "kappa_ext_Hz"}) {
    if (!j.contains(key)) throw ConfigError(std::string("resonator_params: missing key ") + key);
  }
  ResonatorParams r;
  double kint = 0.0;
  double kext = 0.0;
  read(j, "resonator_params", "L_H", r.L_H);
  read(j, "resonator_params", "C_F", r.C_F);
  read(j, "resonator_params", "kappa_int_Hz", kint);
  read(j, "resonator_params", "kappa_ext_Hz", kext);
  r.kappa_int = 2.0 * pi * kint;
  r.kappa_ext = 2.0 * pi * kext;
  return r;
}

RunConfig parse_run_config(const json& j) {
  require_object(j, "config");
  reject_unknown(j, "config",
                 {"seed", "threads", "squid", "string", "resonator", "bias", "temperature_K",
                  "spectrum", "sweep", "tune", "labusch", "lock"});
  RunConfig c;
  read(j, "config", "seed", c.seed);
  read(j, "config", "threads", c.threads);
  read(j, "config", "temperature_K", c.temperature_K);
  if (j.contains("squid")) c.squid = squid_params_from_json(j["squid"]);

  if (const auto it = j.find("string"); it != j.end()) {
    const json& s = *it;
    require_object(s, "string");
    reject_unknown(s, "string", {"m_r_kg", "f0_Hz", "gamma_Hz", "length_m", "width_m",
                                 "thickness_m", "rho_kg_m3"});
    read(s, "string", "m_r_kg", c.string.m_r_kg);
    read(s, "string", "f0_Hz", c.string.f0_Hz);
    read(s, "string", "gamma_Hz", c.string.gamma_Hz);
    read(s, "string", "length_m", c.string.length_m);
    read(s, "string", "width_m", c.string.width_m);
    read(s, "string", "thickness_m", c.string.thickness_m);
    read(s, "string", "rho_kg_m3", c.string.rho_kg_m3);
  }
  if (const auto it = j.find("resonator"); it != j.end()) {
    const json& r = *it;
    require_object(r, "resonator");
    reject_unknown(r, "resonator", {"f_max_Hz", "f_min_Hz", "lj_min_H", "phi_edge_over_pi",
                                    "kappa_Hz", "kappa_ext_fraction"});
    read(r, "resonator", "f_max_Hz", c.resonator.f_max_Hz);
    read(r, "resonator", "f_min_Hz", c.resonator.f_min_Hz);
    read(r, "resonator", "lj_min_H", c.resonator.lj_min_H);
    read(r, "resonator", "phi_edge_over_pi", c.resonator.phi_edge_over_pi);
    read(r, "resonator", "kappa_Hz", c.resonator.kappa_Hz);
    read(r, "resonator", "kappa_ext_fraction", c.resonator.kappa_ext_fraction);
  }
  if (const auto it = j.find("bias"); it != j.end()) {
    const json& b = *it;
    require_object(b, "bias");
    reject_unknown(b, "bias", {"phi_over_pi", "b_ip_T", "b_oop_T"});
    read(b, "bias", "phi_over_pi", c.bias.phi_over_pi);
    read(b, "bias", "b_ip_T", c.bias.b_ip_T);
    read(b, "bias", "b_oop_T", c.bias.b_oop_T);
  }
  if (const auto it = j.find("spectrum"); it != j.end()) {
    const json& s = *it;
    require_object(s, "spectrum");
    reject_unknown(s, "spectrum", {"gain_V_per_m", "floor_V2_per_Hz", "n_avg", "bins",
                                   "half_span_fwhm", "probe_power_W", "stabilizer_power_W"});
    read(s, "spectrum", "gain_V_per_m", c.spectrum.gain_V_per_m);
    read(s, "spectrum", "floor_V2_per_Hz", c.spectrum.floor_V2_per_Hz);
    read(s, "spectrum", "n_avg", c.spectrum.n_avg);
    read(s, "spectrum", "bins", c.spectrum.bins);
    read(s, "spectrum", "half_span_fwhm", c.spectrum.half_span_fwhm);
    read(s, "spectrum", "probe_power_W", c.spectrum.probe_power_W);
    read(s, "spectrum", "stabilizer_power_W", c.spectrum.stabilizer_power_W);
  }
  if (const auto it = j.find("sweep"); it != j.end()) {
    const json& s = *it;
    require_object(s, "sweep");
    reject_unknown(s, "sweep", {"phi_over_pi_min", "phi_over_pi_max", "phi_points", "f_min_Hz",
                                "f_max_Hz", "f_points"});
    read(s, "sweep", "phi_over_pi_min", c.sweep.phi_over_pi_min);
    read(s, "sweep", "phi_over_pi_max", c.sweep.phi_over_pi_max);
    read(s, "sweep", "phi_points", c.sweep.phi_points);
    read(s, "sweep", "f_min_Hz", c.sweep.f_min_Hz);
    read(s, "sweep", "f_max_Hz", c.sweep.f_max_Hz);
    read(s, "sweep", "f_points", c.sweep.f_points);
  }
  if (const auto it = j.find("tune"); it != j.end()) {
    const json& t = *it;
    require_object(t, "tune");
    reject_unknown(t, "tune", {"b_ip_T", "phi_over_pi_min", "phi_over_pi_max", "points",
                               "noise_Hz", "s_min", "e_j_J", "use_labusch"});
    read(t, "tune", "b_ip_T", c.tune.b_ip_T);
    read(t, "tune", "phi_over_pi_min", c.tune.phi_over_pi_min);
    read(t, "tune", "phi_over_pi_max", c.tune.phi_over_pi_max);
    read(t, "tune", "points", c.tune.points);
    read(t, "tune", "noise_Hz", c.tune.noise_Hz);
    read(t, "tune", "s_min", c.tune.s_min);
    read(t, "tune", "use_labusch", c.tune.use_labusch);
    if (const auto e = t.find("e_j_J"); e != t.end() && !e->is_null()) {
      double v = 0.0;
      read(t, "tune", "e_j_J", v);
      c.tune.e_j_J = v;
    }
  }
  if (const auto it = j.find("labusch"); it != j.end()) {
    const json& l = *it;
    require_object(l, "labusch");
    reject_unknown(l, "labusch", {"alpha_l_ref_N_m4", "b_ref_T", "k"});
    read(l, "labusch", "alpha_l_ref_N_m4", c.labusch.alpha_l_ref_N_m4);
    read(l, "labusch", "b_ref_T", c.labusch.b_ref_T);
    read(l, "labusch", "k", c.labusch.k);
  }
  if (const auto it = j.find("lock"); it != j.end()) {
    const json& l = *it;
    require_object(l, "lock");
    reject_unknown(l, "lock", {"dt_s", "tau_s", "sigma_phi0", "detuning_Hz", "kp", "ki",
                               "setpoint_phi_over_pi", "steps", "sensor_noise"});
    read(l, "lock", "dt_s", c.lock.dt_s);
    read(l, "lock", "tau_s", c.lock.tau_s);
    read(l, "lock", "sigma_phi0", c.lock.sigma_phi0);
    read(l, "lock", "detuning_Hz", c.lock.detuning_Hz);
    read(l, "lock", "kp", c.lock.kp);
    read(l, "lock", "ki", c.lock.ki);
    read(l, "lock", "setpoint_phi_over_pi", c.lock.setpoint_phi_over_pi);
    read(l, "lock", "steps", c.lock.steps);
    read(l, "lock", "sensor_noise", c.lock.sensor_noise);
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["temperature_K"] = c.temperature_K;
  j["squid"] = to_json(c.squid);
  j["string"] = {{"m_r_kg", c.string.m_r_kg},       {"f0_Hz", c.string.f0_Hz},
                 {"gamma_Hz", c.string.gamma_Hz},   {"length_m", c.string.length_m},
                 {"width_m", c.string.width_m},     {"thickness_m", c.string.thickness_m},
                 {"rho_kg_m3", c.string.rho_kg_m3}};
  j["resonator"] = {{"f_max_Hz", c.resonator.f_max_Hz},
                    {"f_min_Hz", c.resonator.f_min_Hz},
                    {"lj_min_H", c.resonator.lj_min_H},
                    {"phi_edge_over_pi", c.resonator.phi_edge_over_pi},
                    {"kappa_Hz", c.resonator.kappa_Hz},
                    {"kappa_ext_fraction", c.resonator.kappa_ext_fraction}};
  j["bias"] = {{"phi_over_pi", c.bias.phi_over_pi},
               {"b_ip_T", c.bias.b_ip_T},
               {"b_oop_T", c.bias.b_oop_T}};
  j["spectrum"] = {{"gain_V_per_m", c.spectrum.gain_V_per_m},
                   {"floor_V2_per_Hz", c.spectrum.floor_V2_per_Hz},
                   {"n_avg", c.spectrum.n_avg},
                   {"bins", c.spectrum.bins},
                   {"half_span_fwhm", c.spectrum.half_span_fwhm},
                   {"probe_power_W", c.spectrum.probe_power_W},
                   {"stabilizer_power_W", c.spectrum.stabilizer_power_W}};
  j["sweep"] = {{"phi_over_pi_min", c.sweep.phi_over_pi_min},
                {"phi_over_pi_max", c.sweep.phi_over_pi_max},
                {"phi_points", c.sweep.phi_points},
                {"f_min_Hz", c.sweep.f_min_Hz},
                {"f_max_Hz", c.sweep.f_max_Hz},
                {"f_points", c.sweep.f_points}};
  j["tune"] = {{"b_ip_T", c.tune.b_ip_T},
               {"phi_over_pi_min", c.tune.phi_over_pi_min},
               {"phi_over_pi_max", c.tune.phi_over_pi_max},
               {"points", c.tune.points},
               {"noise_Hz", c.tune.noise_Hz},
               {"s_min", c.tune.s_min},
               {"use_labusch", c.tune.use_labusch}};
  j["tune"]["e_j_J"] = c.tune.e_j_J ? json(*c.tune.e_j_J) : json(nullptr);
  j["labusch"] = {{"alpha_l_ref_N_m4", c.labusch.alpha_l_ref_N_m4},
                  {"b_ref_T", c.labusch.b_ref_T},
                  {"k", c.labusch.k}};
  j["lock"] = {{"dt_s", c.lock.dt_s},
               {"tau_s", c.lock.tau_s},
               {"sigma_phi0", c.lock.sigma_phi0},
               {"detuning_Hz", c.lock.detuning_Hz},
               {"kp", c.lock.kp},
               {"ki", c.lock.ki},
               {"setpoint_phi_over_pi", c.lock.setpoint_phi_over_pi},
               {"steps", c.lock.steps},
               {"sensor_noise", c.lock.sensor_noise}};
  return j;
}

json to_json(const FitReport& r) {
  json params = json::object();
  json errors = json::object();
  for (std::size_t k = 0; k < r.params.size(); ++k) {
    params[r.names[k]] = r.params[k];
    errors[r.names[k]] = r.std_errors[k];
  }
  return {{"params", params},         {"stderr", errors},
          {"cov", r.covariance},      {"red_chisq", r.red_chisq},
          {"iterations", r.iterations}, {"converged", r.converged},
          {"message", r.message}};
}

json to_json(const PowerLawFit& fit) {
  json j = to_json(fit.report);
  j["derived"] = {{"a", fit.prefactor},
                  {"a_stderr", fit.prefactor_error},
                  {"b_ref_T", fit.b_ref_T},
                  {"rho_kg_m3", fit.rho_kg_m3},
                  {"alpha_l_ref_N_m4", fit.report.param("alpha_l_ref")},
                  {"f00_Hz", fit.report.param("omega00") / (2.0 * pi)}};
  return j;
}

json to_json(const LorentzFit& f) {
  return {{"center_Hz", f.center},
          {"fwhm_Hz", f.fwhm},
          {"area_V2", f.area},
          {"floor_V2_per_Hz", f.floor},
          {"center_err_Hz", f.center_error},
          {"fwhm_err_Hz", f.fwhm_error},
          {"area_err_V2", f.area_error},
          {"floor_err_V2_per_Hz", f.floor_error},
          {"q_factor", f.fwhm > 0.0 ? q_factor(f.center, f.fwhm) : 0.0},
          {"red_chisq", f.red_chisq},
          {"converged", f.converged},
          {"iterations", f.iterations}};
}

json to_json(const LockSummary& s) {
  return {{"open_loop_rms_phi0", s.open_loop_rms},
          {"closed_loop_rms_phi0", s.closed_loop_rms},
          {"suppression_factor", s.suppression_factor},
          {"discriminant_gain_per_phi0", s.discriminant_gain},
          {"warmup_steps", s.warmup_steps}};
}

json to_json(const SpectrumMeta& m) {
  return {{"seed", m.seed},
          {"n_avg", m.n_avg},
          {"bias", {{"phi_over_pi", m.bias.phi_b / pi},
                    {"b_ip_T", m.bias.b_ip_T},
                    {"b_oop_T", m.bias.b_oop_T}}},
          {"probe_power_W", m.probe_power_W},
          {"stabilizer_power_W", m.stabilizer_power_W}};
}

}  // namespace squidmech
