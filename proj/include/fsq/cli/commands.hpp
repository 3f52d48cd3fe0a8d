#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fsq/analysis/thermal.hpp"
#include "fsq/cli/scenario.hpp"
#include "fsq/io/csv.hpp"

namespace fsq::cli {

/// Result of one subcommand: the files to write and the summary that goes
/// into the metadata sidecar.
struct CommandOutput {
  io::OutputBundle files;
  io::Json derived = io::Json::object();
  io::Json results = io::Json::object();
};

namespace detail {

inline io::Json nullable(const std::optional<double>& v) { return v ? io::Json(*v) : io::Json(nullptr); }

inline analysis::WindowSpec windows_of(const ScenarioConfig& c) {
  analysis::WindowSpec w;
  w.periods = c.time_grid.periods;
  return w;
}

inline dynamics::Sequence sequence_of(const ScenarioConfig& c) {
  return c.protocol == Protocol::echo ? dynamics::Sequence::echo : dynamics::Sequence::ramsey;
}

}  // namespace detail

inline CommandOutput run_rabi(const ScenarioConfig& cfg) {
  const auto s = build_scenario(cfg);
  const auto t = cfg.time_grid.seconds(cfg.fringe_Hz());
  const auto trace = dynamics::simulate_rabi(s.shot_model(), cfg.rabi_rad_s(), t, s.run_settings());
  CommandOutput out;
  out.derived = scenario_json(s);
  out.files.add("rabi.csv", io::trace_csv(trace));
  double peak = 0.0;
  for (double p : trace.p32_mean) peak = std::max(peak, p);
  out.results = {{"max_p32", peak}};
  return out;
}

/// Ramsey or echo trace (per `protocol`), with a free-frequency fringe fit
/// when the trace allows one.
inline CommandOutput run_ramsey(const ScenarioConfig& cfg) {
  const auto s = build_scenario(cfg);
  const auto t = cfg.time_grid.seconds(cfg.fringe_Hz());
  const auto model = s.shot_model();
  const auto run = s.run_settings();
  const bool echo = cfg.protocol == Protocol::echo;
  const auto trace = echo ? dynamics::simulate_echo(model, cfg.rabi_rad_s(), cfg.fringe_Hz(), t, run)
                          : dynamics::simulate_ramsey(model, cfg.rabi_rad_s(), cfg.fringe_Hz(), t, run);
  CommandOutput out;
  out.derived = scenario_json(s);
  out.files.add(echo ? "echo.csv" : "ramsey.csv", io::trace_csv(trace));
  try {
    out.results["fringe_fit"] = io::to_json(analysis::fit_sinusoid(trace.t_s, trace.p32_mean));
  } catch (const Error& e) {
    out.results["fringe_fit"] = nullptr;
    out.results["fringe_fit_error"] = {{"code", e.code()}, {"message", e.what()}};
  }
  return out;
}

/// Fringe contrast in one window starting at t_R, for each field angle.
inline CommandOutput run_magic_scan(const ScenarioConfig& cfg) {
  const auto s = build_scenario(cfg);
  const auto& scan = cfg.magic_scan;
  const double f = cfg.fringe_Hz();
  const int n = cfg.time_grid.samples_per_window;
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = 1e-6 * scan.t_R_us + cfg.time_grid.periods / f * k / n;
  std::vector<double> phi, contrast, err, center;
  auto model = s.shot_model();
  for (double p : scan.phi_deg) {
    model.trap = s.trap_at(p);
    model.phi_deg = p;
    const auto r = cfg.protocol == Protocol::echo
                       ? dynamics::simulate_echo(model, cfg.rabi_rad_s(), f, t, s.run_settings())
                       : dynamics::simulate_ramsey(model, cfg.rabi_rad_s(), f, t, s.run_settings());
    const auto c = analysis::extract_contrast(dynamics::to_trace(r), f, detail::windows_of(cfg));
    phi.push_back(p);
    contrast.push_back(c.front().contrast);
    err.push_back(c.front().contrast_err);
    center.push_back(model.trap.center_dU_Hz);
  }
  CommandOutput out;
  out.derived = scenario_json(s);
  out.files.add("magic_scan.csv",
                io::format_csv({"phi_deg", "contrast", "contrast_err", "center_dU_Hz"}, {&phi, &contrast, &err, &center}));
  const auto best = std::max_element(contrast.begin(), contrast.end()) - contrast.begin();
  out.results = {{"t_R_s", 1e-6 * scan.t_R_us}, {"best_phi_deg", phi[best]}, {"best_contrast", contrast[best]}};
  return out;
}

/// Contrast decay versus delay and its Gaussian-envelope T2.
inline CommandOutput run_t2(const ScenarioConfig& cfg) {
  const auto s = build_scenario(cfg);
  const auto t = cfg.time_grid.seconds(cfg.fringe_Hz());
  const auto r = dynamics::measure_t2(s.shot_model(), cfg.rabi_rad_s(), cfg.fringe_Hz(), t, s.run_settings(),
                                      detail::windows_of(cfg), detail::sequence_of(cfg));
  CommandOutput out;
  out.derived = scenario_json(s);
  out.files.add("t2_trace.csv", io::trace_csv(r.trace));
  out.files.add("t2_contrast.csv", io::contrast_csv(r.contrast));
  if (r.envelope) {
    out.results["envelope"] = io::to_json(*r.envelope);
  } else {
    out.results["envelope"] = nullptr;
    out.results["t2_lower_bound_s"] = r.t2_lower_bound_s;
  }
  out.results["t2_s"] = r.t2_s();
  return out;
}

/// T2 versus Gaussian field-angle noise around the configured angle.
inline CommandOutput run_phinoise(const ScenarioConfig& cfg) {
  const auto s = build_scenario(cfg);
  const auto t = cfg.time_grid.seconds(cfg.fringe_Hz());
  const auto scan = dynamics::simulate_t2_vs_phinoise(s.shot_model(), cfg.field.magnitude_G, cfg.rabi_rad_s(),
                                                      cfg.fringe_Hz(), cfg.phinoise.phi_std_deg, t,
                                                      s.run_settings(), detail::windows_of(cfg));
  std::vector<double> dphi, dbx, t2, t2e, lb;
  for (const auto& p : scan) {
    dphi.push_back(p.phi_std_deg);
    dbx.push_back(1e3 * p.delta_bx_G);
    t2.push_back(p.t2_s);
    t2e.push_back(p.t2_err_s);
    lb.push_back(p.lower_bound ? 1.0 : 0.0);
  }
  CommandOutput out;
  out.derived = scenario_json(s);
  out.files.add("phinoise.csv", io::format_csv({"phi_std_deg", "delta_bx_mG", "t2_s", "t2_err_s", "lower_bound"},
                                               {&dphi, &dbx, &t2, &t2e, &lb}));
  const auto at_target = dynamics::phi_noise_for_t2(scan, 1e-6 * cfg.phinoise.target_t2_us);
  out.results = {{"target_t2_s", 1e-6 * cfg.phinoise.target_t2_us},
                 {"phi_std_at_target_deg", detail::nullable(at_target)},
                 {"delta_bx_at_target_mG",
                  at_target ? io::Json(1e3 * cfg.field.magnitude_G * std::tan(constants::deg_to_rad(*at_target)))
                            : io::Json(nullptr)}};
  return out;
}

/// Focal-plane map of dU/h and the thermal-average dephasing estimate.
inline CommandOutput run_shiftmap(const ScenarioConfig& cfg) {
  const auto s = build_scenario(cfg);
  focalfield::GridSpec grid = focalfield::GridSpec::around_waist(s.waist_nm, 1.5, cfg.shiftmap.points);
  if (cfg.shiftmap.half_extent_nm) grid.half_extent_nm = *cfg.shiftmap.half_extent_nm;
  const auto map = focalfield::lightshift_map(*s.focus, s.env, *s.table, grid, {}, cfg.threads);
  CommandOutput out;
  out.derived = scenario_json(s);
  out.files.add("shiftmap.csv", io::map_csv(map));
  out.results = {{"center_dU_Hz", map.center_Hz()},
                 {"max_abs_dU_in_waist_Hz", map.max_abs_within(s.waist_nm)},
                 {"min_dU_Hz", map.values_Hz.minCoeff()},
                 {"max_dU_Hz", map.values_Hz.maxCoeff()}};
  if (cfg.temperature_uK > 0) {
    try {
      const double tau = analysis::thermal_dephasing_estimate(map, s.trap, cfg.temperature_K());
      out.results["thermal_dephasing_s"] = std::isfinite(tau) ? io::Json(tau) : io::Json("inf");
    } catch (const GridTooCoarse& e) {
      out.results["thermal_dephasing_s"] = nullptr;
      out.results["thermal_dephasing_error"] = {{"code", e.code()}, {"message", e.what()}};
    }
  }
  return out;
}

/// Magic field angle at the configured wavelength and magic wavelength at
/// the configured angle (0 deg when the angle is "magic").
inline CommandOutput run_magic_find(const ScenarioConfig& cfg_in) {
  ScenarioConfig cfg = cfg_in;
  if (!cfg.field.phi_deg) cfg.field.phi_deg = 0.0;
  const auto s = build_scenario(cfg, false);
  const auto pol = s.center_polarization();
  const auto angle = atomstark::find_magic_angle(s.env, pol, *s.table);
  atomstark::MagicWavelengthOptions wopt;
  wopt.lower_nm = cfg.magic_find.wavelength_min_nm;
  wopt.upper_nm = cfg.magic_find.wavelength_max_nm;
  const auto wavelength = atomstark::find_magic_wavelength(s.env, pol, *s.table, wopt);

  std::string csv = "quantity,value,unit\n";
  if (angle) csv += "magic_angle," + io::format_double(*angle) + ",deg\n";
  if (wavelength) csv += "magic_wavelength," + io::format_double(*wavelength) + ",nm\n";
  CommandOutput out;
  out.derived = scenario_json(s);
  out.files.add("magic_find.csv", csv);
  out.results = {{"wavelength_nm", cfg.tweezer.wavelength_nm},
                 {"magic_angle_deg", detail::nullable(angle)},
                 {"phi_deg", *cfg.field.phi_deg},
                 {"magic_wavelength_nm", detail::nullable(wavelength)},
                 {"center_dU_Hz", atomstark::differential_light_shift(s.env, pol, *s.table)}};
  return out;
}

/// Re-analysis of an existing trace CSV.
inline CommandOutput run_fit(const ScenarioConfig& cfg) {
  if (!cfg.fit) throw ConfigError("fit: configuration needs a \"fit\" section");
  const auto& fs = *cfg.fit;
  const auto trace = io::read_trace_csv_file(fs.trace_csv);
  CommandOutput out;
  if (fs.envelope) {
    analysis::WindowSpec w;
    w.periods = fs.periods;
    const auto c = analysis::extract_contrast(trace, 1e6 * *fs.fringe_MHz, w);
    out.files.add("fit_contrast.csv", io::contrast_csv(c));
    try {
      out.results["envelope"] = io::to_json(analysis::fit_t2_envelope(c));
    } catch (const NoDecayObserved& e) {
      out.results["envelope"] = nullptr;
      out.results["t2_lower_bound_s"] = e.t2_lower_bound();
    }
  } else {
    analysis::SinusoidOptions opt;
    if (fs.fringe_MHz) opt.fixed_frequency_Hz = 1e6 * *fs.fringe_MHz;
    if (!trace.sem.empty() && std::all_of(trace.sem.begin(), trace.sem.end(), [](double v) { return v > 0; }))
      opt.sigma = trace.sem;
    const auto fit = analysis::fit_sinusoid(trace.t_s, trace.p, opt);
    std::vector<double> model, resid;
    for (std::size_t i = 0; i < trace.t_s.size(); ++i) {
      model.push_back(fit(trace.t_s[i]));
      resid.push_back(trace.p[i] - model.back());
    }
    out.files.add("fit_curve.csv",
                  io::format_csv({"t_s", "p32", "model", "residual"}, {&trace.t_s, &trace.p, &model, &resid}));
    out.results["sinusoid"] = io::to_json(fit);
  }
  out.files.add("fit.json", out.results.dump(2) + "\n");
  return out;
}

using CommandFn = std::function<CommandOutput(const ScenarioConfig&)>;

inline const std::map<std::string, CommandFn>& commands() {
  static const std::map<std::string, CommandFn> table = {
      {"rabi", run_rabi},       {"ramsey", run_ramsey},     {"magic-scan", run_magic_scan},
      {"t2", run_t2},           {"phinoise", run_phinoise}, {"shiftmap", run_shiftmap},
      {"magic-find", run_magic_find}, {"fit", run_fit}};
  return table;
}

/// Runs a subcommand and stages its data files plus `metadata.json`, which
/// embeds the fully resolved configuration so the run can be repeated from
/// the sidecar alone.
inline io::OutputBundle run_command(const std::string& name, const ScenarioConfig& cfg) {
  const auto it = commands().find(name);
  if (it == commands().end()) throw InvalidArgument("unknown subcommand " + name);
  CommandOutput out = it->second(cfg);
  io::Json files = io::Json::array();
  for (const auto& f : out.files.files()) files.push_back(f.first);
  files.push_back("metadata.json");
  const io::Json meta{{"tool", "fsqubit"},
                      {"subcommand", name},
                      {"config", to_json(cfg)},
                      {"derived", out.derived},
                      {"results", out.results},
                      {"outputs", files}};
  out.files.add("metadata.json", meta.dump(2) + "\n");
  return out.files;
}

}  // namespace fsq::cli
