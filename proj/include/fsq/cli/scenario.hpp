#pragma once

#include <memory>
#include <optional>

#include "fsq/atomstark/light_shift.hpp"
#include "fsq/cli/config.hpp"
#include "fsq/dynamics/coherence.hpp"
#include "fsq/focalfield/debye_wolf.hpp"
#include "fsq/focalfield/lightshift_map.hpp"
#include "fsq/trapmodel/trap.hpp"

namespace fsq::cli {

/// Physical objects derived from a configuration: table, focal field, local
/// field environment at the focus and the two-level trap.
struct Scenario {
  ScenarioConfig config;
  std::shared_ptr<const atomstark::PolarizabilityTable> table;
  focalfield::TweezerConfig optics;  // filling factor resolved
  std::shared_ptr<const focalfield::FocalField> focus;
  double waist_nm = 0.0;             // achieved 1/e^2 radius
  atomstark::FieldEnvironment env;   // field angle resolved
  std::shared_ptr<const trapmodel::TrapProbe> probe;
  trapmodel::TrapCharacterization trap;

  /// Polarization at the trap centre, used for angle and wavelength roots.
  atomstark::PolarizationVector center_polarization() const {
    const Eigen::Vector3cd fallback(optics.polarization_axis.x(), optics.polarization_axis.y(), 0.0);
    return focus->at(0.0, 0.0).polarization(fallback);
  }

  trapmodel::TrapCharacterization trap_at(double phi_deg) const {
    return trapmodel::characterize_from_probe(*probe, *table, {}, phi_deg);
  }

  dynamics::ShotModel shot_model() const {
    dynamics::ShotModel m;
    m.trap = trap;
    m.motion = config.motion_model;
    m.temperature_K = config.temperature_K();
    m.noise = config.noise.model();
    m.reference = config.drive.reference;
    m.phi_deg = env.field.phi_deg;
    auto probe_copy = probe;
    auto table_copy = table;
    m.trap_at_phi = [probe_copy, table_copy](double phi) {
      return trapmodel::characterize_from_probe(*probe_copy, *table_copy, {}, phi);
    };
    return m;
  }

  dynamics::RunSettings run_settings() const {
    dynamics::RunSettings run;
    run.trials = config.trials;
    run.seed = config.seed;
    run.threads = config.threads;
    run.spam = config.apply_spam;
    return run;
  }
};

/// Builds the scenario. The trap is only characterized when `with_trap`,
/// since map and root-finding runs do not need it.
inline Scenario build_scenario(const ScenarioConfig& cfg, bool with_trap = true) {
  Scenario s;
  s.config = cfg;
  s.table = std::make_shared<atomstark::PolarizabilityTable>(atomstark::PolarizabilityTable::load(cfg.table_path));

  s.optics.wavelength_nm = cfg.tweezer.wavelength_nm;
  s.optics.power_W = 1e-3 * cfg.tweezer.power_mW;
  s.optics.na = cfg.tweezer.na;
  s.optics.polarization_axis = cfg.tweezer.polarization_axis;
  if (cfg.tweezer.filling_factor) {
    s.optics.filling_factor = *cfg.tweezer.filling_factor;
  } else if (cfg.tweezer.waist_nm) {
    s.optics.target_waist_nm = cfg.tweezer.waist_nm;
    s.optics.filling_factor = focalfield::calibrate_filling_factor(s.optics);
  }
  s.focus = std::make_shared<focalfield::FocalField>(s.optics);
  s.waist_nm = s.focus->waist_nm();

  s.env.wavelength_nm = s.optics.wavelength_nm;
  s.env.power_W = s.optics.power_W;
  s.env.na = s.optics.na;
  s.env.polarization_axis = s.optics.polarization_axis;
  s.env.field.magnitude_G = cfg.field.magnitude_G;
  if (cfg.field.phi_deg) {
    s.env.field.phi_deg = *cfg.field.phi_deg;
  } else {
    const auto magic = atomstark::find_magic_angle(s.env, s.center_polarization(), *s.table);
    if (!magic) throw NumericalError("no magic field angle in [0, 90] deg at this wavelength");
    s.env.field.phi_deg = *magic;
  }
  if (with_trap) {
    s.probe = std::make_shared<trapmodel::TrapProbe>(trapmodel::make_probe(*s.focus, s.env));
    s.trap = trapmodel::characterize_from_probe(*s.probe, *s.table);
  }
  return s;
}

/// Resolved optics and field angle, reported in run metadata.
inline io::Json scenario_json(const Scenario& s) {
  io::Json j{{"filling_factor", s.optics.filling_factor},
             {"waist_nm", s.waist_nm},
             {"field_amplitude_V_per_m", s.focus->amplitude()},
             {"phi_deg", s.env.field.phi_deg}};
  if (s.probe) j["trap"] = io::to_json(s.trap);
  return j;
}

}  // namespace fsq::cli
