#pragma once

#include <json.hpp>

#include "fsq/analysis/contrast.hpp"
#include "fsq/analysis/sinusoid.hpp"
#include "fsq/trapmodel/trap.hpp"

namespace fsq::io {

using Json = nlohmann::ordered_json;

inline Json to_json(const trapmodel::StateTrap& s) {
  return Json{{"state", s.state},
              {"m_j", s.m_j},
              {"depth_Hz", s.depth_Hz},
              {"omega_rad_s", {s.omega_rad_s.x(), s.omega_rad_s.y(), s.omega_rad_s.z()}}};
}

inline Json to_json(const trapmodel::TrapCharacterization& t) {
  return Json{{"lower", to_json(t.lower)}, {"upper", to_json(t.upper)}, {"center_dU_Hz", t.center_dU_Hz},
              {"mass_kg", t.mass_kg}};
}

inline trapmodel::StateTrap state_trap_from_json(const Json& j) {
  trapmodel::StateTrap s;
  s.state = j.at("state").get<std::string>();
  s.m_j = j.at("m_j").get<double>();
  s.depth_Hz = j.at("depth_Hz").get<double>();
  const auto& w = j.at("omega_rad_s");
  s.omega_rad_s = Eigen::Vector3d(w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>());
  return s;
}

inline trapmodel::TrapCharacterization trap_from_json(const Json& j) {
  trapmodel::TrapCharacterization t;
  t.lower = state_trap_from_json(j.at("lower"));
  t.upper = state_trap_from_json(j.at("upper"));
  t.center_dU_Hz = j.at("center_dU_Hz").get<double>();
  t.mass_kg = j.at("mass_kg").get<double>();
  return t;
}

inline Json to_json(const analysis::SinusoidFit& f) {
  return Json{{"model", "A sin(2 pi f t + phase) + offset"},
              {"amplitude", f.amplitude},
              {"amplitude_err", f.amplitude_err},
              {"frequency_Hz", f.frequency_Hz},
              {"frequency_err_Hz", f.frequency_err},
              {"frequency_fixed", f.frequency_fixed},
              {"phase_rad", f.phase_rad},
              {"phase_err_rad", f.phase_err},
              {"offset", f.offset},
              {"offset_err", f.offset_err},
              {"residual_rms", f.residual_rms}};
}

inline Json to_json(const analysis::EnvelopeFit& f) {
  return Json{{"model", "C0 exp(-t^2 / (2 T2^2))"},
              {"t2_s", f.t2_s},
              {"t2_err_s", f.t2_err_s},
              {"c0", f.c0},
              {"c0_err", f.c0_err},
              {"residual_rms", f.residual_rms}};
}

}  // namespace fsq::io
