#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "fsq/atomstark/light_shift.hpp"
#include "fsq/core/constants.hpp"
#include "fsq/core/errors.hpp"
#include "fsq/focalfield/debye_wolf.hpp"

namespace fsq::trapmodel {

/// Harmonic description of one qubit level's trap.
struct StateTrap {
  std::string state;
  double m_j = 0.0;
  double depth_Hz = 0.0;                                    // -U(0)/h, positive when trapping
  Eigen::Vector3d omega_rad_s = Eigen::Vector3d::Zero();  // along lab x, y, z
};

struct TrapCharacterization {
  StateTrap lower;  // 3P0
  StateTrap upper;  // 3P2, m_J = 0
  double center_dU_Hz = 0.0;
  double mass_kg = constants::mass_sr88_u * constants::amu;

  /// omega(lower) - omega(upper) per axis, rad/s.
  Eigen::Vector3d delta_omega() const { return lower.omega_rad_s - upper.omega_rad_s; }
};

/// Local field (polarization and E0sq) at the centre and at +-step along each
/// lab axis. Index 0 is the centre, then +x, -x, +y, -y, +z, -z. The probe
/// lets the trap be re-derived for a different magnetic-field angle without
/// recomputing the focal field.
struct TrapProbe {
  atomstark::FieldEnvironment env;
  double step_nm = 0.0;
  double mass_kg = constants::mass_sr88_u * constants::amu;
  std::array<atomstark::PolarizationVector, 7> points;
};

inline constexpr std::array<std::array<int, 3>, 7> kStencil = {
    {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

template <class FieldFn>
TrapProbe make_probe(FieldFn&& field, const atomstark::FieldEnvironment& env, double step_nm,
                     double mass_kg = constants::mass_sr88_u * constants::amu) {
  if (!(step_nm > 0)) throw InvalidArgument("stencil step must be positive");
  TrapProbe probe{env, step_nm, mass_kg, {}};
  const Eigen::Vector3cd fallback(env.polarization_axis.x(), env.polarization_axis.y(), 0.0);
  for (std::size_t k = 0; k < kStencil.size(); ++k) {
    const Eigen::Vector3d p(kStencil[k][0] * step_nm, kStencil[k][1] * step_nm, kStencil[k][2] * step_nm);
    probe.points[k] = field(p).polarization(fallback);
  }
  return probe;
}

/// Probe of a Debye-Wolf focus with step w0/50. All stencil points use the
/// same quadrature rule (the finest any of them needs), so the second
/// differences are free of rule-switching noise.
inline TrapProbe make_probe(const focalfield::FocalField& focus, atomstark::FieldEnvironment env,
                            double mass_kg = constants::mass_sr88_u * constants::amu) {
  const auto& c = focus.config();
  env.wavelength_nm = c.wavelength_nm;
  env.power_W = c.power_W;
  env.na = c.na;
  env.polarization_axis = c.polarization_axis;
  const double step = focus.waist_nm() / 50.0;
  std::size_t level = 0;
  for (const auto& s : kStencil) {
    const double rho = step * std::hypot(s[0], s[1]);
    level = std::max(level, focalfield::converged_level(c, rho, step * s[2]));
  }
  return make_probe([&](const Eigen::Vector3d& p) { return focus.at(p, level); }, env, step, mass_kg);
}

namespace detail {

inline StateTrap state_trap(const TrapProbe& probe, const atomstark::FieldEnvironment& env,
                            const atomstark::PolarizabilityTable& table, const std::string& state,
                            double m_j) {
  std::array<double, 7> e{};
  for (std::size_t k = 0; k < 7; ++k)
    e[k] = atomstark::state_levels(env, probe.points[k], table, state).energy(m_j);
  StateTrap t{state, m_j, -e[0], Eigen::Vector3d::Zero()};
  if (!(t.depth_Hz > 0))
    throw NotTrapping("state " + state + " is not attracted to the intensity maximum");
  const double h = probe.step_nm * constants::nm;
  for (int axis = 0; axis < 3; ++axis) {
    const double second = (e[1 + 2 * axis] - 2.0 * e[0] + e[2 + 2 * axis]) / (h * h);  // Hz/m^2
    if (!(second > 0))
      throw NotTrapping("state " + state + " has no restoring force along axis " + std::to_string(axis));
    t.omega_rad_s(axis) = std::sqrt(constants::h * second / probe.mass_kg);
  }
  return t;
}

}  // namespace detail

/// Depths and harmonic frequencies of both qubit levels from a probe.
/// `phi_deg` overrides the field angle of the probe's environment.
inline TrapCharacterization characterize_from_probe(const TrapProbe& probe,
                                                    const atomstark::PolarizabilityTable& table,
                                                    const atomstark::QubitLevels& levels = {},
                                                    std::optional<double> phi_deg = {}) {
  atomstark::FieldEnvironment env = probe.env;
  if (phi_deg) env.field.phi_deg = *phi_deg;
  TrapCharacterization tc;
  tc.mass_kg = probe.mass_kg;
  tc.lower = detail::state_trap(probe, env, table, levels.lower, levels.lower_m);
  tc.upper = detail::state_trap(probe, env, table, levels.upper, levels.upper_m);
  // Energies are -depth, so dU = E_lower - E_upper = depth_upper - depth_lower.
  tc.center_dU_Hz = tc.upper.depth_Hz - tc.lower.depth_Hz;
  return tc;
}

inline TrapCharacterization characterize_trap(const focalfield::TweezerConfig& config,
                                              const atomstark::FieldEnvironment& env,
                                              const atomstark::PolarizabilityTable& table,
                                              const atomstark::QubitLevels& levels = {}) {
  return characterize_from_probe(make_probe(focalfield::FocalField(config), env), table, levels);
}

}  // namespace fsq::trapmodel
