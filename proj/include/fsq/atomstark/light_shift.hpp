#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>

#include "fsq/atomstark/hamiltonian.hpp"
#include "fsq/atomstark/polarizability.hpp"

namespace fsq::atomstark {

/// Tweezer optics plus magnetic field as seen by the atom.
struct FieldEnvironment {
  double wavelength_nm = 539.91;
  double power_W = 0.0;
  double na = 0.5;
  Eigen::Vector2d polarization_axis = Eigen::Vector2d(0, 1);  // transverse unit vector
  MagneticField field;
};

/// The two qubit levels: m_J of each within its manifold.
struct QubitLevels {
  std::string lower = "3P0";
  std::string upper = "3P2";
  double lower_m = 0.0;
  double upper_m = 0.0;
};

/// Unit vector of the magnetic field in the lab frame (z = propagation).
/// phi is measured from the polarization axis p towards (p_y, -p_x); for
/// p = y this is phi = atan(B_x / B_y).
inline Eigen::Vector3d field_direction(const Eigen::Vector2d& polarization_axis, double phi_deg) {
  const Eigen::Vector2d p = polarization_axis.normalized();
  const Eigen::Vector2d r(p.y(), -p.x());
  const double phi = constants::deg_to_rad(phi_deg);
  const Eigen::Vector2d b = std::cos(phi) * p + std::sin(phi) * r;
  return {b.x(), b.y(), 0.0};
}

/// Re-expresses a lab-frame polarization in the frame whose z axis is the
/// magnetic field (x' = propagation axis, y' = z' x x').
inline PolarizationVector to_field_frame(const PolarizationVector& lab,
                                         const Eigen::Vector2d& polarization_axis,
                                         double phi_deg) {
  const Eigen::Vector3d zp = field_direction(polarization_axis, phi_deg);
  const Eigen::Vector3d xp = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d yp = zp.cross(xp);
  Eigen::Vector3cd e;
  e(0) = xp.cast<std::complex<double>>().dot(lab.eps);
  e(1) = yp.cast<std::complex<double>>().dot(lab.eps);
  e(2) = zp.cast<std::complex<double>>().dot(lab.eps);
  // dot() conjugates its first argument; the basis is real so this is a plain projection.
  return {e, lab.e0sq};
}

/// Adiabatically labeled level energies (E/h, Hz) of one state at the local
/// field, including the Zeeman term.
inline LevelShifts state_levels(const FieldEnvironment& env, const PolarizationVector& lab_pol,
                                const PolarizabilityTable& table, const std::string& state) {
  const StateInfo& info = table.state(state);
  const Polarizability alpha = interpolate_polarizability(table, state, env.wavelength_nm);
  const PolarizationVector local =
      to_field_frame(lab_pol, env.polarization_axis, env.field.phi_deg);
  const auto stark = stark_hamiltonian(alpha, info.j, local);
  const auto zeeman = zeeman_hamiltonian(env.field, info.g_j, info.j);
  return level_shifts(stark, zeeman);
}

struct QubitEnergies {
  double lower_Hz = 0.0;
  double upper_Hz = 0.0;
  /// dU/h = E_lower - E_upper (light + Zeeman shift of the qubit levels only).
  double differential_Hz() const { return lower_Hz - upper_Hz; }
};

inline QubitEnergies qubit_energies(const FieldEnvironment& env, const PolarizationVector& lab_pol,
                                    const PolarizabilityTable& table,
                                    const QubitLevels& levels = {}) {
  return {state_levels(env, lab_pol, table, levels.lower).energy(levels.lower_m),
          state_levels(env, lab_pol, table, levels.upper).energy(levels.upper_m)};
}

/// dU/h = (E_3P0 - E_3P2,mJ=0)/h in Hz. Negative means the lower qubit state
/// is the more deeply trapped one.
inline double differential_light_shift(const FieldEnvironment& env,
                                       const PolarizationVector& lab_pol,
                                       const PolarizabilityTable& table,
                                       const QubitLevels& levels = {}) {
  return qubit_energies(env, lab_pol, table, levels).differential_Hz();
}

struct MagicAngleOptions {
  double tolerance_deg = 1e-6;
  QubitLevels levels;
};

/// Bisection root of dU(phi) on [0, 90] deg at fixed local field, or nullopt
/// when dU(0) and dU(90) share a sign.
inline std::optional<double> find_magic_angle(FieldEnvironment env, const PolarizationVector& lab_pol,
                                              const PolarizabilityTable& table,
                                              const MagicAngleOptions& opt = {}) {
  auto f = [&](double phi) {
    env.field.phi_deg = phi;
    return differential_light_shift(env, lab_pol, table, opt.levels);
  };
  double lo = 0.0, hi = 90.0;
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) return std::nullopt;
  while (hi - lo > opt.tolerance_deg) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct MagicWavelengthOptions {
  double tolerance_nm = 1e-3;
  std::optional<double> lower_nm;
  std::optional<double> upper_nm;
  QubitLevels levels;
};

/// Root of dU(lambda) at fixed phi and fixed local field. Table grid points in
/// the search range are scanned for sign changes; the bracket closest to the
/// environment's wavelength is refined by bisection. nullopt if none exists.
inline std::optional<double> find_magic_wavelength(FieldEnvironment env,
                                                   const PolarizationVector& lab_pol,
                                                   const PolarizabilityTable& table,
                                                   const MagicWavelengthOptions& opt = {}) {
  const auto [lo_a, hi_a] = table.span(opt.levels.lower);
  const auto [lo_b, hi_b] = table.span(opt.levels.upper);
  const double lo = std::max({lo_a, lo_b, opt.lower_nm.value_or(-1e300)});
  const double hi = std::min({hi_a, hi_b, opt.upper_nm.value_or(1e300)});
  if (!(lo < hi)) return std::nullopt;

  std::set<double> grid{lo, hi};
  for (const auto* s : {&opt.levels.lower, &opt.levels.upper})
    for (const auto& e : table.entries(*s))
      if (e.wavelength_nm > lo && e.wavelength_nm < hi) grid.insert(e.wavelength_nm);

  const double target = env.wavelength_nm;
  auto f = [&](double wl) {
    env.wavelength_nm = wl;
    return differential_light_shift(env, lab_pol, table, opt.levels);
  };

  std::optional<std::pair<double, double>> best;
  double best_distance = 1e300;
  double prev_wl = *grid.begin();
  double prev_f = f(prev_wl);
  if (prev_f == 0.0) {
    best = std::make_pair(prev_wl, prev_wl);
    best_distance = std::abs(prev_wl - target);
  }
  for (auto it = std::next(grid.begin()); it != grid.end(); ++it) {
    const double wl = *it;
    const double fw = f(wl);
    if (fw == 0.0 || (fw > 0) != (prev_f > 0)) {
      const double d = std::min(std::abs(wl - target), std::abs(prev_wl - target));
      const bool inside = target >= prev_wl && target <= wl;
      if (inside || d < best_distance) {
        best = fw == 0.0 ? std::make_pair(wl, wl) : std::make_pair(prev_wl, wl);
        best_distance = inside ? -1.0 : d;
      }
    }
    prev_wl = wl;
    prev_f = fw;
  }
  if (!best) return std::nullopt;
  double a = best->first, b = best->second;
  if (a == b) return a;
  double fa = f(a);
  while (b - a > opt.tolerance_nm) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (fa > 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace fsq::atomstark
