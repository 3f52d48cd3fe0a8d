#pragma once

#include <cmath>
#include <complex>

#include "fsq/core/errors.hpp"

namespace fsq::dynamics {

using cd = std::complex<double>;

/// Amplitudes of the two qubit levels. The spin convention puts 3P2 at
/// sigma_z = +1 and 3P0 at sigma_z = -1.
struct QubitState {
  cd c_p0{1.0, 0.0};
  cd c_p2{0.0, 0.0};

  double p32() const { return std::norm(c_p2); }
  double norm() const { return std::sqrt(std::norm(c_p0) + std::norm(c_p2)); }

  static QubitState ground() { return {}; }
};

/// Constant-parameter interval of the rotating-frame drive.
struct PulseSegment {
  double duration_s = 0.0;
  double rabi_rad_s = 0.0;      // Omega, 0 for free evolution
  double detuning_rad_s = 0.0;  // delta
  double phase_rad = 0.0;       // laser phase phi_L
};

/// Exact propagator of H/hbar = -(delta/2) sz + (Omega/2)(cos phi sx + sin phi sy):
/// rotation by Omega_eff t about (Omega cos phi, Omega sin phi, -delta) / Omega_eff.
inline QubitState evolve_segment(const QubitState& s, const PulseSegment& seg) {
  if (seg.duration_s < 0) throw InvalidArgument("segment duration must be non-negative");
  if (seg.rabi_rad_s < 0) throw InvalidArgument("Rabi frequency must be non-negative");
  const double wx = seg.rabi_rad_s * std::cos(seg.phase_rad);
  const double wy = seg.rabi_rad_s * std::sin(seg.phase_rad);
  const double wz = -seg.detuning_rad_s;
  const double weff = std::sqrt(wx * wx + wy * wy + wz * wz);
  if (weff == 0.0 || seg.duration_s == 0.0) return s;
  const double half = 0.5 * weff * seg.duration_s;
  const double c = std::cos(half), sn = std::sin(half) / weff;
  const cd i(0.0, 1.0);
  // U = cos(half) 1 - i sin(half) (n . sigma) in the (3P2, 3P0) basis.
  const cd u00 = c - i * sn * wz;
  const cd u01 = -i * sn * cd(wx, -wy);
  const cd u10 = -i * sn * cd(wx, wy);
  const cd u11 = c + i * sn * wz;
  QubitState out;
  out.c_p2 = u00 * s.c_p2 + u01 * s.c_p0;
  out.c_p0 = u10 * s.c_p2 + u11 * s.c_p0;
  return out;
}

}  // namespace fsq::dynamics
