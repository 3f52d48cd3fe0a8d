#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>
#include <variant>

#include "fsq/core/constants.hpp"
#include "fsq/core/errors.hpp"
#include "fsq/core/rng.hpp"
#include "fsq/trapmodel/trap.hpp"

namespace fsq::trapmodel {

enum class MotionModel { fock, classical };

/// Harmonic-oscillator occupation numbers along x, y, z.
struct FockState {
  std::array<long, 3> n{0, 0, 0};
};

/// Classical position [m] and velocity [m/s].
struct PhaseSpacePoint {
  Eigen::Vector3d position_m = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity_m_s = Eigen::Vector3d::Zero();
};

using MotionalSample = std::variant<FockState, PhaseSpacePoint>;

inline MotionModel model_of(const MotionalSample& s) {
  return std::holds_alternative<FockState>(s) ? MotionModel::fock : MotionModel::classical;
}

/// Mean Bose occupation 1/(exp(hbar w / kT) - 1); zero at T = 0.
inline double mean_occupation(double temperature_K, double omega_rad_s) {
  if (temperature_K <= 0) return 0.0;
  return 1.0 / std::expm1(constants::hbar * omega_rad_s / (constants::k_B * temperature_K));
}

/// Thermal occupation: P(n) proportional to exp(-n hbar w / kT).
inline long sample_fock_thermal(double temperature_K, double omega_rad_s, RandomStream& rng) {
  if (temperature_K < 0) throw InvalidArgument("temperature must be non-negative");
  if (!(omega_rad_s > 0)) throw InvalidArgument("trap frequency must be positive");
  if (temperature_K == 0) return 0;
  // Success probability of the geometric law is 1 - q with q = exp(-hbar w / kT).
  const double p = -std::expm1(-constants::hbar * omega_rad_s / (constants::k_B * temperature_K));
  if (p >= 1.0) return 0;
  return std::geometric_distribution<long>(p)(rng.engine());
}

/// Gaussian thermal positions, sigma_i = sqrt(kT / (m w_i^2)); velocities
/// sigma_v = sqrt(kT / m).
inline PhaseSpacePoint sample_position_classical(double temperature_K, const Eigen::Vector3d& omega_rad_s,
                                                 double mass_kg, RandomStream& rng) {
  if (temperature_K < 0) throw InvalidArgument("temperature must be non-negative");
  PhaseSpacePoint p;
  const double kt_m = constants::k_B * temperature_K / mass_kg;
  for (int i = 0; i < 3; ++i) p.position_m(i) = std::sqrt(kt_m) / omega_rad_s(i) * rng.normal();
  for (int i = 0; i < 3; ++i) p.velocity_m_s(i) = std::sqrt(kt_m) * rng.normal();
  return p;
}

/// Thermal sample of the lower qubit level's trap (the atom is prepared there).
inline MotionalSample sample_motion(MotionModel model, double temperature_K, const TrapCharacterization& trap,
                                    RandomStream& rng) {
  if (model == MotionModel::fock) {
    FockState s;
    for (int i = 0; i < 3; ++i) s.n[i] = sample_fock_thermal(temperature_K, trap.lower.omega_rad_s(i), rng);
    return s;
  }
  return sample_position_classical(temperature_K, trap.lower.omega_rad_s, trap.mass_kg, rng);
}

/// Detuning delta [rad/s] of the drive from the in-trap line for a frozen
/// motional state, relative to a drive resonant with the free-space line:
///   Fock:      delta = 2 pi dU_c / h + sum_i dw_i (n_i + 1/2)
///   classical: delta = 2 pi dU_c / h + sum_i m (w0_i^2 - w2_i^2) r_i^2 / (2 hbar)
/// with dw = w(3P0) - w(3P2). The classical form is the local differential
/// potential of the harmonic expansion divided by hbar.
inline double detuning_for_sample(const MotionalSample& sample, const TrapCharacterization& trap) {
  const double base = 2.0 * constants::pi * trap.center_dU_Hz;
  if (const auto* f = std::get_if<FockState>(&sample)) {
    const Eigen::Vector3d dw = trap.delta_omega();
    double d = base;
    for (int i = 0; i < 3; ++i) d += dw(i) * (static_cast<double>(f->n[i]) + 0.5);
    return d;
  }
  const auto& p = std::get<PhaseSpacePoint>(sample);
  double d = base;
  for (int i = 0; i < 3; ++i) {
    const double w0 = trap.lower.omega_rad_s(i), w2 = trap.upper.omega_rad_s(i);
    d += trap.mass_kg * (w0 * w0 - w2 * w2) * p.position_m(i) * p.position_m(i) / (2.0 * constants::hbar);
  }
  return d;
}

/// As above, but insists on the ensemble's motional model.
inline double detuning_for_sample(const MotionalSample& sample, const TrapCharacterization& trap,
                                  MotionModel expected) {
  if (model_of(sample) != expected) throw ModelMismatch("motional sample does not match the ensemble model");
  return detuning_for_sample(sample, trap);
}

/// Closed-form thermal mean of detuning_for_sample.
inline double mean_detuning(MotionModel model, double temperature_K, const TrapCharacterization& trap) {
  double d = 2.0 * constants::pi * trap.center_dU_Hz;
  for (int i = 0; i < 3; ++i) {
    const double w0 = trap.lower.omega_rad_s(i), w2 = trap.upper.omega_rad_s(i);
    if (model == MotionModel::fock)
      d += (w0 - w2) * (mean_occupation(temperature_K, w0) + 0.5);
    else
      d += (w0 * w0 - w2 * w2) * constants::k_B * temperature_K / (2.0 * constants::hbar * w0 * w0);
  }
  return d;
}

}  // namespace fsq::trapmodel
