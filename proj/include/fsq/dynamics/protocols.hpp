#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fsq/core/constants.hpp"
#include "fsq/core/errors.hpp"
#include "fsq/core/parallel.hpp"
#include "fsq/core/rng.hpp"
#include "fsq/dynamics/qubit.hpp"
#include "fsq/trapmodel/motion.hpp"

namespace fsq::dynamics {

/// Shot-to-shot technical noise and SPAM parameters.
struct NoiseModel {
  double rabi_frac_std = 0.0;             // relative Gaussian jitter of Omega
  double phi_jitter_std_deg = 0.0;        // Gaussian jitter of the field angle
  double detuning_offset_std_rad_s = 0.0; // extra static detuning per shot
  double prep_efficiency = 1.0;
  double readout_fidelity = 1.0;

  void validate() const {
    if (rabi_frac_std < 0 || phi_jitter_std_deg < 0 || detuning_offset_std_rad_s < 0)
      throw InvalidArgument("noise standard deviations must be non-negative");
    if (prep_efficiency < 0 || prep_efficiency > 1 || readout_fidelity < 0 || readout_fidelity > 1)
      throw InvalidArgument("SPAM efficiencies must lie in [0, 1]");
  }
};

/// Observed 3P2 population. Unprepared atoms (1 - eta) stay outside the
/// qubit and never read out as 3P2; readout infidelity scales the signal, so
/// P_obs = eta F P with zero offset.
inline double apply_spam(double p_ideal, const NoiseModel& noise) {
  return noise.prep_efficiency * noise.readout_fidelity * p_ideal;
}

/// Frequency the drive is tuned to, expressed through the detuning it removes.
enum class DriveReference {
  thermal_mean,  // mean in-trap detuning of the nominal trap at the set temperature
  center,        // differential shift at the trap centre only
  free_space,    // unshifted atomic line
};

using TrapAtPhi = std::function<trapmodel::TrapCharacterization(double phi_deg)>;

/// Everything that fixes the statistics of one shot.
struct ShotModel {
  trapmodel::TrapCharacterization trap;
  trapmodel::MotionModel motion = trapmodel::MotionModel::fock;
  double temperature_K = 0.0;
  NoiseModel noise;
  DriveReference reference = DriveReference::thermal_mean;
  double phi_deg = 0.0;  // nominal field angle, used with angle jitter
  TrapAtPhi trap_at_phi; // required when noise.phi_jitter_std_deg > 0
};

struct RunSettings {
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool spam = true;
  /// Ideal zero-duration pulses; only for analytic cross-checks.
  bool instantaneous_pulses = false;
  /// Echo only: draw an independent detuning for the second half.
  bool fluctuating_detuning = false;
};

struct TraceResult {
  std::vector<double> t_s;
  std::vector<double> p32_mean;
  std::vector<double> p32_sem;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Parameters of one shot. Detunings are relative to the drive reference.
struct Shot {
  double rabi_rad_s = 0.0;
  double detuning_rad_s = 0.0;
  double late_detuning_rad_s = 0.0;  // second echo half; equals detuning unless fluctuating
};

inline double reference_detuning(const ShotModel& m) {
  switch (m.reference) {
    case DriveReference::thermal_mean: return trapmodel::mean_detuning(m.motion, m.temperature_K, m.trap);
    case DriveReference::center: return 2.0 * constants::pi * m.trap.center_dU_Hz;
    case DriveReference::free_space: return 0.0;
  }
  return 0.0;
}

/// Draws the shot for `trial`. Each random quantity comes from its own
/// stream keyed by (seed, trial, purpose), so the draw is independent of
/// evaluation order and the motional state of a trial does not change when
/// another noise source is switched on.
inline Shot draw_shot(const ShotModel& m, double rabi_nominal, const RunSettings& run, std::size_t trial,
                      double reference) {
  Shot s;
  RandomStream rabi_rng(run.seed, trial, StreamTag::rabi);
  s.rabi_rad_s = std::max(0.0, rabi_nominal * (1.0 + m.noise.rabi_frac_std * rabi_rng.normal()));

  const trapmodel::TrapCharacterization* trap = &m.trap;
  trapmodel::TrapCharacterization jittered;
  if (m.noise.phi_jitter_std_deg > 0) {
    if (!m.trap_at_phi) throw InvalidArgument("angle jitter requires a trap evaluator");
    RandomStream angle_rng(run.seed, trial, StreamTag::angle);
    jittered = m.trap_at_phi(m.phi_deg + m.noise.phi_jitter_std_deg * angle_rng.normal());
    trap = &jittered;
  }
  RandomStream motion_rng(run.seed, trial, StreamTag::motion);
  RandomStream offset_rng(run.seed, trial, StreamTag::detuning);
  const auto sample = trapmodel::sample_motion(m.motion, m.temperature_K, *trap, motion_rng);
  s.detuning_rad_s = trapmodel::detuning_for_sample(sample, *trap, m.motion) - reference +
                     m.noise.detuning_offset_std_rad_s * offset_rng.normal();
  s.late_detuning_rad_s = s.detuning_rad_s;
  if (run.fluctuating_detuning) {
    RandomStream late_rng(run.seed, trial, StreamTag::resample);
    const auto late = trapmodel::sample_motion(m.motion, m.temperature_K, *trap, late_rng);
    s.late_detuning_rad_s = trapmodel::detuning_for_sample(late, *trap, m.motion) - reference +
                            m.noise.detuning_offset_std_rad_s * late_rng.normal();
  }
  return s;
}

namespace detail {

/// Runs `per_trial(shot, out)` for every trial (out has one slot per time)
/// and reduces in trial order, so the result is independent of threading.
template <class PerTrial>
TraceResult run_ensemble(const ShotModel& model, double rabi_nominal, const std::vector<double>& t,
                         const RunSettings& run, PerTrial&& per_trial) {
  model.noise.validate();
  if (run.trials < 1) throw InvalidArgument("need at least one trial");
  if (!(rabi_nominal > 0)) throw InvalidArgument("Rabi frequency must be positive");
  const std::size_t nt = t.size();
  const double reference = reference_detuning(model);
  std::vector<double> slots(run.trials * nt);
  parallel_for(
      run.trials,
      [&](std::size_t k) {
        const Shot shot = draw_shot(model, rabi_nominal, run, k, reference);
        per_trial(shot, &slots[k * nt]);
      },
      run.threads);
  TraceResult r;
  r.t_s = t;
  r.trials = run.trials;
  r.seed = run.seed;
  r.p32_mean.assign(nt, 0.0);
  r.p32_sem.assign(nt, 0.0);
  const double n = static_cast<double>(run.trials);
  for (std::size_t j = 0; j < nt; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < run.trials; ++k) sum += slots[k * nt + j];
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t k = 0; k < run.trials; ++k) {
      const double d = slots[k * nt + j] - mean;
      ss += d * d;
    }
    r.p32_mean[j] = mean;
    r.p32_sem[j] = run.trials > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  if (run.spam) {
    const double scale = apply_spam(1.0, model.noise);
    for (std::size_t j = 0; j < nt; ++j) {
      r.p32_mean[j] *= scale;
      r.p32_sem[j] *= scale;
    }
  }
  return r;
}

/// Pulse of nominal area `area` (pulse time fixed by the nominal Rabi
/// frequency) with the shot's actual Rabi frequency and detuning.
inline PulseSegment pulse(double area, double phase, const Shot& shot, double detuning, double rabi_nominal,
                          bool instantaneous) {
  if (instantaneous) return {1.0, area * shot.rabi_rad_s / rabi_nominal, 0.0, phase};
  return {area / rabi_nominal, shot.rabi_rad_s, detuning, phase};
}

}  // namespace detail

/// Rabi flopping from 3P0: P(3P2) after a drive of duration t.
inline TraceResult simulate_rabi(const ShotModel& model, double rabi_rad_s, const std::vector<double>& t,
                                 const RunSettings& run = {}) {
  return detail::run_ensemble(model, rabi_rad_s, t, run, [&](const Shot& shot, double* out) {
    for (std::size_t j = 0; j < t.size(); ++j)
      out[j] = evolve_segment(QubitState::ground(), {t[j], shot.rabi_rad_s, shot.detuning_rad_s, 0.0}).p32();
  });
}

/// Phase-reset Ramsey sequence: pi/2 (phase 0), free evolution t_R, pi/2
/// with phase -2 pi f_fr t_R.
inline TraceResult simulate_ramsey(const ShotModel& model, double rabi_rad_s, double fringe_Hz,
                                   const std::vector<double>& t_r, const RunSettings& run = {}) {
  const bool inst = run.instantaneous_pulses;
  return detail::run_ensemble(model, rabi_rad_s, t_r, run, [&](const Shot& shot, double* out) {
    const double d = shot.detuning_rad_s;
    const QubitState first =
        evolve_segment(QubitState::ground(), detail::pulse(constants::pi / 2, 0.0, shot, d, rabi_rad_s, inst));
    for (std::size_t j = 0; j < t_r.size(); ++j) {
      QubitState s = evolve_segment(first, {t_r[j], 0.0, d, 0.0});
      const double phase = -2.0 * constants::pi * fringe_Hz * t_r[j];
      s = evolve_segment(s, detail::pulse(constants::pi / 2, phase, shot, d, rabi_rad_s, inst));
      out[j] = s.p32();
    }
  });
}

/// Spin echo: pi/2 (0), t/2, pi about y, t/2, pi/2 with phase -2 pi f_fr t.
/// With a fluctuating detuning the second half (and final pulse) uses the
/// shot's late detuning.
inline TraceResult simulate_echo(const ShotModel& model, double rabi_rad_s, double fringe_Hz,
                                 const std::vector<double>& t, const RunSettings& run = {}) {
  const bool inst = run.instantaneous_pulses;
  return detail::run_ensemble(model, rabi_rad_s, t, run, [&](const Shot& shot, double* out) {
    const double d1 = shot.detuning_rad_s, d2 = shot.late_detuning_rad_s;
    const QubitState first =
        evolve_segment(QubitState::ground(), detail::pulse(constants::pi / 2, 0.0, shot, d1, rabi_rad_s, inst));
    for (std::size_t j = 0; j < t.size(); ++j) {
      QubitState s = evolve_segment(first, {0.5 * t[j], 0.0, d1, 0.0});
      s = evolve_segment(s, detail::pulse(constants::pi, constants::pi / 2, shot, d1, rabi_rad_s, inst));
      s = evolve_segment(s, {0.5 * t[j], 0.0, d2, 0.0});
      const double phase = -2.0 * constants::pi * fringe_Hz * t[j];
      s = evolve_segment(s, detail::pulse(constants::pi / 2, phase, shot, d2, rabi_rad_s, inst));
      out[j] = s.p32();
    }
  });
}

/// Clustered sampling for contrast-vs-time studies: `windows` windows whose
/// starts are evenly spread over [0, t_max], each holding `samples` points
/// across `periods` fringe periods.
inline std::vector<double> windowed_time_grid(double t_max_s, int windows, double fringe_Hz, double periods = 5.0,
                                              int samples = 40) {
  if (windows < 2 || samples < 4 || !(t_max_s > 0) || !(fringe_Hz > 0))
    throw InvalidArgument("bad windowed grid specification");
  const double length = periods / fringe_Hz;
  const double gap = t_max_s / (windows - 1);
  if (gap < length) throw InvalidArgument("windows overlap; reduce their number or length");
  const double dt = length / samples;
  std::vector<double> t;
  for (int w = 0; w < windows; ++w)
    for (int k = 0; k < samples; ++k) t.push_back(w * gap + k * dt);
  return t;
}

}  // namespace fsq::dynamics
