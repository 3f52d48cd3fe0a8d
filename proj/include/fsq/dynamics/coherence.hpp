#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "fsq/analysis/contrast.hpp"
#include "fsq/dynamics/protocols.hpp"

namespace fsq::dynamics {

inline analysis::Trace to_trace(const TraceResult& r) { return {r.t_s, r.p32_mean, r.p32_sem}; }

/// Ramsey contrast decay and its Gaussian-envelope T2. When no decay is
/// visible, `envelope` is empty and `t2_lower_bound_s` is set.
struct CoherenceResult {
  TraceResult trace;
  std::vector<analysis::ContrastPoint> contrast;
  std::optional<analysis::EnvelopeFit> envelope;
  double t2_lower_bound_s = 0.0;

  /// Fitted T2, or the lower bound when no decay was observed.
  double t2_s() const { return envelope ? envelope->t2_s : t2_lower_bound_s; }
};

enum class Sequence { ramsey, echo };

inline CoherenceResult measure_t2(const ShotModel& model, double rabi_rad_s, double fringe_Hz,
                                  const std::vector<double>& t_r, const RunSettings& run = {},
                                  const analysis::WindowSpec& windows = {}, Sequence sequence = Sequence::ramsey) {
  CoherenceResult out;
  out.trace = sequence == Sequence::ramsey ? simulate_ramsey(model, rabi_rad_s, fringe_Hz, t_r, run)
                                           : simulate_echo(model, rabi_rad_s, fringe_Hz, t_r, run);
  out.contrast = analysis::extract_contrast(to_trace(out.trace), fringe_Hz, windows);
  try {
    out.envelope = analysis::fit_t2_envelope(out.contrast);
  } catch (const NoDecayObserved& e) {
    out.t2_lower_bound_s = e.t2_lower_bound();
  }
  return out;
}

struct PhiNoisePoint {
  double phi_std_deg = 0.0;
  double t2_s = 0.0;
  double t2_err_s = 0.0;
  bool lower_bound = false;   // t2_s is only a lower bound
  double delta_bx_G = 0.0;    // |B| tan(dphi)
};

/// T2 versus Gaussian field-angle noise around the model's nominal (magic)
/// angle. All grid points share the seed, so each trial keeps its motional
/// state and unit-normal angle draw across the scan (common random numbers).
inline std::vector<PhiNoisePoint> simulate_t2_vs_phinoise(ShotModel model, double field_G, double rabi_rad_s,
                                                          double fringe_Hz, const std::vector<double>& phi_std_deg,
                                                          const std::vector<double>& t_r, const RunSettings& run = {},
                                                          const analysis::WindowSpec& windows = {}) {
  std::vector<PhiNoisePoint> out;
  for (double dphi : phi_std_deg) {
    model.noise.phi_jitter_std_deg = dphi;
    const auto r = measure_t2(model, rabi_rad_s, fringe_Hz, t_r, run, windows);
    PhiNoisePoint p;
    p.phi_std_deg = dphi;
    p.t2_s = r.t2_s();
    p.t2_err_s = r.envelope ? r.envelope->t2_err_s : 0.0;
    p.lower_bound = !r.envelope;
    p.delta_bx_G = field_G * std::tan(constants::deg_to_rad(dphi));
    out.push_back(p);
  }
  return out;
}

/// Angle noise at which T2 falls to `target_s`, by log-linear interpolation
/// between the bracketing grid points; nullopt if the scan never reaches it.
inline std::optional<double> phi_noise_for_t2(const std::vector<PhiNoisePoint>& scan, double target_s) {
  for (std::size_t i = 1; i < scan.size(); ++i) {
    const auto& a = scan[i - 1];
    const auto& b = scan[i];
    if (a.t2_s >= target_s && b.t2_s <= target_s) {
      if (a.t2_s == b.t2_s) return a.phi_std_deg;
      const double u = std::log(a.t2_s / target_s) / std::log(a.t2_s / b.t2_s);
      return a.phi_std_deg + u * (b.phi_std_deg - a.phi_std_deg);
    }
  }
  return std::nullopt;
}

}  // namespace fsq::dynamics
