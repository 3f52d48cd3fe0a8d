#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "fsq/analysis/least_squares.hpp"
#include "fsq/analysis/sinusoid.hpp"
#include "fsq/core/errors.hpp"

namespace fsq::analysis {

/// Population trace: samples P(t) with optional standard errors.
struct Trace {
  std::vector<double> t_s;
  std::vector<double> p;
  std::vector<double> sem;  // empty or one per sample
};

struct WindowSpec {
  double periods = 5.0;     // window length in fringe periods
  bool normalize = false;   // divide by the first window's contrast
};

struct ContrastPoint {
  double t_center_s = 0.0;
  double contrast = 0.0;
  double contrast_err = 0.0;
};

/// Splits the (sorted) trace into consecutive windows of `periods / f` and
/// fits a fixed-frequency sinusoid in each. A window starts at the first
/// sample not yet used. Contrast is the peak-to-peak amplitude 2A.
inline std::vector<ContrastPoint> extract_contrast(const Trace& trace, double fringe_Hz,
                                                   const WindowSpec& spec = {}) {
  if (!(fringe_Hz > 0)) throw InvalidArgument("fringe frequency must be positive");
  if (!(spec.periods >= 1.0)) throw WindowTooShort("windows must span at least one fringe period");
  const std::size_t n = trace.t_s.size();
  if (trace.p.size() != n || (!trace.sem.empty() && trace.sem.size() != n))
    throw InvalidArgument("trace columns differ in length");
  for (std::size_t i = 1; i < n; ++i)
    if (!(trace.t_s[i] > trace.t_s[i - 1])) throw InvalidArgument("trace times must be increasing");

  const double length = spec.periods / fringe_Hz;
  const double period = 1.0 / fringe_Hz;
  std::vector<ContrastPoint> out;
  std::size_t i = 0;
  while (i < n) {
    const double start = trace.t_s[i];
    std::size_t j = i;
    // Tolerance keeps a sample that sits exactly one window length later,
    // up to rounding, in the next window.
    while (j < n && trace.t_s[j] < start + length * (1.0 - 1e-9)) ++j;
    const std::size_t count = j - i;
    const double spacing = count > 1 ? (trace.t_s[j - 1] - start) / static_cast<double>(count - 1) : 0.0;
    const double covered = spacing * static_cast<double>(count);
    // A remainder shorter than one period at the end of the trace is not a
    // window and is dropped.
    if (j == n && i > 0 && covered < period * (1.0 - 1e-9)) break;
    if (count < 4 || covered < period * (1.0 - 1e-9))
      throw WindowTooShort("window starting at t = " + std::to_string(start) + " s covers less than one fringe period");
    std::vector<double> t(trace.t_s.begin() + i, trace.t_s.begin() + j);
    std::vector<double> y(trace.p.begin() + i, trace.p.begin() + j);
    SinusoidOptions opt;
    opt.fixed_frequency_Hz = fringe_Hz;
    if (!trace.sem.empty()) {
      opt.sigma.assign(trace.sem.begin() + i, trace.sem.begin() + j);
      bool any = false;
      for (double s : opt.sigma) any = any || s > 0;
      if (!any) opt.sigma.clear();
    }
    const auto fit = fit_sinusoid(t, y, opt);
    out.push_back({0.5 * (t.front() + t.back()), 2.0 * fit.amplitude, 2.0 * fit.amplitude_err});
    i = j;
  }
  if (spec.normalize && !out.empty()) {
    const double c0 = out.front().contrast;
    if (!(c0 > 0)) throw FitFailed("first window has zero contrast; cannot normalize");
    for (auto& p : out) {
      p.contrast /= c0;
      p.contrast_err /= c0;
    }
  }
  return out;
}

/// Gaussian envelope C(t) = C0 exp(-t^2 / (2 T2^2)).
struct EnvelopeFit {
  double t2_s = 0.0;
  double c0 = 0.0;
  double t2_err_s = 0.0;
  double c0_err = 0.0;
  double residual_rms = 0.0;

  double operator()(double t) const { return c0 * std::exp(-t * t / (2 * t2_s * t2_s)); }
};

/// Least-squares Gaussian-envelope fit, initialized from the log-linear
/// transform of the positive contrasts. Raises NoDecayObserved (carrying the
/// lower bound t_max / sqrt(2 ln 1.25)) if no contrast drops below 0.8 C0.
inline EnvelopeFit fit_t2_envelope(const std::vector<ContrastPoint>& points, bool weighted = false) {
  if (points.size() < 4) throw FitFailed("envelope fit needs at least 4 points");
  double t_max = 0.0;
  for (const auto& p : points) t_max = std::max(t_max, p.t_center_s);
  const double lower_bound = t_max / std::sqrt(2.0 * std::log(1.0 / 0.8));

  // ln C = ln C0 - t^2 / (2 T2^2), ordinary least squares in t^2.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& p : points) {
    if (!(p.contrast > 0)) continue;
    const double x = p.t_center_s * p.t_center_s, yl = std::log(p.contrast);
    sx += x;
    sy += yl;
    sxx += x * x;
    sxy += x * yl;
    ++m;
  }
  if (m < 2) throw FitFailed("fewer than two positive contrasts");
  const double denom = m * sxx - sx * sx;
  const double slope = denom != 0 ? (m * sxy - sx * sy) / denom : 0.0;
  const double intercept = (sy - slope * sx) / m;
  double c0_init = std::exp(intercept);
  double cmin = std::numeric_limits<double>::infinity();
  for (const auto& p : points) cmin = std::min(cmin, p.contrast);
  if (!(slope < 0) || !(cmin < 0.8 * c0_init))
    throw NoDecayObserved("no contrast below 0.8 C0; T2 exceeds the observation window", lower_bound);
  const double t2_init = std::sqrt(-1.0 / (2.0 * slope));

  const auto n = static_cast<Eigen::Index>(points.size());
  auto model = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
    // q = (C0, T2)
    r.resize(n);
    J.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& p = points[static_cast<std::size_t>(i)];
      const double w = (weighted && p.contrast_err > 0) ? 1.0 / p.contrast_err : 1.0;
      const double t = p.t_center_s;
      const double e = std::exp(-t * t / (2 * q(1) * q(1)));
      r(i) = w * (q(0) * e - p.contrast);
      J(i, 0) = w * e;
      J(i, 1) = w * q(0) * e * t * t / (q(1) * q(1) * q(1));
    }
  };
  Eigen::VectorXd q0(2);
  q0 << c0_init, t2_init;
  const auto lm = levenberg_marquardt(model, q0);
  EnvelopeFit fit;
  fit.c0 = lm.params(0);
  fit.t2_s = std::abs(lm.params(1));
  fit.c0_err = std::sqrt(lm.covariance(0, 0));
  fit.t2_err_s = std::sqrt(lm.covariance(1, 1));
  double ss = 0;
  for (const auto& p : points) ss += (fit(p.t_center_s) - p.contrast) * (fit(p.t_center_s) - p.contrast);
  fit.residual_rms = std::sqrt(ss / static_cast<double>(points.size()));
  if (!(fit.t2_s > 0) || !std::isfinite(fit.t2_s)) throw FitFailed("non-positive T2");
  if (!(fit.c0 > 0 && fit.c0 <= 1.2)) throw FitFailed("initial contrast outside (0, 1.2]");
  return fit;
}

}  // namespace fsq::analysis
