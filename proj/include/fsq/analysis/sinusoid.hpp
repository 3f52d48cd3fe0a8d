#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fsq/analysis/least_squares.hpp"
#include "fsq/core/constants.hpp"
#include "fsq/core/errors.hpp"

namespace fsq::analysis {

/// y = A sin(2 pi f t + phase) + offset, with A >= 0.
struct SinusoidFit {
  double amplitude = 0.0;
  double frequency_Hz = 0.0;
  double phase_rad = 0.0;
  double offset = 0.0;
  double amplitude_err = 0.0;
  double frequency_err = 0.0;  // zero when the frequency was fixed
  double phase_err = 0.0;
  double offset_err = 0.0;
  double residual_rms = 0.0;
  bool frequency_fixed = false;

  double operator()(double t) const {
    return amplitude * std::sin(2 * constants::pi * frequency_Hz * t + phase_rad) + offset;
  }
};

struct SinusoidOptions {
  std::optional<double> fixed_frequency_Hz;
  /// Search band for a free frequency; defaults to [1/span, Nyquist of the
  /// median sample spacing].
  std::optional<double> min_frequency_Hz;
  std::optional<double> max_frequency_Hz;
  double oversampling = 10.0;
  /// Per-point standard errors; when given they set the fixed-frequency
  /// parameter covariance by linear error propagation.
  std::vector<double> sigma;
};

namespace detail {

struct LinearSinusoid {
  Eigen::Vector3d beta;  // (a, b, c) with y = a sin + b cos + c
  Eigen::Matrix3d covariance;
  double ssr = 0.0;
};

inline LinearSinusoid linear_sinusoid(const std::vector<double>& t, const std::vector<double>& y, double f,
                                      const std::vector<double>& sigma, bool want_covariance) {
  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ph = 2 * constants::pi * f * t[i];
    X(i, 0) = std::sin(ph);
    X(i, 1) = std::cos(ph);
    X(i, 2) = 1.0;
    Y(i) = y[i];
  }
  const Eigen::Matrix3d XtX = X.transpose() * X;
  Eigen::LDLT<Eigen::Matrix3d> ldlt(XtX);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12)
    throw FitFailed("sinusoid design matrix is singular (sampling aliases the frequency)");
  LinearSinusoid out;
  out.beta = ldlt.solve(X.transpose() * Y);
  out.ssr = (Y - X * out.beta).squaredNorm();
  if (want_covariance) {
    const Eigen::Matrix3d inv = ldlt.solve(Eigen::Matrix3d::Identity());
    if (!sigma.empty()) {
      Eigen::MatrixXd Xs = X;
      for (Eigen::Index i = 0; i < n; ++i) Xs.row(i) *= sigma[static_cast<std::size_t>(i)];
      out.covariance = inv * (Xs.transpose() * Xs) * inv;
    } else {
      out.covariance = inv * (out.ssr / std::max<double>(1.0, static_cast<double>(n - 3)));
    }
  }
  return out;
}

inline SinusoidFit from_linear(const LinearSinusoid& lin, double f, std::size_t n) {
  SinusoidFit fit;
  const double a = lin.beta(0), b = lin.beta(1);
  fit.amplitude = std::hypot(a, b);
  fit.phase_rad = std::atan2(b, a);
  fit.offset = lin.beta(2);
  fit.frequency_Hz = f;
  fit.frequency_fixed = true;
  fit.residual_rms = std::sqrt(lin.ssr / static_cast<double>(n));
  const Eigen::Matrix2d C = lin.covariance.topLeftCorner<2, 2>();
  if (fit.amplitude > 0) {
    const Eigen::Vector2d gA(a / fit.amplitude, b / fit.amplitude);
    const Eigen::Vector2d gP(-b / (fit.amplitude * fit.amplitude), a / (fit.amplitude * fit.amplitude));
    fit.amplitude_err = std::sqrt(std::max(0.0, gA.dot(C * gA)));
    fit.phase_err = std::sqrt(std::max(0.0, gP.dot(C * gP)));
  } else {
    fit.amplitude_err = std::sqrt(std::max(0.0, 0.5 * C.trace()));
    fit.phase_err = constants::pi;
  }
  fit.offset_err = std::sqrt(std::max(0.0, lin.covariance(2, 2)));
  return fit;
}

}  // namespace detail

/// Least-squares sinusoid. With a fixed frequency the problem is linear and
/// solved exactly. A free frequency is located at the peak of the
/// least-squares periodogram, refined by golden-section search and polished
/// jointly with the other parameters by Levenberg-Marquardt.
inline SinusoidFit fit_sinusoid(const std::vector<double>& t, const std::vector<double>& y,
                                const SinusoidOptions& opt = {}) {
  if (t.size() != y.size()) throw InvalidArgument("t and y differ in length");
  if (!opt.sigma.empty() && opt.sigma.size() != t.size()) throw InvalidArgument("sigma length mismatch");
  const std::size_t n = t.size();
  if (opt.fixed_frequency_Hz) {
    if (n < 3) throw FitFailed("need at least 3 points for a fixed-frequency sinusoid");
    const auto lin = detail::linear_sinusoid(t, y, *opt.fixed_frequency_Hz, opt.sigma, true);
    return detail::from_linear(lin, *opt.fixed_frequency_Hz, n);
  }

  if (n < 6) throw FitFailed("need at least 6 points for a free-frequency sinusoid");
  const auto [tmin_it, tmax_it] = std::minmax_element(t.begin(), t.end());
  const double span = *tmax_it - *tmin_it;
  if (!(span > 0)) throw FitFailed("time samples do not span an interval");
  std::vector<double> ts(t);
  std::sort(ts.begin(), ts.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (ts[i] > ts[i - 1]) gaps.push_back(ts[i] - ts[i - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  const double median_dt = gaps[gaps.size() / 2];

  const double f_lo = opt.min_frequency_Hz.value_or(1.0 / span);
  const double f_hi = opt.max_frequency_Hz.value_or(0.5 / median_dt);
  if (!(f_hi > f_lo)) throw FitFailed("empty frequency search band");
  const double df = 1.0 / (opt.oversampling * span);
  auto ssr_at = [&](double f) { return detail::linear_sinusoid(t, y, f, {}, false).ssr; };

  double best_f = f_lo, best = std::numeric_limits<double>::infinity();
  const auto steps = static_cast<std::size_t>(std::ceil((f_hi - f_lo) / df));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double f = std::min(f_lo + k * df, f_hi);
    double s;
    try {
      s = ssr_at(f);
    } catch (const FitFailed&) {
      continue;
    }
    if (s < best) {
      best = s;
      best_f = f;
    }
  }
  // Golden-section search on the SSR inside one grid cell of the peak.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::max(f_lo, best_f - df), b = std::min(f_hi, best_f + df);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = ssr_at(c), fd = ssr_at(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * best_f; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = ssr_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = ssr_at(d);
    }
  }
  const double f_gs = 0.5 * (a + b);
  const auto lin = detail::linear_sinusoid(t, y, f_gs, {}, true);
  const auto start = detail::from_linear(lin, f_gs, n);

  // Joint polish; parameters (A, f, phase, c).
  const double t0 = 0.0;
  auto model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
    r.resize(static_cast<Eigen::Index>(n));
    J.resize(static_cast<Eigen::Index>(n), 4);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double w = 2 * constants::pi * (t[i] - t0);
      const double ph = w * p(1) + p(2);
      const double s = std::sin(ph), co = std::cos(ph);
      r(k) = p(0) * s + p(3) - y[i];
      J(k, 0) = s;
      J(k, 1) = p(0) * co * w;
      J(k, 2) = p(0) * co;
      J(k, 3) = 1.0;
    }
  };
  Eigen::VectorXd p0(4);
  p0 << start.amplitude, start.frequency_Hz, start.phase_rad, start.offset;
  const auto lm = levenberg_marquardt(model, p0);

  SinusoidFit fit;
  fit.amplitude = lm.params(0);
  fit.frequency_Hz = lm.params(1);
  fit.phase_rad = lm.params(2);
  fit.offset = lm.params(3);
  if (fit.amplitude < 0) {
    fit.amplitude = -fit.amplitude;
    fit.phase_rad += constants::pi;
  }
  fit.phase_rad = std::remainder(fit.phase_rad, 2 * constants::pi);
  fit.amplitude_err = std::sqrt(lm.covariance(0, 0));
  fit.frequency_err = std::sqrt(lm.covariance(1, 1));
  fit.phase_err = std::sqrt(lm.covariance(2, 2));
  fit.offset_err = std::sqrt(lm.covariance(3, 3));
  fit.residual_rms = std::sqrt(lm.ssr / static_cast<double>(n));
  fit.frequency_fixed = false;
  if (!(fit.residual_rms < fit.amplitude)) throw FitFailed("residual RMS exceeds the fitted amplitude");
  if (fit.frequency_Hz * span < 1.0) throw FitFailed("data span less than one period of the fitted frequency");
  return fit;
}

}  // namespace fsq::analysis
