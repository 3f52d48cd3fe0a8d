#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include "fsq/core/constants.hpp"
#include "fsq/core/errors.hpp"

namespace fsq::special {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes an n-point rule by Newton iteration on P_n.
inline GaussLegendreRule compute_gauss_legendre(std::size_t n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(constants::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

inline constexpr std::size_t kMinNodes = 16;
inline constexpr std::size_t kLevels = 9;  // 16 ... 4096 nodes

/// Cached rule with 16 * 2^level nodes; safe to call from multiple threads.
inline const GaussLegendreRule& gauss_legendre_level(std::size_t level) {
  static std::array<GaussLegendreRule, kLevels> rules;
  static std::array<std::once_flag, kLevels> flags;
  if (level >= kLevels) throw InvalidArgument("quadrature level out of range");
  std::call_once(flags[level], [level] { rules[level] = compute_gauss_legendre(kMinNodes << level); });
  return rules[level];
}

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class T, std::size_t N>
double magnitude(const std::array<T, N>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, magnitude(x));
  return m;
}

template <class T>
T axpy(const T& acc, double w, const T& v) {
  return acc + w * v;
}
template <class T, std::size_t N>
std::array<T, N> axpy(const std::array<T, N>& acc, double w, const std::array<T, N>& v) {
  std::array<T, N> out = acc;
  for (std::size_t i = 0; i < N; ++i) out[i] += w * v[i];
  return out;
}
template <class T>
T difference(const T& a, const T& b) {
  return a - b;
}
template <class T, std::size_t N>
std::array<T, N> difference(const std::array<T, N>& a, const std::array<T, N>& b) {
  std::array<T, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = a[i] - b[i];
  return out;
}

struct QuadratureOptions {
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 0.0;
  std::size_t max_level = kLevels - 1;
};

template <class T>
struct QuadratureResult {
  T value;
  std::size_t nodes = 0;
};

/// Fixed-rule Gauss-Legendre sum of f over [a, b].
template <class F>
auto gauss_legendre(F&& f, double a, double b, const GaussLegendreRule& rule) {
  using T = decltype(f(a));
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  T acc{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc = axpy(acc, rule.weights[i] * half, f(mid + half * rule.nodes[i]));
  return acc;
}

/// Integrates f over [a, b], doubling the node count until two successive
/// estimates agree to the relative tolerance (measured on the largest
/// component magnitude).
template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  using T = decltype(f(a));
  T previous = gauss_legendre(f, a, b, gauss_legendre_level(0));
  for (std::size_t level = 1; level <= opt.max_level; ++level) {
    const auto& rule = gauss_legendre_level(level);
    T current = gauss_legendre(f, a, b, rule);
    const double change = magnitude(difference(current, previous));
    if (change <= opt.relative_tolerance * magnitude(current) || change <= opt.absolute_tolerance)
      return QuadratureResult<T>{current, rule.nodes.size()};
    previous = current;
  }
  throw QuadratureNotConverged("Gauss-Legendre doubling did not converge to " +
                               std::to_string(opt.relative_tolerance));
}

}  // namespace fsq::special
