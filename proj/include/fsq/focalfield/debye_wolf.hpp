#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <optional>

#include "fsq/atomstark/hamiltonian.hpp"
#include "fsq/core/constants.hpp"
#include "fsq/core/errors.hpp"
#include "fsq/special/bessel.hpp"
#include "fsq/special/quadrature.hpp"

namespace fsq::focalfield {

using cd = std::complex<double>;

/// Focusing optics. The polarization axis is a transverse lab-frame unit
/// vector; the beam propagates along +z.
struct TweezerConfig {
  double wavelength_nm = 539.91;
  double power_W = 0.0;
  double na = 0.5;
  Eigen::Vector2d polarization_axis = Eigen::Vector2d(0, 1);
  double filling_factor = 1.0;
  std::optional<double> target_waist_nm;

  void validate() const {
    if (!(wavelength_nm > 0)) throw InvalidArgument("wavelength must be positive");
    if (!(na > 0 && na < 1)) throw InvalidArgument("NA must lie in (0, 1)");
    if (!(power_W >= 0)) throw InvalidArgument("power must be non-negative");
    if (!(filling_factor > 0)) throw InvalidArgument("filling factor must be positive");
    if (!(std::abs(polarization_axis.norm() - 1.0) < 1e-9))
      throw InvalidArgument("polarization axis must be a unit vector");
  }
};

/// Complex field amplitudes at one point. E in V/m, H in A/m.
struct FieldSample {
  Eigen::Vector3d position_nm = Eigen::Vector3d::Zero();
  Eigen::Vector3cd E = Eigen::Vector3cd::Zero();
  Eigen::Vector3cd H = Eigen::Vector3cd::Zero();

  /// |E|^2 / 4, the field-strength-squared entering U = -alpha E0sq.
  double e0sq() const { return E.squaredNorm() / 4.0; }
  /// Time-averaged Poynting flux density along z, W/m^2.
  double poynting_z() const { return 0.5 * (E(0) * std::conj(H(1)) - E(1) * std::conj(H(0))).real(); }
  /// Unit polarization vector and E0sq. A vanishing field keeps the supplied
  /// fallback direction so that zero-power configurations stay well defined.
  atomstark::PolarizationVector polarization(
      const Eigen::Vector3cd& fallback = Eigen::Vector3cd(0, 1, 0)) const {
    const double n = E.norm();
    if (n == 0.0) return {fallback.normalized(), 0.0};
    return {E / n, e0sq()};
  }
};

/// The three diffraction integrals for a given transverse distance and
/// defocus (dimensionless; the prefactor lives in FocalField::amplitude).
struct DiffractionIntegrals {
  cd I0, I1, I2;
};

namespace detail {

struct Aperture {
  double k;          // wavenumber, 1/m
  double theta_max;  // rad
  double f0_sin;     // filling factor times sin(theta_max)

  explicit Aperture(const TweezerConfig& c)
      : k(2.0 * constants::pi / (c.wavelength_nm * constants::nm)),
        theta_max(std::asin(c.na)),
        f0_sin(c.filling_factor * c.na) {}

  double apodization(double theta) const {
    const double s = std::sin(theta) / f0_sin;
    return std::sqrt(std::cos(theta)) * std::exp(-s * s);
  }

  std::array<cd, 3> integrand(double theta, double rho_m, double z_m) const {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double fw = apodization(theta);
    const double a = k * rho_m * st;
    const cd phase = std::polar(1.0, k * z_m * ct);
    return {fw * st * (1.0 + ct) * special::bessel_j(0, a) * phase,
            fw * st * st * special::bessel_j(1, a) * phase,
            fw * st * (1.0 - ct) * special::bessel_j(2, a) * phase};
  }
};

}  // namespace detail

/// Diffraction integrals with adaptive node doubling. When `fixed_level` is
/// given the rule with 16 * 2^level nodes is used without adaptation, which
/// keeps finite-difference stencils smooth in position.
inline DiffractionIntegrals diffraction_integrals(const TweezerConfig& config, double rho_nm,
                                                  double z_nm,
                                                  std::optional<std::size_t> fixed_level = {}) {
  const detail::Aperture ap(config);
  const double rho = rho_nm * constants::nm, z = z_nm * constants::nm;
  auto f = [&](double th) { return ap.integrand(th, rho, z); };
  std::array<cd, 3> v;
  if (fixed_level) {
    v = special::gauss_legendre(f, 0.0, ap.theta_max, special::gauss_legendre_level(*fixed_level));
  } else {
    special::QuadratureOptions opt;
    opt.absolute_tolerance = 1e-300;
    v = special::integrate_adaptive(f, 0.0, ap.theta_max, opt).value;
  }
  return {v[0], v[1], v[2]};
}

/// Level of the Gauss-Legendre rule the adaptive scheme settles on at a point.
inline std::size_t converged_level(const TweezerConfig& config, double rho_nm, double z_nm) {
  const detail::Aperture ap(config);
  const double rho = rho_nm * constants::nm, z = z_nm * constants::nm;
  auto f = [&](double th) { return ap.integrand(th, rho, z); };
  const auto r = special::integrate_adaptive(f, 0.0, ap.theta_max);
  std::size_t level = 0;
  while ((special::kMinNodes << level) < r.nodes) ++level;
  return level;
}

/// Power through the focus per unit |A|^2 (W m^2 / V^2), evaluated at the
/// pupil: P = 4 pi |A|^2 / (k^2 Z0) * int fw^2 sin(theta) d(theta).
inline double pupil_power_per_amplitude2(const TweezerConfig& config) {
  const detail::Aperture ap(config);
  auto f = [&](double th) {
    const double fw = ap.apodization(th);
    return fw * fw * std::sin(th);
  };
  const double integral = special::integrate_adaptive(f, 0.0, ap.theta_max).value;
  return 4.0 * constants::pi * integral / (ap.k * ap.k * constants::Z_0);
}

/// Vector focal field of a linearly polarized, Gaussian-apodized aplanatic
/// focus. The amplitude is fixed once from the pupil power.
class FocalField {
 public:
  explicit FocalField(TweezerConfig config) : config_(std::move(config)) {
    config_.validate();
    amplitude_ = config_.power_W == 0.0
                     ? 0.0
                     : std::sqrt(config_.power_W / pupil_power_per_amplitude2(config_));
    const Eigen::Vector2d p = config_.polarization_axis;
    p_ = Eigen::Vector3d(p.x(), p.y(), 0.0);
    q_ = Eigen::Vector3d::UnitZ().cross(p_);
  }

  const TweezerConfig& config() const { return config_; }
  /// Field prefactor A in V/m (real, positive).
  double amplitude() const { return amplitude_; }
  void set_amplitude(double a) { amplitude_ = a; }

  FieldSample at(const Eigen::Vector3d& position_nm,
                 std::optional<std::size_t> fixed_level = {}) const {
    const double u = position_nm.head<2>().dot(p_.head<2>());
    const double v = position_nm.head<2>().dot(q_.head<2>());
    const double rho = std::hypot(u, v);
    const double az = std::atan2(v, u);
    const auto I = diffraction_integrals(config_, rho, position_nm.z(), fixed_level);
    return assemble(position_nm, I, az);
  }

  FieldSample at(double x_nm, double y_nm, double z_nm = 0.0) const {
    return at(Eigen::Vector3d(x_nm, y_nm, z_nm));
  }

  /// 1/e^2 radius of |E|^2 along the polarization axis in the focal plane.
  double waist_nm() const {
    const double i0 = at(0, 0).E.squaredNorm();
    if (i0 == 0.0) {
      // Shape does not depend on power; probe with a unit amplitude copy.
      FocalField unit = *this;
      unit.amplitude_ = 1.0;
      return unit.waist_nm();
    }
    const double target = i0 * std::exp(-2.0);
    auto excess = [&](double r) {
      const Eigen::Vector2d d = r * config_.polarization_axis;
      return at(d.x(), d.y()).E.squaredNorm() - target;
    };
    const double step = config_.wavelength_nm / 40.0;
    double lo = 0.0, hi = step;
    while (excess(hi) > 0) {
      lo = hi;
      hi += step;
      if (hi > 200.0 * config_.wavelength_nm)
        throw NumericalError("intensity never falls to 1/e^2 of its peak");
    }
    while (hi - lo > 1e-4) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  FieldSample assemble(const Eigen::Vector3d& pos, const DiffractionIntegrals& I, double az) const {
    const cd i(0.0, 1.0);
    const double c2 = std::cos(2 * az), s2 = std::sin(2 * az);
    const double c1 = std::cos(az), s1 = std::sin(az);
    const Eigen::Vector3cd p = p_.cast<cd>(), q = q_.cast<cd>(), z = Eigen::Vector3d::UnitZ().cast<cd>();
    FieldSample s;
    s.position_nm = pos;
    s.E = amplitude_ * ((I.I0 + I.I2 * c2) * p + (I.I2 * s2) * q + (-2.0 * i * I.I1 * c1) * z);
    s.H = (amplitude_ / constants::Z_0) *
          ((I.I2 * s2) * p + (I.I0 - I.I2 * c2) * q + (-2.0 * i * I.I1 * s1) * z);
    return s;
  }

  TweezerConfig config_;
  double amplitude_ = 0.0;
  Eigen::Vector3d p_, q_;
};

/// Convenience wrapper: one-off field evaluation for a configuration.
inline FieldSample debye_wolf_field(const TweezerConfig& config, const Eigen::Vector3d& position_nm) {
  return FocalField(config).at(position_nm);
}

/// Filling factor that reproduces `config.target_waist_nm` within 1 nm. The
/// waist shrinks monotonically as the pupil fills, so log-bisection applies.
inline double calibrate_filling_factor(const TweezerConfig& config, double lo_f0 = 0.1,
                                       double hi_f0 = 20.0) {
  if (!config.target_waist_nm) throw InvalidArgument("calibration needs a target waist");
  const double target = *config.target_waist_nm;
  auto waist_at = [&](double f0) {
    TweezerConfig c = config;
    c.filling_factor = f0;
    c.power_W = 1.0;
    return FocalField(c).waist_nm();
  };
  const double w_small = waist_at(hi_f0);  // most filled pupil, tightest focus
  const double w_large = waist_at(lo_f0);
  if (!(target >= w_small && target <= w_large))
    throw UnreachableWaist("target waist " + std::to_string(target) + " nm outside achievable [" +
                           std::to_string(w_small) + ", " + std::to_string(w_large) + "] nm");
  double a = std::log(lo_f0), b = std::log(hi_f0);
  for (int iter = 0; iter < 200 && b - a > 1e-12; ++iter) {
    const double mid = 0.5 * (a + b);
    const double w = waist_at(std::exp(mid));
    if (std::abs(w - target) < 1e-3) return std::exp(mid);
    (w > target ? a : b) = mid;
  }
  return std::exp(0.5 * (a + b));
}

/// Uniformly sampled transverse plane used for flux integration.
struct PlaneSamples {
  double spacing_nm = 0.0;
  std::vector<FieldSample> samples;
};

/// Scale factor for E such that the Poynting flux through the sampled plane
/// equals `power_W`. The grid must resolve the spot with at least eight
/// samples per waist.
inline double normalize_power(const PlaneSamples& plane, double waist_nm, double power_W) {
  if (!(plane.spacing_nm > 0) || waist_nm / plane.spacing_nm < 8.0)
    throw GridTooCoarse("need at least 8 samples per waist for flux integration");
  if (power_W < 0) throw InvalidArgument("power must be non-negative");
  if (power_W == 0.0) return 0.0;
  const double dA = plane.spacing_nm * plane.spacing_nm * constants::nm * constants::nm;
  double flux = 0.0;
  for (const auto& s : plane.samples) flux += s.poynting_z() * dA;
  if (!(flux > 0)) throw NumericalError("sampled flux is not positive");
  return std::sqrt(power_W / flux);
}

/// Square grid of samples of `field` centred on the axis at defocus z.
template <class FieldFn>
PlaneSamples sample_plane(FieldFn&& field, double half_extent_nm, double spacing_nm, double z_nm = 0.0) {
  PlaneSamples plane;
  plane.spacing_nm = spacing_nm;
  const int n = static_cast<int>(std::floor(half_extent_nm / spacing_nm));
  for (int iy = -n; iy <= n; ++iy)
    for (int ix = -n; ix <= n; ++ix)
      plane.samples.push_back(field(Eigen::Vector3d(ix * spacing_nm, iy * spacing_nm, z_nm)));
  return plane;
}

/// Paraxial Gaussian beam with uniform transverse polarization.
struct GaussianBeam {
  double waist_nm = 564.0;
  double power_W = 0.0;
  double wavelength_nm = 539.91;
  Eigen::Vector2d polarization_axis = Eigen::Vector2d(0, 1);

  double rayleigh_range_nm() const {
    return constants::pi * waist_nm * waist_nm / wavelength_nm;
  }
  /// Peak intensity 2P / (pi w0^2), W/m^2.
  double peak_intensity() const {
    const double w = waist_nm * constants::nm;
    return 2.0 * power_W / (constants::pi * w * w);
  }
};

inline FieldSample gaussian_fallback_field(const GaussianBeam& beam, const Eigen::Vector3d& position_nm) {
  if (!(beam.waist_nm > beam.wavelength_nm / 4.0))
    throw InvalidArgument("Gaussian fallback needs waist > wavelength/4");
  const double zr = beam.rayleigh_range_nm();
  const double z = position_nm.z();
  const double w = beam.waist_nm * std::sqrt(1.0 + (z / zr) * (z / zr));
  const double rho2 = position_nm.head<2>().squaredNorm();
  const double intensity =
      beam.peak_intensity() * (beam.waist_nm / w) * (beam.waist_nm / w) * std::exp(-2.0 * rho2 / (w * w));
  const double k = 2.0 * constants::pi / beam.wavelength_nm;
  const double curvature = z == 0.0 ? 0.0 : k * rho2 * z / (2.0 * (z * z + zr * zr));
  const double phase = k * z + curvature - std::atan(z / zr);
  // |E|^2 = 2 Z0 I for a transverse plane wave.
  const cd amp = std::polar(std::sqrt(2.0 * constants::Z_0 * intensity), phase);
  const Eigen::Vector3d p(beam.polarization_axis.x(), beam.polarization_axis.y(), 0.0);
  FieldSample s;
  s.position_nm = position_nm;
  s.E = amp * p.cast<cd>();
  s.H = (amp / constants::Z_0) * Eigen::Vector3d::UnitZ().cross(p).cast<cd>();
  return s;
}

}  // namespace fsq::focalfield
