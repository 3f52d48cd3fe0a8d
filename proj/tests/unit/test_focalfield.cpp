#include <catch_amalgamated.hpp>

#include <cmath>

#include "fsq/focalfield/lightshift_map.hpp"
#include "test_support.hpp"

using namespace fsq;
using namespace fsq::focalfield;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = 3.14159265358979323846;

// J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt; the periodic trapezoid rule
// on the full period converges geometrically for this analytic integrand.
double bessel_oracle(int n, double x) {
  const int m = 400;
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    const double t = 2 * kPi * k / m;
    s += std::cos(n * t - x * std::sin(t));
  }
  return s / m;
}

TweezerConfig paper_optics(double power_W) {
  TweezerConfig c;
  c.wavelength_nm = 539.91;
  c.na = 0.5;
  c.power_W = power_W;
  c.filling_factor = 0.74707;
  return c;
}

// Radial flux 2 pi int rho S_z(rho) d(rho) out to R; S_z is azimuthally symmetric.
double radial_flux(const FocalField& f, double z_nm, double r_max_nm, double step_nm) {
  double sum = 0.0;
  const int n = static_cast<int>(r_max_nm / step_nm);
  for (int i = 0; i <= n; ++i) {
    const double r = i * step_nm;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * 2 * kPi * r * f.at(0, r, z_nm).poynting_z();
  }
  return sum * step_nm * 1e-18;
}

}  // namespace

TEST_CASE("Bessel functions match the integral representation", "[focalfield]") {
  for (int n = 0; n <= 2; ++n)
    for (double x = 0.0; x <= 60.0; x += 0.37)
      CHECK_THAT(special::bessel_j(n, x), WithinAbs(bessel_oracle(n, x), 1e-10));
}

TEST_CASE("Gauss-Legendre quadrature", "[focalfield]") {
  const auto& rule = special::gauss_legendre_level(1);  // 32 nodes
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  CHECK_THAT(wsum, WithinRel(2.0, 1e-14));
  // Exact for polynomials up to degree 63.
  const double poly = special::gauss_legendre([](double x) { return std::pow(x, 62); }, -1.0, 1.0, rule);
  CHECK_THAT(poly, WithinRel(2.0 / 63.0, 1e-12));
  const auto r = special::integrate_adaptive([](double x) { return std::exp(-x) * std::cos(20 * x); }, 0.0, 3.0);
  // Closed form of int_0^3 e^{-x} cos(20x) dx.
  const double exact = (1.0 + std::exp(-3.0) * (20 * std::sin(60.0) - std::cos(60.0))) / 401.0;
  CHECK_THAT(r.value, WithinRel(exact, 1e-10));
  CHECK_THROWS_AS(special::integrate_adaptive([](double x) { return std::sin(1e5 * x); }, 0.0, 1.0),
                  QuadratureNotConverged);
}

TEST_CASE("Debye-Wolf field symmetries", "[focalfield]") {
  const FocalField f(paper_optics(1e-3));

  SECTION("origin: no longitudinal field, polarization along the input axis") {
    const auto s = f.at(0, 0, 0);
    CHECK(s.E(2) == std::complex<double>(0, 0));
    CHECK(std::abs(s.E(0)) == 0.0);
    CHECK(std::abs(s.E(1)) > 0.0);
  }
  SECTION("longitudinal field vanishes on the axis at any defocus") {
    for (int k = 0; k < 10; ++k) {
      const auto s = f.at(0, 0, -2000.0 + 400.0 * k);
      CHECK(std::abs(s.E(2)) < 1e-10 * s.E.head<2>().norm());
    }
  }
  SECTION("point reflection leaves the intensity unchanged") {
    for (auto [x, y] : {std::pair{130.0, 270.0}, {-410.0, 95.0}, {700.0, -650.0}}) {
      const double a = f.at(x, y, 0).E.squaredNorm();
      const double b = f.at(-x, -y, 0).E.squaredNorm();
      CHECK_THAT(a, WithinRel(b, 1e-10));
    }
  }
  SECTION("longitudinal fraction at the waist is largest along the polarization axis") {
    const double w0 = f.waist_nm();
    int best = -1;
    double best_frac = -1.0;
    for (int k = 0; k < 72; ++k) {
      const double psi = 2 * kPi * k / 72;  // azimuth from the polarization (y) axis
      const auto s = f.at(w0 * std::sin(psi), w0 * std::cos(psi), 0);
      const double frac = std::norm(s.E(2)) / s.E.squaredNorm();
      if (frac > best_frac) {
        best_frac = frac;
        best = k;
      }
    }
    CHECK((best == 0 || best == 36));
  }
  SECTION("polarization vectors are unit norm") {
    for (double x = -900; x <= 900; x += 300)
      for (double y = -900; y <= 900; y += 300)
        CHECK_THAT(f.at(x, y, 50.0).polarization().eps.norm(), WithinAbs(1.0, 1e-12));
  }
  SECTION("rotated polarization axis rotates the field") {
    auto c = paper_optics(1e-3);
    c.polarization_axis = Eigen::Vector2d(1, 0);
    const FocalField g(c);
    const auto a = f.at(120, 340, 0);  // axis y
    const auto b = g.at(340, -120, 0);  // same point in the frame rotated by -90 deg
    CHECK_THAT(a.E.squaredNorm(), WithinRel(b.E.squaredNorm(), 1e-10));
  }
}

TEST_CASE("quadrature convergence of the diffraction integrals", "[focalfield]") {
  const auto c = paper_optics(1e-3);
  for (double rho : {0.0, 400.0, 2500.0})
    for (double z : {0.0, 1500.0}) {
      const auto lvl = converged_level(c, rho, z);
      const auto a = diffraction_integrals(c, rho, z, lvl);
      const auto b = diffraction_integrals(c, rho, z, lvl + 1);
      const double scale = std::max({std::abs(b.I0), std::abs(b.I1), std::abs(b.I2)});
      CHECK(std::abs(a.I0 - b.I0) < 1e-8 * scale);
      CHECK(std::abs(a.I1 - b.I1) < 1e-8 * scale);
      CHECK(std::abs(a.I2 - b.I2) < 1e-8 * scale);
    }
}

TEST_CASE("filling-factor calibration", "[focalfield]") {
  auto c = paper_optics(1e-3);
  c.target_waist_nm = 564.0;
  const double f0 = calibrate_filling_factor(c);
  c.filling_factor = f0;
  CHECK_THAT(FocalField(c).waist_nm(), WithinAbs(564.0, 1.0));
  SECTION("round trip") {
    auto again = c;
    CHECK_THAT(calibrate_filling_factor(again), WithinRel(f0, 1e-3));
  }
  SECTION("diffraction limit") {
    auto tight = c;
    tight.target_waist_nm = 100.0;
    CHECK_THROWS_AS(calibrate_filling_factor(tight), UnreachableWaist);
  }
}

TEST_CASE("power normalization", "[focalfield]") {
  const FocalField f(paper_optics(1e-3));
  const double w0 = f.waist_nm();

  SECTION("pupil power matches the focal-plane flux") {
    const double flux = radial_flux(f, 0.0, 8000.0, 5.0);
    CHECK_THAT(flux, WithinRel(1e-3, 3e-3));
  }
  SECTION("flux is conserved through the focal volume") {
    const double zr = kPi * w0 * w0 / 539.91;
    const double f0 = radial_flux(f, 0.0, 8000.0, 5.0);
    CHECK_THAT(radial_flux(f, zr, 8000.0, 5.0), WithinRel(f0, 2e-3));
    CHECK_THAT(radial_flux(f, -zr, 8000.0, 5.0), WithinRel(f0, 2e-3));
  }
  SECTION("grid normalization") {
    auto field = [&](const Eigen::Vector3d& p) { return f.at(p); };
    const auto coarse = sample_plane(field, 2500.0, w0 / 10.0);
    const auto fine = sample_plane(field, 2500.0, w0 / 20.0);
    const double s1 = normalize_power(coarse, w0, 1e-3);
    const double s2 = normalize_power(fine, w0, 1e-3);
    // Flux of the scaled field recomputed on the finer grid.
    CHECK_THAT(s2 * s2, WithinRel(s1 * s1, 1e-3));
    CHECK_THAT(normalize_power(coarse, w0, 2e-3), WithinRel(std::sqrt(2.0) * s1, 1e-12));
    CHECK(normalize_power(coarse, w0, 0.0) == 0.0);
    CHECK_THROWS_AS(normalize_power(sample_plane(field, 2500.0, w0 / 6.0), w0, 1e-3), GridTooCoarse);
  }
  SECTION("doubling power doubles E0sq; zero power gives zero field") {
    const FocalField g(paper_optics(2e-3));
    const FocalField z(paper_optics(0.0));
    for (double x : {0.0, 200.0, 650.0}) {
      CHECK_THAT(g.at(x, 100, 30).e0sq(), WithinRel(2.0 * f.at(x, 100, 30).e0sq(), 1e-12));
      CHECK(z.at(x, 100, 30).e0sq() == 0.0);
    }
  }
}

TEST_CASE("Gaussian fallback beam", "[focalfield]") {
  GaussianBeam b{564.0, 1e-3, 539.91, Eigen::Vector2d(0, 1)};
  const double zr = b.rayleigh_range_nm();
  SECTION("on-axis intensity halves at the Rayleigh range") {
    const double i0 = gaussian_fallback_field(b, {0, 0, 0}).e0sq();
    CHECK_THAT(gaussian_fallback_field(b, {0, 0, zr}).e0sq(), WithinRel(0.5 * i0, 1e-12));
  }
  SECTION("transverse flux equals the power") {
    double flux = 0.0;
    const double step = 1.0;
    for (int i = 0; i < 4000; ++i) {
      const double r = (i + 0.5) * step;
      flux += 2 * kPi * r * step * 1e-18 * gaussian_fallback_field(b, {r, 0, 0}).poynting_z();
    }
    CHECK_THAT(flux, WithinRel(1e-3, 1e-6));
  }
  SECTION("low-NA Debye-Wolf focus is Gaussian inside one waist") {
    TweezerConfig c;
    c.na = 0.1;
    c.power_W = 1e-3;
    c.filling_factor = 0.5;
    const FocalField f(c);
    const GaussianBeam g{f.waist_nm(), 1e-3, c.wavelength_nm, Eigen::Vector2d(0, 1)};
    for (double frac : {0.0, 0.3, 0.6, 0.9})
      for (double psi : {0.0, 0.7, 1.5707963}) {
        const Eigen::Vector3d p(frac * g.waist_nm * std::sin(psi), frac * g.waist_nm * std::cos(psi), 0);
        CHECK_THAT(f.at(p).e0sq(), WithinRel(gaussian_fallback_field(g, p).e0sq(), 0.05));
      }
  }
}

TEST_CASE("light-shift maps", "[focalfield]") {
  const auto& table = test::fixture_table();
  atomstark::FieldEnvironment env;
  env.field = {8.0, 0.0};

  SECTION("uniform transverse field at the magic angle gives a flat zero map") {
    const Eigen::Vector3cd e(0, 2.0 * std::sqrt(1e3 * test::e0sq_per_hz_per_au()), 0);
    auto uniform = [&](const Eigen::Vector3d& p) {
      FieldSample s;
      s.position_nm = p;
      s.E = e;
      return s;
    };
    const auto lab = atomstark::PolarizationVector::from_field(e);
    env.field.phi_deg = *atomstark::find_magic_angle(env, lab, table);
    const auto map = lightshift_map(uniform, env, table, GridSpec{500.0, 11, 0.0});
    // Residual is the 1e-6 deg bisection tolerance times dU'(phi).
    CHECK(map.values_Hz.cwiseAbs().maxCoeff() < 1e-3);
    CHECK(map.values_Hz.maxCoeff() == map.values_Hz.minCoeff());
  }
  SECTION("centre value and point symmetry") {
    const FocalField f(paper_optics(46e-6));
    env.field.phi_deg = 20.0;
    const auto map = lightshift_map(f, env, table, GridSpec{800.0, 21, 0.0});
    env.wavelength_nm = 539.91;
    const double centre = atomstark::differential_light_shift(env, f.at(0, 0, 0).polarization(), table);
    CHECK_THAT(map.center_Hz(), WithinRel(centre, 1e-6));
    for (int iy = 0; iy < 21; ++iy)
      for (int ix = 0; ix < 21; ++ix)
        CHECK_THAT(map.values_Hz(iy, ix), WithinRel(map.values_Hz(20 - iy, 20 - ix), 1e-9));
  }
  SECTION("thread count does not change the map") {
    const FocalField f(paper_optics(46e-6));
    env.field.phi_deg = 20.0;
    const auto a = lightshift_map(f, env, table, GridSpec{800.0, 9, 0.0}, {}, 1);
    const auto b = lightshift_map(f, env, table, GridSpec{800.0, 9, 0.0}, {}, 5);
    CHECK(a.values_Hz == b.values_Hz);
  }
}
