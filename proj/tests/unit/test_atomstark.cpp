#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fsq/atomstark/light_shift.hpp"
#include "test_support.hpp"

using namespace fsq;
using namespace fsq::atomstark;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

double p2(double x) { return 0.5 * (3 * x * x - 1); }

PolarizationVector real_pol(double theta_deg, double e0sq) {
  // Real unit vector at angle theta from the frame z axis, in the x-z plane.
  return PolarizationVector::make(
      Eigen::Vector3cd(std::sin(theta_deg * kDeg), 0, std::cos(theta_deg * kDeg)), e0sq);
}

}  // namespace

TEST_CASE("polarizability table parsing and interpolation", "[atomstark]") {
  std::stringstream ss(
      "# state 3P2 J=2 gJ=1.5\n"
      "state,wavelength_nm,alpha_s_au,alpha_t_au\n"
      "3P0,530,100,0\n3P0,540,200,0\n3P2,530,300,10\n3P2,540,500,30\n");
  const auto t = PolarizabilityTable::from_csv(ss);

  SECTION("grid points are returned verbatim") {
    const auto a = interpolate_polarizability(t, "3P2", 540.0);
    CHECK(a.scalar_au == 500.0);
    CHECK(a.tensor_au == 30.0);
  }
  SECTION("midpoint is the arithmetic mean") {
    const auto a = interpolate_polarizability(t, "3P2", 535.0);
    CHECK_THAT(a.scalar_au, WithinRel(400.0, 1e-15));
    CHECK_THAT(a.tensor_au, WithinRel(20.0, 1e-15));
  }
  SECTION("outside the span is an error") {
    CHECK_THROWS_AS(interpolate_polarizability(t, "3P0", 529.99), WavelengthOutOfRange);
    CHECK_THROWS_AS(interpolate_polarizability(t, "3P0", 540.01), WavelengthOutOfRange);
  }
  SECTION("unknown state") { CHECK_THROWS_AS(interpolate_polarizability(t, "1P1", 535), UnknownState); }
  SECTION("state quantum numbers") {
    CHECK(t.state("3P2").j.twice_j == 4);
    CHECK(t.state("3P2").g_j == 1.5);
    CHECK(t.state("3P0").j.twice_j == 0);
  }
}

TEST_CASE("table invariants are enforced", "[atomstark]") {
  std::stringstream dup("state,wavelength_nm,alpha_s_au,alpha_t_au\n3P0,530,1,0\n3P0,530,2,0\n");
  CHECK_THROWS_AS(PolarizabilityTable::from_csv(dup), TableFormatError);
  std::stringstream tensor_j0("state,wavelength_nm,alpha_s_au,alpha_t_au\n3P0,530,1,5\n");
  CHECK_THROWS_AS(PolarizabilityTable::from_csv(tensor_j0), TableFormatError);
  std::stringstream header("state,wl,alpha_s_au,alpha_t_au\n3P0,530,1,0\n");
  CHECK_THROWS_AS(PolarizabilityTable::from_csv(header), TableFormatError);
  std::stringstream unsorted("state,wavelength_nm,alpha_s_au,alpha_t_au\n3P0,540,2,0\n3P0,530,1,0\n");
  const auto t = PolarizabilityTable::from_csv(unsorted);
  CHECK(t.entries("3P0").front().wavelength_nm == 530.0);
}

TEST_CASE("Stark Hamiltonian special cases", "[atomstark]") {
  const double e0sq = 3.7e8;
  const double hz_per_au = e0sq * 1.648777e-41 / 6.62607015e-34;

  SECTION("J = 0 is the scalar shift") {
    const auto h = stark_hamiltonian({812.5, 0.0}, AngularMomentum::integer(0),
                                     PolarizationVector::make(Eigen::Vector3cd(0.6, 0.8, 0), e0sq));
    REQUIRE(h.rows() == 1);
    CHECK_THAT(h(0, 0).real(), WithinRel(-812.5 * hz_per_au, 1e-14));
  }
  SECTION("J = 1/2 has no tensor part") {
    const auto h = stark_hamiltonian({10.0, 99.0}, AngularMomentum::half(1), real_pol(30, e0sq));
    CHECK_THAT((h + 10.0 * hz_per_au * Eigen::MatrixXcd::Identity(2, 2)).norm(), WithinAbs(0, 1e-9));
  }
  SECTION("J = 2, polarization along the quantization axis") {
    const auto h = stark_hamiltonian({1000.0, 100.0}, AngularMomentum::integer(2), real_pol(0, e0sq));
    CHECK_THAT(h(2, 2).real(), WithinRel(-(1000.0 - 100.0) * hz_per_au, 1e-13));
    CHECK_THAT(h(0, 0).real(), WithinRel(-(1000.0 + 100.0) * hz_per_au, 1e-13));
  }
  SECTION("Hermitian for complex polarization") {
    const Eigen::Vector3cd eps = Eigen::Vector3cd({0.3, 0.2}, {0.5, -0.1}, {0.1, 0.7}).normalized();
    const auto h = stark_hamiltonian({1000.0, 100.0}, AngularMomentum::integer(2),
                                     PolarizationVector::make(eps, e0sq));
    CHECK((h - h.adjoint()).norm() <= 1e-12 * h.norm());
  }
  SECTION("non-unit polarization is rejected") {
    CHECK_THROWS_AS(PolarizationVector::make(Eigen::Vector3cd(1, 1e-5, 0), 1.0), NonUnitPolarization);
  }
}

TEST_CASE("Zeeman Hamiltonian", "[atomstark]") {
  const auto j2 = AngularMomentum::integer(2);
  SECTION("zero field gives the zero matrix") {
    CHECK(zeeman_hamiltonian(MagneticField{0.0, 30.0}, 1.5, j2).norm() == 0.0);
  }
  SECTION("adjacent-m splitting at 8 G") {
    const auto h = zeeman_hamiltonian(MagneticField{8.0, 0.0}, 1.5, j2);
    // Independent arithmetic with mu_B/h = 1.39962 MHz/G.
    CHECK_THAT((h(3, 3) - h(2, 2)).real(), WithinRel(1.5 * 1.39962e6 * 8.0, 1e-5));
    CHECK_THAT(h.trace().real(), WithinAbs(0, 1e-6));
  }
  SECTION("rotating the field leaves the spectrum invariant") {
    const auto a = zeeman_hamiltonian(Eigen::Vector3d(0, 0, 1), 8.0, 1.5, j2);
    const auto b = zeeman_hamiltonian(Eigen::Vector3d(0.6, 0.0, 0.8), 8.0, 1.5, j2);
    const Eigen::VectorXd ea = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(a).eigenvalues();
    const Eigen::VectorXd eb = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(b).eigenvalues();
    CHECK((ea - eb).norm() < 1e-6);
  }
  SECTION("linear in |B|") {
    const auto a = zeeman_hamiltonian(MagneticField{2.0, 0.0}, 1.5, j2);
    const auto b = zeeman_hamiltonian(MagneticField{6.0, 0.0}, 1.5, j2);
    CHECK((3.0 * a - b).norm() < 1e-9 * b.norm());
  }
}

TEST_CASE("level shifts and adiabatic labels", "[atomstark]") {
  const auto j2 = AngularMomentum::integer(2);
  const auto zeeman = zeeman_hamiltonian(MagneticField{3.0, 0.0}, 1.5, j2);

  SECTION("pure Zeeman ladder") {
    const auto ls = level_shifts(Eigen::MatrixXcd::Zero(5, 5), zeeman);
    for (int k = 0; k < 5; ++k) {
      CHECK(ls.labels[k] == k - 2);
      CHECK_THAT(ls.energies_Hz(k), WithinAbs((k - 2) * 1.5 * 1.39962e6 * 3.0, 1e-5 * 1.26e7));
    }
  }
  SECTION("eigenvalue sum equals the trace, eigenvectors orthonormal") {
    const Eigen::Vector3cd eps = Eigen::Vector3cd({0.3, 0.2}, {0.5, -0.1}, {0.1, 0.7}).normalized();
    const auto stark = stark_hamiltonian({1000, 100}, j2, PolarizationVector::make(eps, 1e10));
    const auto ls = level_shifts(stark, zeeman);
    CHECK_THAT(ls.energies_Hz.sum(), WithinRel((stark + zeeman).trace().real(), 1e-10));
    CHECK((ls.eigenvectors.adjoint() * ls.eigenvectors - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-10);
    std::vector<double> labels = ls.labels;
    std::sort(labels.begin(), labels.end());
    CHECK(labels == std::vector<double>{-2, -1, 0, 1, 2});
  }
  SECTION("ambiguous labeling at vanishing field") {
    const auto stark = stark_hamiltonian({1000, 100}, j2, real_pol(45, 1e12));
    const auto tiny = zeeman_hamiltonian(MagneticField{1e-9, 0.0}, 1.5, j2);
    CHECK_THROWS_AS(level_shifts(stark, tiny), DegenerateLabeling);
  }
}

TEST_CASE("large-field m=0 energy follows the first-order tensor formula", "[atomstark]") {
  // Oracle: <m=0| H |m=0> = -E0^2 [a_s - a_t P2(cos theta)], evaluated in closed form.
  const double a_s = 1085.7, a_t = 100.0;
  const double e0sq = 1.0 * test::e0sq_per_hz_per_au();  // 1 Hz per a.u.
  const auto j2 = AngularMomentum::integer(2);
  const auto zeeman = zeeman_hamiltonian(MagneticField{1000.0, 0.0}, 1.5, j2);
  for (int k = 0; k <= 12; ++k) {
    const double theta = 7.5 * k;
    const auto ls = level_shifts(stark_hamiltonian({a_s, a_t}, j2, real_pol(theta, e0sq)), zeeman);
    const double oracle = -(a_s - a_t * p2(std::cos(theta * kDeg)));
    CHECK_THAT(ls.energy(0), WithinRel(oracle, 1e-6));
  }
  SECTION("perpendicular polarization") {
    const auto ls = level_shifts(stark_hamiltonian({a_s, a_t}, j2, real_pol(90, e0sq)), zeeman);
    CHECK_THAT(ls.energy(0), WithinRel(-(a_s + a_t / 2), 1e-6));
  }
}

TEST_CASE("differential light shift symmetries", "[atomstark]") {
  FieldEnvironment env;
  env.field = {3.0, 0.0};
  const auto lab = PolarizationVector::make(Eigen::Vector3cd(0, 1, 0), 1e4 * test::e0sq_per_hz_per_au());

  SECTION("identical polarizabilities give zero shift at every angle") {
    const auto t = test::flat_table(900, 900, 0);
    for (double phi : {0.0, 17.0, 45.0, 90.0, 133.0})
      CHECK_THAT((env.field.phi_deg = phi, differential_light_shift(env, lab, t)), WithinAbs(0, 1e-9));
  }
  SECTION("phi and 180 - phi agree") {
    const auto& t = test::fixture_table();
    for (double phi : {5.0, 18.0, 40.0, 77.0}) {
      env.field.phi_deg = phi;
      const double a = differential_light_shift(env, lab, t);
      env.field.phi_deg = 180.0 - phi;
      const double b = differential_light_shift(env, lab, t);
      CHECK_THAT(a, WithinRel(b, 1e-10));
    }
  }
  SECTION("linear in intensity") {
    const auto& t = test::fixture_table();
    // At phi = 0 the tensor operator is diagonal in the field frame, so the
    // shift is exactly linear even when it exceeds the Zeeman splitting.
    env.field.phi_deg = 0.0;
    const double a = differential_light_shift(env, lab, t);
    const auto lab3 = PolarizationVector::make(lab.eps, 3.0 * lab.e0sq);
    CHECK_THAT(differential_light_shift(env, lab3, t), WithinRel(3.0 * a, 1e-9));
    // At other angles sublevel mixing is second order in shift / splitting.
    env.field = {8.0, 12.0};
    const auto weak = PolarizationVector::make(lab.eps, 1e-2 * lab.e0sq);
    const auto weak3 = PolarizationVector::make(lab.eps, 3e-2 * lab.e0sq);
    CHECK_THAT(differential_light_shift(env, weak3, t),
               WithinRel(3.0 * differential_light_shift(env, weak, t), 1e-4));
  }
  SECTION("field direction convention: phi = atan(Bx/By)") {
    const Eigen::Vector3d b = field_direction(Eigen::Vector2d(0, 1), 30.0);
    CHECK_THAT(std::atan2(b.x(), b.y()) / kDeg, WithinAbs(30.0, 1e-12));
  }
}

TEST_CASE("magic angle", "[atomstark]") {
  FieldEnvironment env;
  env.field = {8.0, 0.0};
  const auto lab = PolarizationVector::make(Eigen::Vector3cd(0, 1, 0), 1e3 * test::e0sq_per_hz_per_au());

  SECTION("no crossing when the shifts share a sign") {
    CHECK_FALSE(find_magic_angle(env, lab, test::flat_table(1000, 800, 50)).has_value());
  }
  SECTION("matches the closed-form inversion of the first-order formula") {
    const double a0 = 1000, a2s = 1060, a2t = 100;
    const auto root = find_magic_angle(env, lab, test::flat_table(a0, a2s, a2t));
    REQUIRE(root.has_value());
    // a0 = a2s - a2t P2(cos phi)  =>  cos^2 phi = (2 (a2s - a0) / a2t + 1) / 3
    const double oracle = std::acos(std::sqrt((2 * (a2s - a0) / a2t + 1) / 3)) / kDeg;
    CHECK_THAT(*root, WithinAbs(oracle, 0.5));
    env.field.phi_deg = *root;
    CHECK(std::abs(differential_light_shift(env, lab, test::flat_table(a0, a2s, a2t))) < 1e-3);
  }
  SECTION("fixture table has a magic angle inside (0, 90)") {
    const auto root = find_magic_angle(env, lab, test::fixture_table());
    REQUIRE(root.has_value());
    CHECK(*root > 0.0);
    CHECK(*root < 90.0);
  }
}

TEST_CASE("magic wavelength", "[atomstark]") {
  FieldEnvironment env;
  env.field = {3.0, 0.0};
  const auto lab = PolarizationVector::make(Eigen::Vector3cd(0, 1, 0), 1e4 * test::e0sq_per_hz_per_au());
  const auto& t = test::fixture_table();

  SECTION("phi = 0 gives the 4 nm offset") {
    const auto wl = find_magic_wavelength(env, lab, t);
    REQUIRE(wl.has_value());
    CHECK_THAT(*wl, WithinAbs(535.9, 0.5));
  }
  SECTION("at the magic angle the tweezer wavelength is magic") {
    env.field.phi_deg = *find_magic_angle(env, lab, t);
    const auto wl = find_magic_wavelength(env, lab, t);
    REQUIRE(wl.has_value());
    CHECK_THAT(*wl, WithinAbs(539.91, 0.05));
  }
  SECTION("monotone shift without sign change") {
    CHECK_FALSE(find_magic_wavelength(env, lab, test::flat_table(1000, 800, 10)).has_value());
  }
}
