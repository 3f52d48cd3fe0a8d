#include <catch_amalgamated.hpp>

#include <cmath>

#include "fsq/dynamics/coherence.hpp"
#include "test_support.hpp"

using namespace fsq;
using namespace fsq::dynamics;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kRabi = 2 * kPi * 84e3;

// A trap with identical frequencies for both levels and no centre shift.
ShotModel magic_model() {
  ShotModel m;
  m.trap.lower = {"3P0", 0, 1e6, Eigen::Vector3d(2 * kPi * 30e3, 2 * kPi * 30e3, 2 * kPi * 5e3)};
  m.trap.upper = m.trap.lower;
  m.trap.upper.state = "3P2";
  m.temperature_K = 0.0;
  return m;
}

// Standard deviation of the ensemble mean of cos(phase) over n shots, for a
// Gaussian phase with mean coherence c1 and mean cos(2 phase) equal to c2.
double ensemble_std(double c1, double c2, std::size_t n) {
  return std::sqrt(std::max(0.5 * (1 + c2) - c1 * c1, 0.0) / static_cast<double>(n));
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("two-level propagator", "[dynamics]") {
  SECTION("resonant pi pulse") {
    const auto s = evolve_segment(QubitState::ground(), {kPi / kRabi, kRabi, 0.0, 0.3});
    CHECK_THAT(s.p32(), WithinAbs(1.0, 1e-15));
  }
  SECTION("detuning equal to the Rabi frequency caps the transfer at 1/2") {
    double best = 0;
    for (double t = 0; t < 4 * kPi / kRabi; t += 1e-9)
      best = std::max(best, evolve_segment(QubitState::ground(), {t, kRabi, kRabi, 0.0}).p32());
    CHECK_THAT(best, WithinAbs(0.5, 1e-6));
  }
  SECTION("semigroup property") {
    const PulseSegment a{1.7e-6, kRabi, 2 * kPi * 31e3, 0.4};
    PulseSegment b = a;
    b.duration_s = 2.9e-6;
    PulseSegment ab = a;
    ab.duration_s = a.duration_s + b.duration_s;
    const QubitState s0{{0.6, 0.0}, {0.0, 0.8}};
    const auto x = evolve_segment(evolve_segment(s0, a), b);
    const auto y = evolve_segment(s0, ab);
    CHECK(std::abs(x.c_p0 - y.c_p0) < 1e-10);
    CHECK(std::abs(x.c_p2 - y.c_p2) < 1e-10);
  }
  SECTION("norm is preserved over 10^4 segments") {
    RandomStream rng(3, 0);
    QubitState s;
    for (int k = 0; k < 10000; ++k)
      s = evolve_segment(s, {rng.uniform() * 1e-5, rng.uniform() * kRabi, (rng.uniform() - 0.5) * kRabi,
                             2 * kPi * rng.uniform()});
    CHECK_THAT(s.norm(), WithinAbs(1.0, 1e-9));
  }
  SECTION("free evolution only winds the relative phase") {
    const auto half = evolve_segment(QubitState::ground(), {kPi / 2 / kRabi, kRabi, 0.0, 0.0});
    const auto s = evolve_segment(half, {3e-6, 0.0, 2 * kPi * 1e5, 0.0});
    CHECK_THAT(s.p32(), WithinAbs(0.5, 1e-14));
  }
}

TEST_CASE("SPAM map", "[dynamics]") {
  NoiseModel n;
  CHECK(apply_spam(0.37, n) == 0.37);
  n.prep_efficiency = 0.9;
  CHECK(apply_spam(0.0, n) == 0.0);  // unprepared atoms never read out as 3P2
  CHECK_THAT(apply_spam(1.0, n), WithinRel(0.9, 1e-15));
  n.readout_fidelity = 0.76;
  CHECK(apply_spam(0.2, n) < apply_spam(0.3, n));
  n.prep_efficiency = 1.2;
  CHECK_THROWS_AS(n.validate(), InvalidArgument);
}

TEST_CASE("Rabi flopping", "[dynamics]") {
  const auto t = linspace(0, 60e-6, 121);
  SECTION("noise-free resonant flopping is undamped") {
    const auto r = simulate_rabi(magic_model(), kRabi, t, {50, 1});
    for (std::size_t j = 0; j < t.size(); ++j) {
      CHECK_THAT(r.p32_mean[j], WithinAbs(std::pow(std::sin(kRabi * t[j] / 2), 2), 1e-12));
      CHECK(r.p32_sem[j] < 1e-12);
    }
  }
  SECTION("Gaussian Rabi jitter damps the envelope as exp(-(sigma Omega t)^2/2)") {
    auto m = magic_model();
    m.noise.rabi_frac_std = 0.1;
    std::vector<double> extrema;
    for (int k = 1; k <= 20; ++k) extrema.push_back(k * kPi / kRabi);
    const auto r = simulate_rabi(m, kRabi, extrema, {2000, 11});
    for (int k = 1; k <= 20; ++k) {
      const double t = extrema[k - 1];
      const double env = (k % 2 ? -1.0 : 1.0) * (1 - 2 * r.p32_mean[k - 1]);
      CHECK(std::abs(env - std::exp(-0.5 * std::pow(0.1 * kRabi * t, 2))) < 3 * 2 * r.p32_sem[k - 1]);
    }
  }
  SECTION("paper SPAM keeps maxima below 0.76") {
    auto m = magic_model();
    m.noise.prep_efficiency = 0.9;
    m.noise.readout_fidelity = 0.76;
    const auto r = simulate_rabi(m, kRabi, t, {100, 2});
    CHECK(*std::max_element(r.p32_mean.begin(), r.p32_mean.end()) < 0.76);
  }
}

TEST_CASE("Ramsey with phase reset", "[dynamics]") {
  const double f = 1.3e6;
  SECTION("zero-delay sequence is a pi pulse") {
    const auto r = simulate_ramsey(magic_model(), kRabi, f, {0.0}, {4, 1});
    CHECK_THAT(r.p32_mean[0], WithinAbs(1.0, 1e-6));
  }
  SECTION("noise-free fringe oscillates at the synthesizer difference") {
    const auto t = linspace(0, 10e-6, 101);
    const auto r = simulate_ramsey(magic_model(), kRabi, f, t, {4, 1});
    for (std::size_t j = 0; j < t.size(); ++j)
      CHECK_THAT(r.p32_mean[j], WithinAbs(0.5 * (1 + std::cos(2 * kPi * f * t[j])), 1e-12));
    const auto fit = analysis::fit_sinusoid(t, r.p32_mean);
    CHECK_THAT(fit.frequency_Hz, WithinRel(f, 1e-4));
  }
  SECTION("static Gaussian detuning spread with ideal pulses") {
    auto m = magic_model();
    const double sigma = 2 * kPi * 1e3;
    m.noise.detuning_offset_std_rad_s = sigma;
    RunSettings run{20000, 5};
    run.instantaneous_pulses = true;
    const auto t = windowed_time_grid(400e-6, 9, f);
    const auto r = simulate_ramsey(m, kRabi, f, t, run);
    for (const auto& c : analysis::extract_contrast(to_trace(r), f)) {
      const double x = sigma * sigma * c.t_center_s * c.t_center_s;
      const double oracle = std::exp(-0.5 * x);
      CHECK(std::abs(c.contrast - oracle) < 3 * (ensemble_std(oracle, std::exp(-2 * x), run.trials) + c.contrast_err));
    }
  }
}

TEST_CASE("spin echo", "[dynamics]") {
  const double f = 1.3e6;
  auto m = magic_model();
  m.noise.detuning_offset_std_rad_s = 2 * kPi * 2e3;
  const auto t = windowed_time_grid(400e-6, 6, f);

  SECTION("static disorder is refocused") {
    RunSettings run{2000, 9};
    run.instantaneous_pulses = true;
    const auto c = analysis::extract_contrast(to_trace(simulate_echo(m, kRabi, f, t, run)), f);
    const auto ref = analysis::extract_contrast(to_trace(simulate_echo(magic_model(), kRabi, f, t, run)), f);
    REQUIRE(c.size() == 6);
    for (std::size_t i = 0; i < c.size(); ++i)
      CHECK(std::abs(c[i].contrast - ref[i].contrast) <= 3 * c[i].contrast_err + 1e-12);
  }
  SECTION("finite pulses leave only a second-order pulse error") {
    const auto c = analysis::extract_contrast(to_trace(simulate_echo(m, kRabi, f, t, {2000, 9})), f);
    const double bound = 4 * std::pow(m.noise.detuning_offset_std_rad_s / kRabi, 2);
    for (const auto& p : c) CHECK(std::abs(p.contrast - 1.0) < bound);
  }
  SECTION("zero-duration echo equals the zero-delay Ramsey sequence") {
    RunSettings run{200, 4};
    run.instantaneous_pulses = true;
    CHECK_THAT(simulate_echo(m, kRabi, f, {0.0}, run).p32_mean[0],
               WithinAbs(simulate_ramsey(m, kRabi, f, {0.0}, run).p32_mean[0], 1e-12));
    const auto e = simulate_echo(magic_model(), kRabi, f, {0.0}, {4, 4});
    const auto r = simulate_ramsey(magic_model(), kRabi, f, {0.0}, {4, 4});
    CHECK_THAT(e.p32_mean[0], WithinAbs(r.p32_mean[0], 1e-6));
  }
  SECTION("fluctuating detuning decays like the two-half phase variance") {
    RunSettings run{20000, 9};
    run.fluctuating_detuning = true;
    run.instantaneous_pulses = true;
    const double s = m.noise.detuning_offset_std_rad_s;
    const auto c = analysis::extract_contrast(to_trace(simulate_echo(m, kRabi, f, t, run)), f);
    // Phase (d1 - d2) t/2 with independent d1, d2 has variance s^2 t^2 / 2.
    for (const auto& p : c) {
      const double x = 0.5 * s * s * p.t_center_s * p.t_center_s;
      const double oracle = std::exp(-0.5 * x);
      CHECK(std::abs(p.contrast - oracle) < 3 * (ensemble_std(oracle, std::exp(-2 * x), run.trials) + p.contrast_err));
    }
    CHECK(c.back().contrast < 0.5);
  }
}

TEST_CASE("ensembles are deterministic", "[dynamics]") {
  auto m = magic_model();
  m.noise.rabi_frac_std = 0.1;
  m.noise.detuning_offset_std_rad_s = 2 * kPi * 3e3;
  const auto t = linspace(0, 20e-6, 41);
  RunSettings serial{500, 77, 1}, parallel{500, 77, 7};
  const auto a = simulate_ramsey(m, kRabi, 1.3e6, t, serial);
  const auto b = simulate_ramsey(m, kRabi, 1.3e6, t, parallel);
  const auto c = simulate_ramsey(m, kRabi, 1.3e6, t, parallel);
  CHECK(a.p32_mean == b.p32_mean);
  CHECK(a.p32_sem == b.p32_sem);
  CHECK(b.p32_mean == c.p32_mean);
  RunSettings other{500, 78, 7};
  CHECK(simulate_ramsey(m, kRabi, 1.3e6, t, other).p32_mean != a.p32_mean);
}

TEST_CASE("paper trap: Rabi damping and Ramsey T2", "[dynamics]") {
  focalfield::TweezerConfig c;
  c.power_W = 1.45e-3;
  c.filling_factor = 0.74707;
  atomstark::FieldEnvironment env;
  env.field = {3.0, 0.0};
  ShotModel m;
  m.trap = trapmodel::characterize_trap(c, env, test::fixture_table());
  m.temperature_K = 8e-6;
  m.noise.rabi_frac_std = 0.1;

  SECTION("Rabi oscillation damps to about half contrast within a few cycles") {
    std::vector<double> ext;
    for (int k = 1; k <= 10; ++k) ext.push_back(k * kPi / kRabi);
    const auto r = simulate_rabi(m, kRabi, ext, {2000, 3});
    const double first = 1 - 2 * (1 - r.p32_mean[0]);     // contrast proxy after half a cycle
    const double fifth = 1 - 2 * r.p32_mean[9];           // after five cycles
    CHECK(first > 0.9);
    CHECK(fifth < 0.5);
  }
  SECTION("Rabi jitter barely changes the Ramsey T2") {
    const auto t = windowed_time_grid(150e-6, 10, 1.3e6);
    const auto with = measure_t2(m, kRabi, 1.3e6, t, {2000, 5});
    m.noise.rabi_frac_std = 0.0;
    const auto without = measure_t2(m, kRabi, 1.3e6, t, {2000, 5});
    REQUIRE(with.envelope);
    REQUIRE(without.envelope);
    CHECK_THAT(with.envelope->t2_s, WithinRel(without.envelope->t2_s, 0.10));
  }
}
