#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "uswb/channel.hpp"
#include "uswb/medium.hpp"

using namespace uswb;

TEST_CASE("attenuation coefficient follows a f^b") {
  MediumParams zero{1500.0, 1000.0, 0.0, 1.0};
  CHECK(attenuation_coefficient(5.0, zero) == 0.0);
  MediumParams quad{1500.0, 1000.0, 1.0, 2.0};
  CHECK(attenuation_coefficient(3.0, quad) == doctest::Approx(9.0));
  MediumParams frac{1500.0, 1000.0, 0.5, 1.1};
  CHECK(attenuation_coefficient(10.0, frac) == doctest::Approx(6.2946).epsilon(1e-4));
  CHECK_THROWS(attenuation_coefficient(0.0, quad));
}

TEST_CASE("pressure ratio is exp(-alpha d)") {
  CHECK(pressure_ratio(0.0, 5.0) == 1.0);
  CHECK(pressure_ratio(1.0, std::log(10.0)) == doctest::Approx(0.1));
  // 100 dB of attenuation corresponds to alpha*d ~ 11.513 Np.
  double x = 100.0 / (20.0 * std::log10(std::exp(1.0)));
  CHECK(x == doctest::Approx(11.5129).epsilon(1e-4));
  CHECK(-20.0 * std::log10(pressure_ratio(1.0, x)) == doctest::Approx(100.0));
}

TEST_CASE("pressure ratio monotone in d and alpha") {
  double prev = 2.0;
  for (double d : {0.0, 0.01, 0.05, 0.2, 1.0}) {
    double r = pressure_ratio(d, 3.0);
    CHECK(r < prev);
    prev = r;
  }
  prev = 2.0;
  for (double a : {0.0, 1.0, 5.0, 20.0}) {
    double r = pressure_ratio(0.1, a);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("frequency budget matches Table-style limits with bundled muscle") {
  auto muscle = TissueTable::defaults().get("muscle");
  // Medium range (order 1 cm) should allow on the order of 100 MHz.
  double f_cm = max_frequency_for_budget(0.01, muscle, 100.0);
  CHECK(f_cm > 30.0);
  CHECK(f_cm < 300.0);
  // Long range (order 10 cm) drops to the order of 10 MHz.
  double f_long = max_frequency_for_budget(0.10, muscle, 100.0);
  CHECK(f_long > 3.0);
  CHECK(f_long < 30.0);
  CHECK(f_long < f_cm);
}

TEST_CASE("frequency budget closed form for b = 1") {
  MediumParams m{1500.0, 1000.0, 8.0, 1.0};
  double budget_db = 100.0;
  double budget_np = budget_db * std::log(10.0) / 20.0;
  double d = 0.03;
  CHECK(max_frequency_for_budget(d, m, budget_db) ==
        doctest::Approx(budget_np / (m.a * d)));
  // Monotone decreasing in d and a.
  CHECK(max_frequency_for_budget(0.06, m, budget_db) <
        max_frequency_for_budget(0.03, m, budget_db));
  MediumParams stronger = m;
  stronger.a = 16.0;
  CHECK(max_frequency_for_budget(d, stronger, budget_db) <
        max_frequency_for_budget(d, m, budget_db));
}

TEST_CASE("path gain is the squared amplitude ratio") {
  MediumParams m{1500.0, 1000.0, 0.0, 1.0};
  CHECK(path_gain(0.5, 5.0, m) == doctest::Approx(1.0));
  // amplitude ratio 0.1 -> power gain 0.01
  MediumParams m2{1500.0, 1000.0, std::log(10.0), 1.0};
  CHECK(path_gain(1.0, 1.0, m2) == doctest::Approx(0.01));
  auto muscle = TissueTable::defaults().get("muscle");
  double d = 0.20, f = 5.0;
  double ratio = pressure_ratio(d, attenuation_coefficient(f, muscle));
  CHECK(path_gain(d, f, muscle) == doctest::Approx(ratio * ratio));
}

TEST_CASE("path gain is multiplicative over distance without spreading") {
  auto muscle = TissueTable::defaults().get("muscle");
  double f = 3.0;
  double g1 = path_gain(0.04, f, muscle);
  double g2 = path_gain(0.07, f, muscle);
  CHECK(path_gain(0.11, f, muscle) == doctest::Approx(g1 * g2));
}

TEST_CASE("delay stats of trivial profiles") {
  ChannelImpulseResponse one = ChannelImpulseResponse::single_tap(0.7);
  auto s = delay_stats(one);
  CHECK(s.tau_m == 0.0);
  CHECK(s.tau_rms == 0.0);
  CHECK(std::isinf(s.coherence_bandwidth));

  ChannelImpulseResponse two;
  double spacing = 4e-6;
  two.taps.push_back({0.0, {1.0, 0.0}});
  two.taps.push_back({spacing, {-1.0, 0.0}});
  auto s2 = delay_stats(two);
  CHECK(s2.tau_m == doctest::Approx(spacing / 2));
  CHECK(s2.tau_rms == doctest::Approx(spacing / 2));
}

TEST_CASE("delay stats invariant under amplitude scaling") {
  auto cir = synth_impulse_response(50, 1e-6, 8e-6, 123);
  auto base = delay_stats(cir);
  for (auto& t : cir.taps) t.amplitude *= 3.7;
  auto scaled = delay_stats(cir);
  CHECK(scaled.tau_m == doctest::Approx(base.tau_m));
  CHECK(scaled.tau_rms == doctest::Approx(base.tau_rms));
}

TEST_CASE("synthetic profile: determinism and single-tap degenerate case") {
  auto a = synth_impulse_response(20, 1e-6, 5e-6, 99);
  auto b = synth_impulse_response(20, 1e-6, 5e-6, 99);
  REQUIRE(a.taps.size() == b.taps.size());
  for (std::size_t i = 0; i < a.taps.size(); ++i) {
    CHECK(a.taps[i].delay_s == b.taps[i].delay_s);
    CHECK(a.taps[i].amplitude == b.taps[i].amplitude);
  }
  auto single = synth_impulse_response(1, 1e-6, 5e-6, 1);
  CHECK(delay_stats(single).tau_rms == 0.0);
}

TEST_CASE("calibrated decay constant reproduces the reference delay spread") {
  const double target = 2.6883e-5;
  double gamma = calibrate_decay_constant(kDefaultSynthTaps, kDefaultSynthSpacing, target);
  auto cir = synth_impulse_response(kDefaultSynthTaps, kDefaultSynthSpacing, gamma, 7);
  auto s = delay_stats(cir);
  CHECK(std::abs(s.tau_rms - target) / target < 0.05);
  // Coherence bandwidth lands near 7 kHz with k = 1/5.
  CHECK(s.coherence_bandwidth == doctest::Approx(7438.0).epsilon(0.15));
}

TEST_CASE("impulse response CSV round-trip") {
  auto cir = synth_impulse_response(10, 2e-6, 6e-6, 5, 0.2);
  std::string path = "cir_roundtrip_test.csv";
  cir.save_csv(path);
  auto back = ChannelImpulseResponse::load_csv(path);
  REQUIRE(back.taps.size() == cir.taps.size());
  for (std::size_t i = 0; i < cir.taps.size(); ++i) {
    CHECK(back.taps[i].delay_s == cir.taps[i].delay_s);
    CHECK(back.taps[i].amplitude.real() == cir.taps[i].amplitude.real());
    CHECK(back.taps[i].amplitude.imag() == cir.taps[i].amplitude.imag());
  }
  std::remove(path.c_str());
}

TEST_CASE("invalid impulse responses are rejected") {
  ChannelImpulseResponse empty;
  CHECK_THROWS(empty.validate());
  ChannelImpulseResponse bad;
  bad.taps.push_back({1e-6, {1.0, 0.0}});
  bad.taps.push_back({1e-6, {0.5, 0.0}});
  CHECK_THROWS(bad.validate());
}
