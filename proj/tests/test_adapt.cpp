#include <cmath>

#include "doctest.h"
#include "uswb/adapt.hpp"
#include "uswb/medium.hpp"
#include "uswb/rng.hpp"

using namespace uswb;

namespace {
const double kTc = 5e-7;
}

TEST_CASE("rate formula") {
  CHECK(rate_bps(1, 1, kTc) == doctest::Approx(2e6));
  CHECK(rate_bps(15, 20, kTc) == doctest::Approx(6666.6667).epsilon(1e-6));
  CHECK(rate_bps(2, 3, kTc) == rate_bps(3, 2, kTc));
  CHECK_THROWS(rate_bps(0, 1, kTc));
}

TEST_CASE("sinr closed form") {
  SinrInputs in;
  in.own_power = 2.0;
  in.own_gain = 0.5;
  in.eta = 1e-3;
  in.sigma2 = 1.0;
  in.tc_s = kTc;
  // No interferers: N_s P g N_h Tc / eta.
  CHECK(sinr(4, 3, in, {}) == doctest::Approx(3 * 2.0 * 0.5 * 4 * kTc / 1e-3));

  // One interferer, equal N_h, P, g, eta -> 0: SINR -> N_s N_h / sigma^2.
  SinrInputs lim;
  lim.own_power = 1.0;
  lim.own_gain = 1.0;
  lim.eta = 1e-16;
  lim.sigma2 = 2.0;
  lim.tc_s = kTc;
  std::vector<LinkConfig> one{{1, 6, 1, 1.0, 1.0}};
  CHECK(sinr(6, 5, lim, one) == doctest::Approx(5.0 * 6.0 / 2.0).epsilon(1e-6));

  // Doubling every interferer's N_h doubles the interference-limited SINR.
  SinrInputs il = lim;
  il.eta = 0.0;
  std::vector<LinkConfig> peers{{1, 3, 1, 1.0, 0.7}, {2, 5, 1, 2.0, 0.3}};
  double base = sinr(6, 5, il, peers);
  for (auto& p : peers) p.n_h *= 2;
  CHECK(sinr(6, 5, il, peers) == doctest::Approx(2.0 * base));

  CHECK_THROWS(sinr(1, 1, il, {}));  // eta = 0 with no interferers
}

TEST_CASE("sinr monotonicity properties") {
  Pcg32 rng(404);
  for (int t = 0; t < 200; ++t) {
    SinrInputs in;
    in.own_power = rng.uniform(0.1, 2.0);
    in.own_gain = rng.uniform(0.01, 1.0);
    in.eta = rng.uniform(1e-9, 1e-6);
    in.sigma2 = rng.uniform(0.5, 2.0);
    in.tc_s = kTc;
    int k = 1 + static_cast<int>(rng.next_below(5));
    std::vector<LinkConfig> peers;
    for (int i = 0; i < k; ++i)
      peers.push_back({i, 1 + static_cast<int>(rng.next_below(15)), 1,
                       rng.uniform(0.1, 2.0), rng.uniform(0.01, 1.0)});
    int n_h = 1 + static_cast<int>(rng.next_below(15));
    int n_s = 1 + static_cast<int>(rng.next_below(20));
    double s0 = sinr(n_h, n_s, in, peers);
    CHECK(sinr(n_h, n_s + 1, in, peers) > s0);
    auto longer = peers;
    longer[0].n_h += 1;
    CHECK(sinr(n_h, n_s, in, longer) > s0);
  }
}

TEST_CASE("implicit solver: unconstrained optimum and infeasibility") {
  AdaptConstraints c;
  c.r_min_bps = 1e3;
  c.tc_s = kTc;
  auto always = [](int, int) { return true; };
  auto r = solve_implicit(c, always);
  REQUIRE(r.has_value());
  CHECK(r->n_h == 1);
  CHECK(r->n_s == 1);
  CHECK(r->rate == doctest::Approx(2e6));

  AdaptConstraints tight = c;
  tight.r_min_bps = 3e6;  // above rate(1,1)
  CHECK(!solve_implicit(tight, always).has_value());
}

TEST_CASE("implicit solver on the 3x3 synthetic instance") {
  AdaptConstraints c;
  c.n_h_max = 3;
  c.n_s_max = 3;
  c.r_min_bps = 1.0;
  c.tc_s = kTc;
  auto oracle = [](int n_h, int n_s) { return n_h + n_s >= 4; };
  auto r = solve_implicit(c, oracle);
  REQUIRE(r.has_value());
  CHECK(r->n_h == 3);
  CHECK(r->n_s == 1);
}

TEST_CASE("explicit solver honors report bounds") {
  AdaptConstraints c;
  c.r_min_bps = 1.0;
  c.tc_s = kTc;
  auto own = [](int, int n_s) { return n_s >= 2; };

  // Empty report set behaves like the implicit problem.
  auto base = solve_explicit(c, own, {}, 1.0, 0.0);
  REQUIRE(base.has_value());
  CHECK(base->n_h == 1);
  CHECK(base->n_s == 2);

  // One report forcing N_h >= 7.
  InterferenceReport rep{1.0, 0.0, 7.0};
  CHECK(report_min_frame_length(rep, 1.0, 0.0) == doctest::Approx(7.0));
  auto bounded = solve_explicit(c, own, {rep}, 1.0, 0.0);
  REQUIRE(bounded.has_value());
  CHECK(bounded->n_h == 7);
  CHECK(bounded->n_s == 2);

  // A report with no interference headroom makes the problem infeasible.
  InterferenceReport full{1.0, 0.6, 1.0};
  CHECK(!solve_explicit(c, own, {full}, 1.0, 0.5).has_value());
}

TEST_CASE("adding a report never increases the rate") {
  AdaptConstraints c;
  c.r_min_bps = 1.0;
  c.tc_s = kTc;
  auto own = [](int, int) { return true; };
  Pcg32 rng(88);
  for (int t = 0; t < 50; ++t) {
    std::vector<InterferenceReport> reps;
    auto prev = solve_explicit(c, own, reps, 1.0, 0.0);
    for (int i = 0; i < 4; ++i) {
      reps.push_back({1.0, 0.0, rng.uniform(0.5, 12.0)});
      auto next = solve_explicit(c, own, reps, 1.0, 0.0);
      if (!next.has_value()) break;
      REQUIRE(prev.has_value());
      CHECK(next->rate <= prev->rate);
      prev = next;
    }
  }
}

TEST_CASE("relaxed solution sits on the noise hyperbola when beta = 0") {
  RelaxedProblem p;
  p.constraints.r_min_bps = 1.0;
  p.constraints.tc_s = kTc;
  p.alpha = 1e-7;
  p.eta = 2e-7;
  p.sinr_min = 1.0;
  auto sol = solve_relaxed(p);
  REQUIRE(sol.has_value());
  // Constraint: eta / (N_h N_s) <= alpha / SINR_min  =>  product >= 2.
  CHECK(sol->n_h * sol->n_s == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol->objective == doctest::Approx(2.0 * kTc).epsilon(1e-6));
}

TEST_CASE("relaxed optimum lower-bounds the integer optimum") {
  Pcg32 rng(505);
  for (int t = 0; t < 100; ++t) {
    RelaxedProblem p;
    p.constraints.r_min_bps = 1e3;
    p.constraints.tc_s = kTc;
    p.alpha = rng.uniform(1e-8, 1e-6);
    p.eta = rng.uniform(1e-8, 1e-6);
    p.beta_sum = rng.uniform(0.0, 5e-7);
    p.sinr_min = rng.uniform(0.5, 4.0);
    auto rlx = solve_relaxed(p);
    // Matching integer-side oracle from the same posynomial constraint.
    auto oracle = [&](int n_h, int n_s) {
      return p.eta / (static_cast<double>(n_h) * n_s) + p.beta_sum / n_s <=
             p.alpha / p.sinr_min;
    };
    auto exact = solve_implicit(p.constraints, oracle);
    if (!exact.has_value()) continue;
    REQUIRE(rlx.has_value());
    double p_int = 1.0 / exact->rate;
    CHECK(rlx->objective <= p_int * (1.0 + 1e-9));

    auto rounded = round_relaxed(*rlx, 0.5, p.constraints, oracle);
    if (rounded.has_value()) {
      CHECK(rounded->lower <= p_int * (1.0 + 1e-9));
      CHECK(rounded->upper >= p_int * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("threshold rounding picks floor or ceil per coordinate") {
  AdaptConstraints c;
  c.r_min_bps = 1.0;
  c.tc_s = kTc;
  auto always = [](int, int) { return true; };
  RelaxedSolution rlx{2.4, 3.6, 2.4 * 3.6 * kTc};
  auto a = round_relaxed(rlx, 0.5, c, always);
  REQUIRE(a.has_value());
  CHECK(a->n_h == 2);
  CHECK(a->n_s == 4);
  auto b = round_relaxed(rlx, 0.3, c, always);
  REQUIRE(b.has_value());
  CHECK(b->n_h == 3);
  CHECK(b->n_s == 4);
  // Integral relaxed points survive rounding unchanged.
  RelaxedSolution integral{5.0, 7.0, 35.0 * kTc};
  auto i = round_relaxed(integral, 0.5, c, always);
  REQUIRE(i.has_value());
  CHECK(i->n_h == 5);
  CHECK(i->n_s == 7);
}

TEST_CASE("max safe pressure") {
  auto muscle = TissueTable::defaults().get("muscle");
  double p = max_safe_pressure(1e4, muscle.rho, muscle.c);
  CHECK(std::abs(p - 0.13e6) / 0.13e6 < 0.10);
  CHECK(max_safe_pressure(0.0, muscle.rho, muscle.c) == 0.0);
  CHECK(max_safe_pressure(4e4, muscle.rho, muscle.c) == doctest::Approx(2.0 * p));
}

TEST_CASE("pulse energy model") {
  PiezoParams pz;
  pz.c0_f = 1e-9;
  pz.g33 = 0.02;
  pz.thickness_m = 5e-4;
  pz.p_out_pa = 1e5;  // g33 * P * t_h = 1 V
  CHECK(pulse_energy(pz) == doctest::Approx(1e-9));

  PiezoParams half = pz;
  half.p_out_pa = 5e4;
  CHECK(pulse_energy(pz) == doctest::Approx(4.0 * pulse_energy(half)));

  PiezoParams derived = pz;
  derived.c0_f = 0.0;
  derived.area_m2 = 7.85e-7;
  derived.dielectric_k = 1000.0;
  CHECK(derived.capacitance() ==
        doctest::Approx(7.85e-7 * kEpsilon0 * 1000.0 / 5e-4));

  PiezoParams unsafe = pz;
  unsafe.p_out_pa = 1e7;
  CHECK_THROWS(pulse_energy(unsafe));
}

TEST_CASE("energy metrics") {
  auto m = energy_metrics(1e-9, 10, 1, kTc);
  CHECK(m.e_b == doctest::Approx(1e-9));
  CHECK(m.e_s == doctest::Approx(2e-4));
  // E_b independent of N_h; E_s independent of N_s.
  CHECK(energy_metrics(1e-9, 3, 7, kTc).e_b ==
        energy_metrics(1e-9, 12, 7, kTc).e_b);
  CHECK(energy_metrics(1e-9, 3, 7, kTc).e_s ==
        energy_metrics(1e-9, 3, 2, kTc).e_s);
}

TEST_CASE("enlarging the feasible region never decreases the implicit rate") {
  AdaptConstraints c;
  c.r_min_bps = 1.0;
  c.tc_s = kTc;
  Pcg32 rng(606);
  for (int t = 0; t < 60; ++t) {
    std::uint64_t s = rng.next_u64();
    double level = rng.uniform(0.2, 3.0);
    auto base = [s, level](int n_h, int n_s) {
      return static_cast<double>(mix64(s ^ (static_cast<std::uint64_t>(n_h) << 20) ^
                                       static_cast<std::uint64_t>(n_s)) >> 11) *
                 0x1.0p-53 <
             static_cast<double>(n_h) * n_s / (300.0 * level);
    };
    auto wider = [&base](int n_h, int n_s) {
      return base(n_h, n_s) || (n_h + n_s) % 5 == 0;
    };
    auto r1 = solve_implicit(c, base);
    auto r2 = solve_implicit(c, wider);
    if (!r1.has_value()) continue;
    REQUIRE(r2.has_value());
    CHECK(r2->rate >= r1->rate);
  }
}

TEST_CASE("E_b-optimal code length is minimal feasible at its frame length") {
  AdaptConstraints c;
  c.r_min_bps = 1.0;
  c.tc_s = kTc;
  Pcg32 rng(707);
  for (int t = 0; t < 40; ++t) {
    std::uint64_t s = rng.next_u64();
    auto oracle = [s](int n_h, int n_s) {
      return static_cast<double>(mix64(s ^ (static_cast<std::uint64_t>(n_h) << 20) ^
                                       static_cast<std::uint64_t>(n_s)) >> 11) *
                 0x1.0p-53 <
             static_cast<double>(n_h) * n_s / 150.0;
    };
    auto eb = solve_energy_min(EnergyObjective::kEnergyPerBit, 1e-9, c, oracle,
                               {}, 1.0, 0.0);
    if (!eb.has_value()) continue;
    for (int n_s = 1; n_s < eb->n_s; ++n_s)
      CHECK(!(oracle(eb->n_h, n_s) &&
              rate_bps(eb->n_h, n_s, c.tc_s) >= c.r_min_bps));
  }
}

TEST_CASE("energy-minimizing solver") {
  AdaptConstraints c;
  c.r_min_bps = 1e3;
  c.tc_s = kTc;
  auto always = [](int, int) { return true; };
  double e_p = 1e-9;

  auto eb = solve_energy_min(EnergyObjective::kEnergyPerBit, e_p, c, always, {}, 1.0, 0.0);
  REQUIRE(eb.has_value());
  CHECK(eb->n_s == 1);

  AdaptConstraints binding = c;
  binding.r_min_bps = 2e5;  // product must stay <= 10
  auto es = solve_energy_min(EnergyObjective::kEnergyPerSecond, e_p, binding,
                             always, {}, 1.0, 0.0);
  REQUIRE(es.has_value());
  CHECK(es->n_h == 10);
  CHECK(es->n_s == 1);

  // The energy optimum never beats the rate optimum on rate.
  auto rmax = solve_implicit(binding, always);
  REQUIRE(rmax.has_value());
  CHECK(es->rate <= rmax->rate);
}
