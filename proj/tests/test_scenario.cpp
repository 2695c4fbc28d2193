#include "doctest.h"
#include "uswb/scenario.hpp"

using namespace uswb;

TEST_CASE("default scenarios validate cleanly") {
  auto single = default_scenario(TopologySetting::kSingleSquare, 9);
  CHECK(single.validate().empty());
  auto clusters = default_scenario(TopologySetting::kThreeClusters, 9);
  CHECK(clusters.validate().empty());
}

TEST_CASE("scenario JSON parsing applies nested values") {
  const char* text = R"({
    "topology": {"setting": "three_clusters", "n_pairs": 5},
    "phy": {"tc_s": 5e-7, "scheme": "ppm-ppm"},
    "constraints": {"r_min_bps": 2000, "oracle": "sinr", "sinr_min": 12.5},
    "mac": {"mode": "explicit", "data_retries": 4},
    "sim": {"duration_s": 42.0, "seed": 99},
    "output": {"dir": "out"}
  })";
  auto cfg = ScenarioConfig::from_json_text(text);
  CHECK(cfg.setting == TopologySetting::kThreeClusters);
  CHECK(cfg.n_pairs == 5);
  CHECK(cfg.net.scheme == Scheme::kPpmPpm);
  CHECK(cfg.net.constraints.r_min_bps == 2000);
  CHECK(cfg.net.oracle == OracleKind::kSinr);
  CHECK(cfg.net.sinr_min == 12.5);
  CHECK(cfg.net.mode == AdaptationMode::kExplicit);
  CHECK(cfg.net.mac.data_retries == 4);
  CHECK(cfg.net.duration_s == 42.0);
  CHECK(cfg.seed == 99);
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.validate().empty());
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(
      ScenarioConfig::from_json_text(R"({"phy": {"chip_time": 1e-6}})"),
      doctest::Contains("chip_time"), std::runtime_error);
  CHECK_THROWS_WITH_AS(ScenarioConfig::from_json_text(R"({"phelps": {}})"),
                       doctest::Contains("phelps"), std::runtime_error);
}

TEST_CASE("delta = Tc violates the delta < Tc rule") {
  auto cfg = ScenarioConfig::from_json_text(
      R"({"phy": {"tc_s": 5e-7, "delta_s": 5e-7}})");
  auto diags = cfg.validate();
  REQUIRE(!diags.empty());
  bool mentions = false;
  for (const auto& d : diags)
    if (d.find("delta") != std::string::npos) mentions = true;
  CHECK(mentions);
}

TEST_CASE("table coverage gaps are diagnosed") {
  auto cfg = default_scenario(TopologySetting::kSingleSquare, 9);
  BerTable table;  // empty: every key is missing
  auto diags = cfg.validate(&table);
  REQUIRE(!diags.empty());
  bool coverage = false;
  for (const auto& d : diags)
    if (d.find("coverage") != std::string::npos) coverage = true;
  CHECK(coverage);

  // A table that misses exactly the top-K corner is also caught.
  BerTable partial;
  for (int k = 0; k <= 8; ++k)
    for (int n_h = 1; n_h <= 15; ++n_h)
      for (int n_s = 1; n_s <= 20; ++n_s) {
        if (k == 8 && n_h == 15 && n_s == 20) continue;
        BerEstimate e;
        e.trials = 100;
        partial.insert({cfg.net.scheme, k, n_h, n_s}, e);
      }
  auto diags2 = cfg.validate(&partial);
  REQUIRE(!diags2.empty());
  CHECK(diags2.front().find("K=8") != std::string::npos);
  CHECK(diags2.front().find("N_h=15") != std::string::npos);
}

TEST_CASE("explicit mode with the table oracle is rejected") {
  auto cfg = ScenarioConfig::from_json_text(
      R"({"mac": {"mode": "explicit"}, "constraints": {"oracle": "ber_table"}})");
  auto diags = cfg.validate();
  REQUIRE(!diags.empty());
  CHECK(diags.front().find("explicit") != std::string::npos);
}

TEST_CASE("piezo section feeds the pulse energy") {
  auto cfg = ScenarioConfig::from_json_text(R"({
    "energy": {"c0_f": 1e-9, "g33": 0.02, "thickness_m": 5e-4, "p_out_pa": 1e5}
  })");
  CHECK(cfg.piezo_given);
  CHECK(cfg.net.pulse_energy_j == doctest::Approx(1e-9));
}
