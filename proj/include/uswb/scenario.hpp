#pragma once

#include <string>
#include <vector>

#include "uswb/adapt.hpp"
#include "uswb/netsim.hpp"
#include "uswb/phy.hpp"

namespace uswb {

// Everything one `simulate` run needs, loaded from a JSON scenario file.
// Unknown keys are rejected; cross-field rules are checked by validate().
struct ScenarioConfig {
  TopologySetting setting = TopologySetting::kSingleSquare;
  int n_pairs = 9;
  TopologyConfig topology;
  PhyParams phy;
  NetSimConfig net;
  PiezoParams piezo;
  bool piezo_given = false;
  std::string ber_table_path;  // may be overridden on the CLI
  std::string output_dir = ".";
  std::uint64_t seed = 1;

  static ScenarioConfig load(const std::string& path);
  static ScenarioConfig from_json_text(const std::string& text,
                                       const std::string& origin = "<inline>");

  // Cross-field checks (delta < Tc, CFL-style sanity, BerTable coverage
  // when a table is supplied). Returns human-readable diagnostics; empty
  // means the scenario is valid.
  std::vector<std::string> validate(const BerTable* table = nullptr) const;
};

// Bundled defaults used by `reproduce` and tests.
ScenarioConfig default_scenario(TopologySetting setting, int n_pairs);

}  // namespace uswb
