#include "uswb/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "uswb/csv.hpp"

namespace uswb {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw std::runtime_error(origin + ": " + msg);
}

// Rejects keys outside the allowed set, reporting the offender by name.
void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& origin, const std::string& section) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(origin, "unknown key '" + it.key() + "' in section '" + section + "'");
}

double num(const json& obj, const char* key, double def) {
  return obj.contains(key) ? obj.at(key).get<double>() : def;
}

int integer(const json& obj, const char* key, int def) {
  return obj.contains(key) ? obj.at(key).get<int>() : def;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text,
                                              const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(origin, std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) fail(origin, "scenario must be a JSON object");
  check_keys(j, {"topology", "phy", "constraints", "mac", "energy", "sim", "output"},
             origin, "<root>");

  ScenarioConfig cfg;

  if (j.contains("topology")) {
    const json& t = j.at("topology");
    check_keys(t,
               {"setting", "n_pairs", "square_side_m", "cluster_side_m",
                "cluster_spacing_m", "cluster_sigma_m", "range_single_m",
                "range_clusters_m", "sound_speed_m_s", "gain_freq_mhz"},
               origin, "topology");
    std::string setting = t.value("setting", "single_square");
    if (setting == "single_square")
      cfg.setting = TopologySetting::kSingleSquare;
    else if (setting == "three_clusters")
      cfg.setting = TopologySetting::kThreeClusters;
    else
      fail(origin, "topology.setting must be single_square or three_clusters");
    cfg.n_pairs = integer(t, "n_pairs", cfg.n_pairs);
    if (cfg.n_pairs < 1) fail(origin, "topology.n_pairs must be >= 1");
    cfg.topology.square_side_m = num(t, "square_side_m", cfg.topology.square_side_m);
    cfg.topology.cluster_side_m = num(t, "cluster_side_m", cfg.topology.cluster_side_m);
    cfg.topology.cluster_spacing_m = num(t, "cluster_spacing_m", cfg.topology.cluster_spacing_m);
    cfg.topology.cluster_sigma_m = num(t, "cluster_sigma_m", cfg.topology.cluster_sigma_m);
    cfg.topology.range_single_m = num(t, "range_single_m", cfg.topology.range_single_m);
    cfg.topology.range_clusters_m = num(t, "range_clusters_m", cfg.topology.range_clusters_m);
    cfg.topology.sound_speed_m_s = num(t, "sound_speed_m_s", cfg.topology.sound_speed_m_s);
    cfg.topology.gain_freq_mhz = num(t, "gain_freq_mhz", cfg.topology.gain_freq_mhz);
  }

  if (j.contains("phy")) {
    const json& p = j.at("phy");
    check_keys(p,
               {"tc_s", "delta_s", "pulse_width_s", "samples_per_chip", "scheme"},
               origin, "phy");
    cfg.phy.tc_s = num(p, "tc_s", cfg.phy.tc_s);
    cfg.phy.delta_s = num(p, "delta_s", cfg.phy.tc_s / 2.0);
    cfg.phy.pulse_width_s = num(p, "pulse_width_s", cfg.phy.tc_s / 4.0);
    cfg.phy.samples_per_chip = integer(p, "samples_per_chip", cfg.phy.samples_per_chip);
    if (p.contains("scheme"))
      cfg.net.scheme = scheme_from_name(p.at("scheme").get<std::string>());
  }
  cfg.net.constraints.tc_s = cfg.phy.tc_s;

  if (j.contains("constraints")) {
    const json& c = j.at("constraints");
    check_keys(c,
               {"r_min_bps", "n_h_max", "n_s_max", "ber_max", "sinr_min",
                "oracle", "eta", "sigma2", "tx_power"},
               origin, "constraints");
    cfg.net.constraints.r_min_bps = num(c, "r_min_bps", cfg.net.constraints.r_min_bps);
    cfg.net.constraints.n_h_max = integer(c, "n_h_max", cfg.net.constraints.n_h_max);
    cfg.net.constraints.n_s_max = integer(c, "n_s_max", cfg.net.constraints.n_s_max);
    cfg.net.ber_max = num(c, "ber_max", cfg.net.ber_max);
    cfg.net.sinr_min = num(c, "sinr_min", cfg.net.sinr_min);
    cfg.net.eta = num(c, "eta", cfg.net.eta);
    cfg.net.sigma2 = num(c, "sigma2", cfg.net.sigma2);
    cfg.net.tx_power = num(c, "tx_power", cfg.net.tx_power);
    if (c.contains("oracle")) {
      std::string o = c.at("oracle").get<std::string>();
      if (o == "ber_table")
        cfg.net.oracle = OracleKind::kBerTable;
      else if (o == "sinr")
        cfg.net.oracle = OracleKind::kSinr;
      else
        fail(origin, "constraints.oracle must be ber_table or sinr");
    }
  }

  if (j.contains("mac")) {
    const json& m = j.at("mac");
    check_keys(m,
               {"mode", "data_bits", "ctrl_bits", "ack_bits", "backoff_min_s",
                "backoff_max_s", "handshake_retries", "data_retries",
                "timeout_guard_s"},
               origin, "mac");
    if (m.contains("mode"))
      cfg.net.mode = adaptation_mode_from_name(m.at("mode").get<std::string>());
    cfg.net.mac.data_bits = integer(m, "data_bits", cfg.net.mac.data_bits);
    cfg.net.mac.ctrl_bits = integer(m, "ctrl_bits", cfg.net.mac.ctrl_bits);
    cfg.net.mac.ack_bits = integer(m, "ack_bits", cfg.net.mac.ack_bits);
    cfg.net.mac.backoff_min_s = num(m, "backoff_min_s", cfg.net.mac.backoff_min_s);
    cfg.net.mac.backoff_max_s = num(m, "backoff_max_s", cfg.net.mac.backoff_max_s);
    cfg.net.mac.handshake_retries = integer(m, "handshake_retries", cfg.net.mac.handshake_retries);
    cfg.net.mac.data_retries = integer(m, "data_retries", cfg.net.mac.data_retries);
    cfg.net.mac.timeout_guard_s = num(m, "timeout_guard_s", cfg.net.mac.timeout_guard_s);
  }

  if (j.contains("energy")) {
    const json& e = j.at("energy");
    check_keys(e,
               {"c0_f", "area_m2", "dielectric_k", "thickness_m", "g33",
                "p_out_pa", "intensity_limit_w_m2", "rho", "c"},
               origin, "energy");
    cfg.piezo.c0_f = num(e, "c0_f", 0.0);
    cfg.piezo.area_m2 = num(e, "area_m2", 0.0);
    cfg.piezo.dielectric_k = num(e, "dielectric_k", 0.0);
    cfg.piezo.thickness_m = num(e, "thickness_m", 0.0);
    cfg.piezo.g33 = num(e, "g33", 0.0);
    cfg.piezo.p_out_pa = num(e, "p_out_pa", 0.0);
    cfg.piezo.intensity_limit_w_m2 = num(e, "intensity_limit_w_m2", 1e4);
    cfg.piezo.rho = num(e, "rho", cfg.piezo.rho);
    cfg.piezo.c = num(e, "c", cfg.piezo.c);
    cfg.piezo_given = true;
    cfg.net.pulse_energy_j = pulse_energy(cfg.piezo);
  }

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    check_keys(s,
               {"duration_s", "activation_window_s", "staged_delay_s",
                "staged_base_s", "metrics_window_s", "seed", "record_events"},
               origin, "sim");
    cfg.net.duration_s = num(s, "duration_s", cfg.net.duration_s);
    cfg.net.activation_window_s = num(s, "activation_window_s", cfg.net.activation_window_s);
    cfg.net.staged_delay_s = num(s, "staged_delay_s", cfg.net.staged_delay_s);
    cfg.net.staged_base_s = num(s, "staged_base_s", cfg.net.staged_base_s);
    cfg.net.metrics_window_s = num(s, "metrics_window_s", cfg.net.metrics_window_s);
    if (s.contains("seed")) cfg.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("record_events")) cfg.net.record_events = s.at("record_events").get<bool>();
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, {"dir", "ber_table"}, origin, "output");
    cfg.output_dir = o.value("dir", cfg.output_dir);
    cfg.ber_table_path = o.value("ber_table", cfg.ber_table_path);
  }

  return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  auto f = open_input(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_json_text(ss.str(), path);
}

std::vector<std::string> ScenarioConfig::validate(const BerTable* table) const {
  std::vector<std::string> diags;
  try {
    phy.validate();
  } catch (const std::exception& e) {
    diags.emplace_back(std::string("phy: ") + e.what());
  }
  if (!(phy.delta_s < phy.tc_s))
    diags.emplace_back("phy: rule delta < Tc violated");
  if (net.constraints.n_h_max < 1 || net.constraints.n_s_max < 1)
    diags.emplace_back("constraints: N_h_max and N_s_max must be >= 1");
  if (net.constraints.n_h_max >= 1 && net.constraints.n_s_max >= 1 &&
      net.constraints.r_min_bps > rate_bps(1, 1, net.constraints.tc_s))
    diags.emplace_back("constraints: R_min exceeds the maximum rate");
  if (net.ber_max <= 0.0 || net.ber_max >= 1.0)
    diags.emplace_back("constraints: ber_max must lie in (0, 1)");
  if (net.mac.data_bits < 1 || net.mac.ctrl_bits < 1 || net.mac.ack_bits < 1)
    diags.emplace_back("mac: packet lengths must be >= 1 bit");
  if (net.mac.backoff_min_s > net.mac.backoff_max_s)
    diags.emplace_back("mac: backoff_min_s must be <= backoff_max_s");
  if (net.mode == AdaptationMode::kExplicit && net.oracle != OracleKind::kSinr)
    diags.emplace_back("mac: explicit mode requires constraints.oracle = sinr");
  if (net.duration_s <= 0.0) diags.emplace_back("sim: duration_s must be > 0");
  if (n_pairs > 9 && setting == TopologySetting::kSingleSquare)
    diags.emplace_back("topology: the single square supports at most 9 pairs");
  if (table != nullptr) {
    std::string gap = table->first_gap(net.scheme, net.constraints.n_h_max,
                                       net.constraints.n_s_max, n_pairs - 1);
    if (!gap.empty())
      diags.emplace_back("ber_table: missing coverage for configured grid, "
                         "first gap " + gap);
  }
  return diags;
}

ScenarioConfig default_scenario(TopologySetting setting, int n_pairs) {
  ScenarioConfig cfg;
  cfg.setting = setting;
  cfg.n_pairs = n_pairs;
  if (setting == TopologySetting::kThreeClusters) {
    cfg.net.mode = AdaptationMode::kExplicit;
    cfg.net.oracle = OracleKind::kSinr;
    // Mild attenuation keeps cross-cluster interference significant next to
    // within-cluster near-far spread. Short packets keep the retransmission
    // overhead gradient flat across the operating region, so cluster
    // throughput differences reflect the chosen rates. sigma2 is fitted to
    // the bundled Monte Carlo BER surface through the Gaussian
    // approximation, which lines the SINR feasibility region up with the
    // packet error process.
    cfg.topology.gain_freq_mhz = 0.05;
    cfg.net.sigma2 = 7.0;
    cfg.net.sinr_min = 8.0;
    cfg.net.mac.data_bits = 256;
  }
  return cfg;
}

}  // namespace uswb
