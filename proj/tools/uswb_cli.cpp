// uswb: ultrasonic intra-body network simulator.
// Subcommands: wave, ber-table, solve, simulate, validate, reproduce.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uswb/adapt.hpp"
#include "uswb/channel.hpp"
#include "uswb/csv.hpp"
#include "uswb/medium.hpp"
#include "uswb/netsim.hpp"
#include "uswb/phy.hpp"
#include "uswb/scenario.hpp"
#include "uswb/wavefield.hpp"

namespace fs = std::filesystem;
using namespace uswb;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_series_csv(const std::string& path, const std::vector<double>& series,
                      double dt) {
  auto f = open_output(path);
  f << "t,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    f << format_double(static_cast<double>(i) * dt) << ','
      << format_double(series[i]) << '\n';
}

TissueTable load_tissues(const std::string& path) {
  if (path.empty()) return TissueTable::defaults();
  return TissueTable::load(path);
}

// ---------------------------------------------------------------- wave ----
int cmd_wave(const std::string& tissue_path, double dx, double dt, int steps,
             std::vector<double> source, std::vector<double> sink,
             double freq_mhz, const std::string& out,
             const std::string& snapshot_prefix, int snapshot_every) {
  auto table = load_tissues(tissue_path);
  auto geom = build_arm_geometry(dx, table);
  WaveRunConfig cfg;
  cfg.dt = dt > 0.0 ? dt : 0.8 * cfl_limit(geom);
  cfg.n_steps = steps;
  cfg.source = grid_pos_of(geom, source[0], source[1]);
  cfg.sink = grid_pos_of(geom, sink[0], sink[1]);
  cfg.source_waveform = dirac_like_waveform(cfg.dt, steps);
  cfg.source_center_freq_mhz = freq_mhz;
  cfg.snapshot_every = snapshot_every;
  auto res = simulate_field(geom, cfg);
  write_series_csv(out, res.sink_series, cfg.dt);
  if (!snapshot_prefix.empty() && snapshot_every > 0) {
    for (std::size_t s = 0; s < res.snapshots.size(); ++s) {
      auto f = open_output(snapshot_prefix + std::to_string(s) + ".csv");
      f << "i,j,pressure\n";
      const auto& snap = res.snapshots[s];
      for (int j = 0; j < geom.ny; ++j)
        for (int i = 0; i < geom.nx; ++i)
          f << i << ',' << j << ','
            << format_double(snap.pressure[static_cast<std::size_t>(j) * geom.nx + i])
            << '\n';
    }
  }
  auto cir = extract_impulse_response(res.sink_series, cfg.dt);
  auto stats = delay_stats(cir);
  std::cout << "sink_series=" << out << " taps=" << cir.taps.size()
            << " tau_m_s=" << format_double(stats.tau_m)
            << " tau_rms_s=" << format_double(stats.tau_rms)
            << " coherence_bw_hz=" << format_double(stats.coherence_bandwidth)
            << "\n";
  return 0;
}

// ----------------------------------------------------------- ber-table ----
int cmd_ber_table(int n_h_max, int n_s_max, int k_max, long trials,
                  std::uint64_t seed, const std::string& schemes_arg,
                  double eta, double interferer_amplitude, int spc,
                  const std::string& out, int threads) {
  std::vector<Scheme> schemes;
  std::istringstream ss(schemes_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) schemes.push_back(scheme_from_name(tok));
  BerSimParams sim;
  sim.eta = eta;
  sim.interferer_amplitude = interferer_amplitude;
  sim.phy.samples_per_chip = spc;
  auto table = build_ber_table(schemes, n_h_max, n_s_max, k_max, trials, seed,
                               sim, threads);
  table.save_csv(out);
  std::cout << "wrote " << table.size() << " entries to " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------- solve ----
int cmd_solve(const std::string& instance_path, const std::string& ber_table_path) {
  auto f = open_input(instance_path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(instance_path + ": " + e.what());
  }

  AdaptConstraints c;
  const json& jc = j.at("constraints");
  c.r_min_bps = jc.value("r_min_bps", 1e3);
  c.n_h_max = jc.value("n_h_max", 15);
  c.n_s_max = jc.value("n_s_max", 20);
  c.tc_s = jc.value("tc_s", 5e-7);

  std::string mode = j.value("mode", "implicit");
  double e_p = j.value("pulse_energy_j", 2.3e-11);

  const json& jo = j.at("oracle");
  std::string kind = jo.value("kind", "sinr");
  double sinr_min = jo.value("sinr_min", 1.0);
  double eta = jo.value("eta", 1e-9);
  FeasibilityOracle oracle;
  std::optional<BerTable> table;
  if (kind == "sinr") {
    SinrInputs in;
    in.own_power = jo.value("own_power", 1.0);
    in.own_gain = jo.value("own_gain", 1.0);
    in.eta = eta;
    in.sigma2 = jo.value("sigma2", 1.0);
    in.tc_s = c.tc_s;
    int k = jo.value("k", 0);
    oracle = sinr_oracle_implicit(in, k, jo.value("interferer_power", 1.0),
                                  jo.value("interferer_gain", 1.0), sinr_min);
  } else if (kind == "ber_table") {
    std::string path = !ber_table_path.empty() ? ber_table_path
                                               : jo.at("path").get<std::string>();
    table = BerTable::load_csv(path);
    Scheme scheme = scheme_from_name(jo.value("scheme", "ppm-bpsk"));
    int k = jo.value("k", 0);
    double ber_max = jo.value("ber_max", 1e-6);
    oracle = [t = &*table, scheme, k, ber_max](int n_h, int n_s) {
      return t->ber(scheme, k, n_h, n_s) <= ber_max;
    };
  } else {
    throw std::runtime_error("oracle.kind must be sinr or ber_table");
  }

  std::vector<InterferenceReport> reports;
  if (j.contains("reports"))
    for (const auto& r : j.at("reports"))
      reports.push_back({r.at("gamma").get<double>(), r.at("delta").get<double>(),
                         r.at("epsilon").get<double>()});

  std::optional<SolveResult> res;
  if (mode == "implicit")
    res = solve_implicit(c, oracle);
  else if (mode == "explicit")
    res = solve_explicit(c, oracle, reports, sinr_min, eta);
  else if (mode == "energy_eb" || mode == "energy-eb")
    res = solve_energy_min(EnergyObjective::kEnergyPerBit, e_p, c, oracle,
                           reports, sinr_min, eta);
  else if (mode == "energy_es" || mode == "energy-es")
    res = solve_energy_min(EnergyObjective::kEnergyPerSecond, e_p, c, oracle,
                           reports, sinr_min, eta);
  else
    throw std::runtime_error("mode must be implicit, explicit, energy_eb or energy_es");

  if (!res.has_value()) throw InfeasibleError("no feasible (N_h, N_s) pair");

  // Relaxation bounds (inverse-rate objective) when the instance is SINR-form.
  std::string lower = "", upper = "";
  if (kind == "sinr" && j.value("relaxation", true)) {
    RelaxedProblem rp;
    rp.constraints = c;
    rp.alpha = jo.value("own_power", 1.0) * jo.value("own_gain", 1.0) * c.tc_s;
    rp.eta = eta;
    rp.sinr_min = sinr_min;
    int k = jo.value("k", 0);
    // Interferers pinned at the frame length cap, matching the conservative
    // explicit-form coefficients.
    rp.beta_sum = k * jo.value("sigma2", 1.0) * c.tc_s *
                  jo.value("interferer_power", 1.0) *
                  jo.value("interferer_gain", 1.0) / c.n_h_max;
    rp.reports = reports;
    auto rlx = solve_relaxed(rp);
    if (rlx.has_value()) {
      lower = format_double(rlx->objective);
      auto rounded = round_relaxed(*rlx, j.value("rounding_threshold", 0.5), c, oracle);
      if (rounded.has_value()) upper = format_double(rounded->upper);
    }
  }

  EnergyMetrics em = energy_metrics(e_p, res->n_h, res->n_s, c.tc_s);
  std::cout << "N_h,N_s,rate_bps,E_b_j,E_s_w,lower_bound,upper_bound\n";
  std::cout << res->n_h << ',' << res->n_s << ',' << format_double(res->rate)
            << ',' << format_double(em.e_b) << ',' << format_double(em.e_s)
            << ',' << lower << ',' << upper << "\n";
  return 0;
}

// ------------------------------------------------------------- simulate ----
int cmd_simulate(const std::string& scenario_path, std::uint64_t seed_override,
                 bool seed_given, const std::string& ber_table_path,
                 const std::string& out_dir_override) {
  auto cfg = ScenarioConfig::load(scenario_path);
  if (seed_given) cfg.seed = seed_override;
  std::string table_path =
      !ber_table_path.empty() ? ber_table_path : cfg.ber_table_path;
  if (table_path.empty())
    throw std::runtime_error("simulate: a BER table is required (--ber-table "
                             "or output.ber_table in the scenario)");
  auto table = BerTable::load_csv(table_path);
  auto diags = cfg.validate(&table);
  if (!diags.empty()) {
    for (const auto& d : diags) std::cerr << "config error: " << d << "\n";
    return kExitConfig;
  }
  auto topo = generate_topology(cfg.setting, cfg.n_pairs, cfg.seed, cfg.topology);
  auto metrics = run_simulation(topo, cfg.net, table, cfg.seed);

  std::string dir = !out_dir_override.empty() ? out_dir_override : cfg.output_dir;
  fs::create_directories(dir);
  metrics.write_metrics_csv(dir + "/metrics.csv");
  metrics.write_trace_csv(dir + "/trace.csv");
  if (cfg.net.record_events) metrics.write_events_csv(dir + "/events.csv");
  std::cout << "delivered=" << metrics.total_delivered()
            << " dropped=" << metrics.total_dropped()
            << " drop_rate=" << format_double(metrics.drop_rate())
            << " throughput_bps=" << format_double(metrics.aggregate_throughput_bps())
            << " mean_eb_j=" << format_double(metrics.mean_energy_per_bit_all())
            << "\n";
  return 0;
}

// ------------------------------------------------------------- validate ----
int cmd_validate(const std::string& scenario_path, const std::string& ber_table_path) {
  auto cfg = ScenarioConfig::load(scenario_path);
  std::optional<BerTable> table;
  std::string table_path =
      !ber_table_path.empty() ? ber_table_path : cfg.ber_table_path;
  if (!table_path.empty()) table = BerTable::load_csv(table_path);
  auto diags = cfg.validate(table ? &*table : nullptr);
  if (diags.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& d : diags) std::cout << d << "\n";
  return kExitConfig;
}

// ------------------------------------------------------------ reproduce ----
BerTable load_or_build_table(const std::string& dir, std::uint64_t seed,
                             long trials) {
  std::string path = dir + "/ber_table.csv";
  if (fs::exists(path)) return BerTable::load_csv(path);
  std::cout << "building BER table (" << trials << " trials/point)...\n";
  auto table = build_ber_table({Scheme::kPpmBpsk, Scheme::kPpmPpm}, 15, 20, 8,
                               trials, seed);
  table.save_csv(path);
  return table;
}

int cmd_reproduce(const std::string& figure, const std::string& out_dir,
                  std::uint64_t seed) {
  fs::create_directories(out_dir);
  if (figure == "fig1") {
    // Arm-section impulse response at desk scale. Budget: ~1 min.
    auto geom = build_arm_geometry(0.0005, TissueTable::defaults());
    WaveRunConfig wc;
    wc.dt = 0.8 * cfl_limit(geom);
    wc.n_steps = 4000;
    wc.source = grid_pos_of(geom, 0.005, 0.075);
    wc.sink = grid_pos_of(geom, 0.195, 0.025);
    wc.source_waveform = dirac_like_waveform(wc.dt, wc.n_steps);
    wc.snapshot_every = 800;
    auto res = simulate_field(geom, wc);
    write_series_csv(out_dir + "/fig1_series.csv", res.sink_series, wc.dt);
    auto cir = extract_impulse_response(res.sink_series, wc.dt);
    cir.save_csv(out_dir + "/fig1_cir.csv");
    auto stats = delay_stats(cir);
    std::cout << "tau_m_s=" << format_double(stats.tau_m)
              << " tau_rms_s=" << format_double(stats.tau_rms) << "\n";
    return 0;
  }
  if (figure == "fig2") {
    // Two users' combined time-hopping + spreading waveforms.
    PhyParams phy;
    phy.samples_per_chip = 64;
    HoppingPlan u1, u2;
    u1.scheme = u2.scheme = Scheme::kPpmBpsk;
    u1.n_h = u2.n_h = 15;
    u1.n_s = u2.n_s = 4;
    u1.th = {3, 12, 8, 2};
    u1.code = {1, -1, -1, 1};
    u2.th = {11, 3, 12, 7};
    u2.code = {1, 1, 1, -1};
    auto s1 = modulate({0}, u1, phy);
    auto s2 = modulate({0}, u2, phy);
    auto f = open_output(out_dir + "/fig2_signals.csv");
    f << "t,user1,user2\n";
    for (std::size_t i = 0; i < s1.size(); ++i)
      f << format_double(static_cast<double>(i) * phy.sample_dt()) << ','
        << format_double(s1[i]) << ',' << format_double(s2[i]) << '\n';
    return 0;
  }

  auto table = load_or_build_table(out_dir, seed, 20000);

  if (figure == "fig3") {
    // Throughput and drop rate vs number of connections, implicit mode.
    auto f = open_output(out_dir + "/fig3_throughput_drop.csv");
    f << "connections,scheme,throughput_bps,drop_rate\n";
    for (Scheme scheme : {Scheme::kPpmBpsk, Scheme::kPpmPpm}) {
      for (int n = 1; n <= 9; ++n) {
        auto cfg = default_scenario(TopologySetting::kSingleSquare, n);
        cfg.net.scheme = scheme;
        cfg.net.duration_s = 30.0;
        auto topo = generate_topology(cfg.setting, n, seed, cfg.topology);
        auto m = run_simulation(topo, cfg.net, table, seed);
        f << n << ',' << scheme_name(scheme) << ','
          << format_double(m.aggregate_throughput_bps()) << ','
          << format_double(m.drop_rate()) << '\n';
      }
    }
    return 0;
  }
  if (figure == "fig4") {
    // BER vs frame length and vs code length at K = 4.
    auto f = open_output(out_dir + "/fig4_ber.csv");
    f << "scheme,K,N_h,N_s,ber,ci_half_width\n";
    for (Scheme scheme : {Scheme::kPpmBpsk, Scheme::kPpmPpm}) {
      for (int n_h : {1, 3, 5, 8, 11, 15}) {
        const auto& e = table.at({scheme, 4, n_h, 10});
        f << scheme_name(scheme) << ",4," << n_h << ",10,"
          << format_double(e.ber) << ',' << format_double(e.half_width) << '\n';
      }
      for (int n_s : {1, 4, 8, 12, 16, 20}) {
        const auto& e = table.at({scheme, 4, 8, n_s});
        f << scheme_name(scheme) << ",4,8," << n_s << ','
          << format_double(e.ber) << ',' << format_double(e.half_width) << '\n';
      }
    }
    return 0;
  }
  if (figure == "fig5" || figure == "fig7") {
    bool explicit_mode = figure == "fig7";
    auto cfg = default_scenario(explicit_mode ? TopologySetting::kThreeClusters
                                              : TopologySetting::kSingleSquare,
                                9);
    cfg.net.duration_s = 60.0;
    auto topo = generate_topology(cfg.setting, 9, seed, cfg.topology);
    auto m = staged_activation(topo, cfg.net, table, seed, 5.0);
    m.write_trace_csv(out_dir + "/" + figure + "_trace.csv");
    return 0;
  }
  if (figure == "fig6") {
    auto cfg = default_scenario(TopologySetting::kThreeClusters, 9);
    cfg.net.duration_s = 50.0;
    auto topo = generate_topology(cfg.setting, 9, seed, cfg.topology);
    auto m = staged_activation(topo, cfg.net, table, seed, 5.0);
    auto f = open_output(out_dir + "/fig6_cluster_throughput.csv");
    f << "step,cluster,avg_throughput_bps\n";
    double base = cfg.net.staged_base_s;
    // Step s is fully formed between the activations of connections 2s and
    // 2s+1 (one activation per 5 s).
    for (int step = 1; step <= 4; ++step) {
      double t0 = base + 2.0 * step * 5.0 + 1.0;
      double t1 = step == 4 ? cfg.net.duration_s
                            : std::min(cfg.net.duration_s, base + (2.0 * step + 1.0) * 5.0);
      for (int cluster = 0; cluster < 3; ++cluster) {
        double bits = 0.0;
        int conns = 0;
        for (std::size_t c = 0; c < topo.connections.size(); ++c) {
          if (topo.connections[c].cluster != cluster) continue;
          double act = base + static_cast<double>(c) * 5.0;
          if (act > t0) continue;
          ++conns;
          for (std::size_t w = 0; w < m.window_bits[c].size(); ++w) {
            double wt = (static_cast<double>(w) + 1.0) * m.window_s;
            if (wt > t0 && wt <= t1) bits += m.window_bits[c][w];
          }
        }
        if (conns > 0)
          f << step << ',' << cluster << ','
            << format_double(bits / conns / (t1 - t0)) << '\n';
      }
    }
    return 0;
  }
  if (figure == "fig8") {
    auto f = open_output(out_dir + "/fig8_rate_vs_energy.csv");
    f << "connections,mode,throughput_bps,mean_eb_j,drop_rate\n";
    for (AdaptationMode mode : {AdaptationMode::kImplicit, AdaptationMode::kEnergyEb}) {
      for (int n = 1; n <= 9; ++n) {
        auto cfg = default_scenario(TopologySetting::kSingleSquare, n);
        cfg.net.mode = mode;
        cfg.net.duration_s = 30.0;
        auto topo = generate_topology(cfg.setting, n, seed, cfg.topology);
        auto m = run_simulation(topo, cfg.net, table, seed);
        f << n << ',' << adaptation_mode_name(mode) << ','
          << format_double(m.aggregate_throughput_bps()) << ','
          << format_double(m.mean_energy_per_bit_all()) << ','
          << format_double(m.drop_rate()) << '\n';
      }
    }
    return 0;
  }
  throw std::runtime_error("unknown figure id '" + figure +
                           "' (fig1..fig8 supported)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UsWB multi-scale ultrasonic intra-body network simulator"};
  app.require_subcommand(1);

  // wave
  auto* wave = app.add_subcommand("wave", "2-D FDTD acoustic run on the arm section");
  double dx = 0.0005, dt = 0.0, freq_mhz = 2.0;
  int steps = 4000, snapshot_every = 0;
  std::vector<double> source{0.005, 0.075}, sink{0.195, 0.025};
  std::string tissue_path, wave_out = "wave_series.csv", snapshot_prefix;
  wave->add_option("--dx", dx, "grid spacing [m]");
  wave->add_option("--dt", dt, "time step [s] (default 0.8 CFL)");
  wave->add_option("--steps", steps, "number of time steps");
  wave->add_option("--source", source, "source position x y [m]")->expected(2);
  wave->add_option("--sink", sink, "sink position x y [m]")->expected(2);
  wave->add_option("--tissues", tissue_path, "tissue table JSON");
  wave->add_option("--freq-mhz", freq_mhz, "attenuation evaluation frequency");
  wave->add_option("--out", wave_out, "sink series CSV");
  wave->add_option("--snapshot-prefix", snapshot_prefix, "field snapshot CSV prefix");
  wave->add_option("--snapshot-every", snapshot_every, "steps between snapshots");

  // ber-table
  auto* bt = app.add_subcommand("ber-table", "Monte Carlo BER surface");
  int nh_max = 15, ns_max = 20, k_max = 8, spc = 16, threads = 0;
  long trials = 20000;
  std::uint64_t seed = 1;
  double eta = 2e-2, i_amp = 3.7;
  std::string schemes = "ppm-bpsk,ppm-ppm", bt_out = "ber_table.csv";
  bt->add_option("--nh-max", nh_max, "maximum frame length");
  bt->add_option("--ns-max", ns_max, "maximum code length");
  bt->add_option("--k-max", k_max, "maximum interferer count");
  bt->add_option("--trials", trials, "Monte Carlo trials per point");
  bt->add_option("--seed", seed, "master seed");
  bt->add_option("--schemes", schemes, "comma-separated scheme list");
  bt->add_option("--eta", eta, "noise energy density");
  bt->add_option("--interferer-amplitude", i_amp, "per-interferer amplitude");
  bt->add_option("--samples-per-chip", spc, "sample grid resolution");
  bt->add_option("--threads", threads, "worker threads (0 = auto)");
  bt->add_option("--out", bt_out, "output CSV");

  // solve
  auto* solve = app.add_subcommand("solve", "rate/energy adaptation solver");
  std::string instance_path, solve_table;
  solve->add_option("--instance", instance_path, "problem instance JSON")->required();
  solve->add_option("--ber-table", solve_table, "BER table CSV (ber_table oracle)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "packet-level discrete-event run");
  std::string scenario_path, sim_table, sim_out;
  std::uint64_t sim_seed = 0;
  bool sim_seed_given = false;
  sim->add_option("--scenario", scenario_path, "scenario JSON")->required();
  sim->add_option("--ber-table", sim_table, "BER table CSV");
  sim->add_option("--out-dir", sim_out, "output directory override");
  sim->add_option("--seed", sim_seed, "seed override")
      ->each([&](const std::string&) { sim_seed_given = true; });

  // validate
  auto* val = app.add_subcommand("validate", "scenario schema and cross-field checks");
  std::string val_scenario, val_table;
  val->add_option("--scenario", val_scenario, "scenario JSON")->required();
  val->add_option("--ber-table", val_table, "BER table CSV for coverage checks");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "figure reproduction recipes");
  std::string figure, rep_out = "reproduce_out";
  std::uint64_t rep_seed = 1;
  rep->add_option("figure", figure, "fig1..fig8")->required();
  rep->add_option("--out-dir", rep_out, "output directory");
  rep->add_option("--seed", rep_seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (wave->parsed())
      return cmd_wave(tissue_path, dx, dt, steps, source, sink, freq_mhz,
                      wave_out, snapshot_prefix, snapshot_every);
    if (bt->parsed())
      return cmd_ber_table(nh_max, ns_max, k_max, trials, seed, schemes, eta,
                           i_amp, spc, bt_out, threads);
    if (solve->parsed()) return cmd_solve(instance_path, solve_table);
    if (sim->parsed())
      return cmd_simulate(scenario_path, sim_seed, sim_seed_given, sim_table, sim_out);
    if (val->parsed()) return cmd_validate(val_scenario, val_table);
    if (rep->parsed()) return cmd_reproduce(figure, rep_out, rep_seed);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
