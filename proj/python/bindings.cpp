#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uswb/adapt.hpp"
#include "uswb/channel.hpp"
#include "uswb/medium.hpp"
#include "uswb/netsim.hpp"
#include "uswb/phy.hpp"
#include "uswb/scenario.hpp"
#include "uswb/wavefield.hpp"

namespace py = pybind11;
using namespace uswb;

PYBIND11_MODULE(_core, m) {
  m.doc() = "UsWB ultrasonic intra-body network simulator";

  // ---- channel ----
  py::class_<MediumParams>(m, "MediumParams")
      .def(py::init<>())
      .def(py::init([](double c, double rho, double a, double b) {
             return MediumParams{c, rho, a, b};
           }),
           py::arg("c"), py::arg("rho"), py::arg("a"), py::arg("b") = 1.0)
      .def_readwrite("c", &MediumParams::c)
      .def_readwrite("rho", &MediumParams::rho)
      .def_readwrite("a", &MediumParams::a)
      .def_readwrite("b", &MediumParams::b);

  py::class_<ChannelTap>(m, "ChannelTap")
      .def_readonly("delay_s", &ChannelTap::delay_s)
      .def_readonly("amplitude", &ChannelTap::amplitude);

  py::class_<ChannelImpulseResponse>(m, "ChannelImpulseResponse")
      .def_static("single_tap", &ChannelImpulseResponse::single_tap,
                  py::arg("gain") = 1.0)
      .def_readonly("taps", &ChannelImpulseResponse::taps)
      .def("save_csv", &ChannelImpulseResponse::save_csv)
      .def_static("load_csv", &ChannelImpulseResponse::load_csv);

  py::class_<DelayStats>(m, "DelayStats")
      .def_readonly("tau_m", &DelayStats::tau_m)
      .def_readonly("tau_rms", &DelayStats::tau_rms)
      .def_readonly("coherence_bandwidth", &DelayStats::coherence_bandwidth);

  m.def("attenuation_coefficient", &attenuation_coefficient, py::arg("f_mhz"),
        py::arg("medium"));
  m.def("pressure_ratio", &pressure_ratio, py::arg("d_m"), py::arg("alpha_np_per_m"));
  m.def("max_frequency_for_budget", &max_frequency_for_budget, py::arg("d_m"),
        py::arg("medium"), py::arg("budget_db"));
  m.def("path_gain", &path_gain, py::arg("d_m"), py::arg("f_mhz"), py::arg("medium"),
        py::arg("geometric_spreading") = false, py::arg("reference_distance_m") = 1.0);
  m.def("synth_impulse_response", &synth_impulse_response, py::arg("n_taps"),
        py::arg("tap_spacing_s"), py::arg("decay_constant_s"), py::arg("rng_seed"),
        py::arg("distance_m") = 0.0);
  m.def("delay_stats", &delay_stats);
  m.def("calibrate_decay_constant", &calibrate_decay_constant, py::arg("n_taps"),
        py::arg("tap_spacing_s"), py::arg("target_tau_rms_s"));

  m.def("default_tissues", [] {
    py::dict d;
    auto table = TissueTable::defaults();
    for (const auto& [name, p] : table.all())
      d[py::str(name)] = py::make_tuple(p.c, p.rho, p.a, p.b);
    return d;
  });

  // ---- adapt ----
  m.def("rate_bps", &rate_bps, py::arg("n_h"), py::arg("n_s"), py::arg("tc_s"));
  m.def("max_safe_pressure", &max_safe_pressure, py::arg("intensity_limit_w_m2"),
        py::arg("rho"), py::arg("c"));
  m.def(
      "sinr",
      [](int n_h, int n_s, double own_power, double own_gain, double eta,
         double sigma2, double tc_s,
         const std::vector<std::tuple<int, double, double>>& interferers) {
        SinrInputs in{own_power, own_gain, eta, sigma2, tc_s};
        std::vector<LinkConfig> peers;
        for (const auto& [k_n_h, power, gain] : interferers)
          peers.push_back({0, k_n_h, 1, power, gain});
        return sinr(n_h, n_s, in, peers);
      },
      py::arg("n_h"), py::arg("n_s"), py::arg("own_power") = 1.0,
      py::arg("own_gain") = 1.0, py::arg("eta") = 1e-9, py::arg("sigma2") = 1.0,
      py::arg("tc_s") = 5e-7,
      py::arg("interferers") = std::vector<std::tuple<int, double, double>>{});
  m.def(
      "solve_implicit_sinr",
      [](double r_min_bps, int n_h_max, int n_s_max, double tc_s, int k,
         double sinr_min, double own_power, double own_gain, double eta,
         double sigma2, double interferer_power, double interferer_gain)
          -> std::optional<std::tuple<int, int, double>> {
        AdaptConstraints c{r_min_bps, n_h_max, n_s_max, tc_s};
        SinrInputs in{own_power, own_gain, eta, sigma2, tc_s};
        auto oracle = sinr_oracle_implicit(in, k, interferer_power,
                                           interferer_gain, sinr_min);
        auto r = solve_implicit(c, oracle);
        if (!r) return std::nullopt;
        return std::make_tuple(r->n_h, r->n_s, r->rate);
      },
      py::arg("r_min_bps") = 1e3, py::arg("n_h_max") = 15, py::arg("n_s_max") = 20,
      py::arg("tc_s") = 5e-7, py::arg("k") = 0, py::arg("sinr_min") = 1.0,
      py::arg("own_power") = 1.0, py::arg("own_gain") = 1.0, py::arg("eta") = 1e-9,
      py::arg("sigma2") = 1.0, py::arg("interferer_power") = 1.0,
      py::arg("interferer_gain") = 1.0);

  py::class_<EnergyMetrics>(m, "EnergyMetrics")
      .def_readonly("e_b", &EnergyMetrics::e_b)
      .def_readonly("e_s", &EnergyMetrics::e_s);
  m.def("energy_metrics", &energy_metrics, py::arg("e_p"), py::arg("n_h"),
        py::arg("n_s"), py::arg("tc_s"));

  // ---- phy ----
  py::enum_<Scheme>(m, "Scheme")
      .value("PPM_BPSK", Scheme::kPpmBpsk)
      .value("PPM_PPM", Scheme::kPpmPpm);

  py::class_<PhyParams>(m, "PhyParams")
      .def(py::init<>())
      .def_readwrite("tc_s", &PhyParams::tc_s)
      .def_readwrite("delta_s", &PhyParams::delta_s)
      .def_readwrite("pulse_width_s", &PhyParams::pulse_width_s)
      .def_readwrite("samples_per_chip", &PhyParams::samples_per_chip);

  py::class_<HoppingPlan>(m, "HoppingPlan")
      .def_readonly("node_id", &HoppingPlan::node_id)
      .def_readonly("n_h", &HoppingPlan::n_h)
      .def_readonly("n_s", &HoppingPlan::n_s)
      .def_readonly("th", &HoppingPlan::th)
      .def_readonly("code", &HoppingPlan::code);

  m.def("derive_hopping_plan", &derive_hopping_plan, py::arg("node_id"),
        py::arg("n_h"), py::arg("n_s"), py::arg("scheme"));
  m.def(
      "modulate",
      [](const std::vector<int>& bits, const HoppingPlan& plan, const PhyParams& p) {
        return modulate(bits, plan, p);
      },
      py::arg("bits"), py::arg("plan"), py::arg("params"));

  py::class_<BerEstimate>(m, "BerEstimate")
      .def_readonly("ber", &BerEstimate::ber)
      .def_readonly("trials", &BerEstimate::trials)
      .def_readonly("half_width", &BerEstimate::half_width)
      .def_readonly("errors", &BerEstimate::errors);

  m.def(
      "estimate_ber",
      [](Scheme scheme, int n_h, int n_s, int k, long trials, std::uint64_t seed,
         double eta, double interferer_amplitude) {
        BerSimParams sim;
        sim.eta = eta;
        sim.interferer_amplitude = interferer_amplitude;
        return estimate_ber(scheme, n_h, n_s, k, trials, seed, sim);
      },
      py::arg("scheme"), py::arg("n_h"), py::arg("n_s"), py::arg("k") = 0,
      py::arg("trials") = 10000, py::arg("seed") = 1, py::arg("eta") = 2e-2,
      py::arg("interferer_amplitude") = 3.7);

  // ---- netsim ----
  py::class_<Metrics>(m, "Metrics")
      .def_readonly("duration_s", &Metrics::duration_s)
      .def("total_delivered", &Metrics::total_delivered)
      .def("total_dropped", &Metrics::total_dropped)
      .def("drop_rate", &Metrics::drop_rate)
      .def("aggregate_throughput_bps", &Metrics::aggregate_throughput_bps)
      .def("connection_throughput_bps", &Metrics::connection_throughput_bps)
      .def("mean_energy_per_bit", &Metrics::mean_energy_per_bit)
      .def("write_metrics_csv", &Metrics::write_metrics_csv)
      .def("write_trace_csv", &Metrics::write_trace_csv);

  m.def(
      "simulate_scenario",
      [](const std::string& scenario_json, const std::string& ber_table_path,
         std::uint64_t seed) {
        auto cfg = ScenarioConfig::from_json_text(scenario_json);
        if (seed != 0) cfg.seed = seed;
        auto table = BerTable::load_csv(ber_table_path);
        auto diags = cfg.validate(&table);
        if (!diags.empty()) throw std::invalid_argument(diags.front());
        auto topo = generate_topology(cfg.setting, cfg.n_pairs, cfg.seed, cfg.topology);
        return run_simulation(topo, cfg.net, table, cfg.seed);
      },
      py::arg("scenario_json"), py::arg("ber_table_path"), py::arg("seed") = 0,
      "Run a packet-level simulation from scenario JSON text.");

  m.def(
      "build_ber_table_csv",
      [](const std::string& out_path, int n_h_max, int n_s_max, int k_max,
         long trials, std::uint64_t seed) {
        auto table = build_ber_table({Scheme::kPpmBpsk, Scheme::kPpmPpm}, n_h_max,
                                     n_s_max, k_max, trials, seed);
        table.save_csv(out_path);
        return table.size();
      },
      py::arg("out_path"), py::arg("n_h_max") = 15, py::arg("n_s_max") = 20,
      py::arg("k_max") = 8, py::arg("trials") = 10000, py::arg("seed") = 1);

  // ---- wavefield ----
  m.def(
      "simulate_arm_field",
      [](double dx, double dt, int n_steps, std::pair<double, double> source,
         std::pair<double, double> sink) {
        auto geom = build_arm_geometry(dx, TissueTable::defaults());
        WaveRunConfig wc;
        wc.dt = dt > 0.0 ? dt : 0.8 * cfl_limit(geom);
        wc.n_steps = n_steps;
        wc.source = grid_pos_of(geom, source.first, source.second);
        wc.sink = grid_pos_of(geom, sink.first, sink.second);
        wc.source_waveform = dirac_like_waveform(wc.dt, n_steps);
        auto res = simulate_field(geom, wc);
        return py::make_tuple(res.sink_series, wc.dt);
      },
      py::arg("dx") = 0.0005, py::arg("dt") = 0.0, py::arg("n_steps") = 2000,
      py::arg("source") = std::pair<double, double>{0.005, 0.075},
      py::arg("sink") = std::pair<double, double>{0.195, 0.025},
      "FDTD run on the layered arm section; returns (series, dt).");
  m.def("extract_impulse_response", &extract_impulse_response, py::arg("series"),
        py::arg("dt"), py::arg("energy_fraction") = 0.999);
}
