#include <cmath>
#include <cstdio>
#include <functional>

#include "doctest.h"
#include "uswb/netsim.hpp"

using namespace uswb;

namespace {

// Synthetic BER surface under full control of the test.
BerTable make_table(int n_h_max, int n_s_max, int k_max,
                    const std::function<double(Scheme, int, int, int)>& ber_fn) {
  BerTable t;
  for (Scheme s : {Scheme::kPpmBpsk, Scheme::kPpmPpm})
    for (int k = 0; k <= k_max; ++k)
      for (int n_h = 1; n_h <= n_h_max; ++n_h)
        for (int n_s = 1; n_s <= n_s_max; ++n_s) {
          BerEstimate e;
          e.trials = 10000;
          e.ber = ber_fn(s, k, n_h, n_s);
          e.errors = static_cast<long>(e.ber * 10000);
          e.half_width = wilson_half_width(e.errors, e.trials);
          t.insert({s, k, n_h, n_s}, e);
        }
  return t;
}

BerTable zero_table() {
  return make_table(15, 20, 8, [](Scheme, int, int, int) { return 0.0; });
}

}  // namespace

TEST_CASE("single-square topology: everyone interferes, deterministic") {
  auto t1 = generate_topology(TopologySetting::kSingleSquare, 9, 77);
  auto t2 = generate_topology(TopologySetting::kSingleSquare, 9, 77);
  CHECK(t1.nodes.size() == 18);
  REQUIRE(t1.connections.size() == 9);
  for (int i = 0; i < 9; ++i)
    CHECK(t1.interferers[static_cast<std::size_t>(i)].size() == 8);
  for (std::size_t i = 0; i < t1.nodes.size(); ++i) {
    CHECK(t1.nodes[i][0] == t2.nodes[i][0]);
    CHECK(t1.nodes[i][1] == t2.nodes[i][1]);
  }
  // Delays follow distance / c.
  for (int i = 0; i < 9; ++i) {
    const auto& c = t1.connections[static_cast<std::size_t>(i)];
    CHECK(t1.link_delay_s[static_cast<std::size_t>(i)] ==
          doctest::Approx(t1.node_distance(c.tx_node, c.rx_node) / 1540.0));
  }
}

TEST_CASE("three-cluster topology: adjacent interference only") {
  auto t = generate_topology(TopologySetting::kThreeClusters, 9, 5);
  REQUIRE(t.connections.size() == 9);
  CHECK(t.connections[0].cluster == 1);  // middle
  // Interference sets are symmetric.
  for (std::size_t i = 0; i < t.connections.size(); ++i)
    for (int j : t.interferers[i]) {
      bool found = false;
      for (int b : t.interferers[static_cast<std::size_t>(j)])
        if (b == static_cast<int>(i)) found = true;
      CHECK(found);
    }
  // Edge clusters (0 and 2) never interfere with one another.
  for (std::size_t i = 0; i < t.connections.size(); ++i)
    for (int j : t.interferers[i]) {
      int ci = t.connections[i].cluster;
      int cj = t.connections[static_cast<std::size_t>(j)].cluster;
      CHECK(std::abs(ci - cj) <= 1);
    }
  // The middle connection hears every edge connection.
  CHECK(t.interferers[0].size() == 8);
}

TEST_CASE("single connection on a clean channel approaches the overhead-limited rate") {
  auto topo = generate_topology(TopologySetting::kSingleSquare, 1, 3);
  NetSimConfig cfg;
  cfg.duration_s = 20.0;
  auto table = zero_table();
  auto m = run_simulation(topo, cfg, table, 3);

  REQUIRE(m.conns.size() == 1);
  CHECK(m.total_dropped() == 0);
  CHECK(m.conns[0].delivered > 0);
  // Converged to (1, 1).
  REQUIRE(!m.trace.empty());
  CHECK(m.trace.back().n_h == 1);
  CHECK(m.trace.back().n_s == 1);
  // First trace entry is the conservative cap pair.
  CHECK(m.trace.front().n_h == 15);
  CHECK(m.trace.front().n_s == 20);

  // Expected stop-and-wait goodput at (1,1) from the configured overheads.
  double rate11 = rate_bps(1, 1, cfg.constraints.tc_s);
  double prop = topo.link_delay_s[0];
  double cycle = cfg.mac.data_bits / rate11 + cfg.mac.ack_bits / rate11 + 2.0 * prop;
  double expected = cfg.mac.data_bits / cycle;
  double got = m.aggregate_throughput_bps();
  CHECK(got > 0.85 * expected);
  CHECK(got < 1.02 * expected);
  CHECK(got < rate11);
}

TEST_CASE("conservation: generated = delivered + dropped + in flight") {
  auto topo = generate_topology(TopologySetting::kSingleSquare, 4, 9);
  NetSimConfig cfg;
  cfg.duration_s = 5.0;
  // Losses so retransmissions and drops happen.
  auto table = make_table(15, 20, 8, [](Scheme, int k, int n_h, int n_s) {
    if (k == 0) return 0.0;
    return 2e-4 * k / (0.05 * n_h * n_s);
  });
  auto m = run_simulation(topo, cfg, table, 11);
  for (const auto& c : m.conns) {
    long in_flight = c.generated - c.delivered - c.dropped;
    CHECK(in_flight >= 0);
    CHECK(in_flight <= 1);
  }
  CHECK(m.total_delivered() > 0);
}

TEST_CASE("identical seeds give byte-identical CSV outputs") {
  auto topo = generate_topology(TopologySetting::kSingleSquare, 3, 21);
  NetSimConfig cfg;
  cfg.duration_s = 3.0;
  cfg.record_events = true;
  auto table = make_table(15, 20, 8, [](Scheme, int k, int, int n_s) {
    return k > 0 && n_s < 5 ? 1e-4 * k : 0.0;
  });
  auto read_all = [](const std::string& p) {
    FILE* f = std::fopen(p.c_str(), "rb");
    REQUIRE(f != nullptr);
    std::string s;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) s.append(buf, n);
    std::fclose(f);
    return s;
  };
  std::string m1 = "nm1.csv", t1 = "nt1.csv", m2 = "nm2.csv", t2 = "nt2.csv";
  auto a = run_simulation(topo, cfg, table, 5);
  a.write_metrics_csv(m1);
  a.write_trace_csv(t1);
  auto b = run_simulation(topo, cfg, table, 5);
  b.write_metrics_csv(m2);
  b.write_trace_csv(t2);
  CHECK(read_all(m1) == read_all(m2));
  CHECK(read_all(t1) == read_all(t2));
  for (const auto& p : {m1, t1, m2, t2}) std::remove(p.c_str());
}

TEST_CASE("lossless implicit run converges all connections to a common pair") {
  auto topo = generate_topology(TopologySetting::kSingleSquare, 5, 4);
  NetSimConfig cfg;
  cfg.duration_s = 30.0;
  // Feasible only when n_h * n_s exceeds a K-dependent bound.
  auto table = make_table(15, 20, 8, [](Scheme, int k, int n_h, int n_s) {
    return n_h * n_s >= 6 * k ? 0.0 : 0.3;
  });
  auto m = staged_activation(topo, cfg, table, 9, 2.0);
  // After the transient, every connection sits on the same (N_h, N_s).
  int last_nh[5] = {0}, last_ns[5] = {0};
  for (const auto& e : m.trace) {
    last_nh[e.conn] = e.n_h;
    last_ns[e.conn] = e.n_s;
  }
  for (int c = 1; c < 5; ++c) {
    CHECK(last_nh[c] == last_nh[0]);
    CHECK(last_ns[c] == last_ns[0]);
  }
  // The common pair is rate-optimal for K = 4: smallest product >= 24.
  CHECK(last_nh[0] * last_ns[0] == 24);
  CHECK(m.total_dropped() == 0);
}

TEST_CASE("explicit mode on three clusters honors the report bounds") {
  auto topo = generate_topology(TopologySetting::kThreeClusters, 5, 31);
  NetSimConfig cfg;
  cfg.mode = AdaptationMode::kExplicit;
  cfg.oracle = OracleKind::kSinr;
  cfg.sinr_min = 20.0;
  cfg.duration_s = 30.0;
  auto table = zero_table();
  auto m = staged_activation(topo, cfg, table, 8, 3.0);
  REQUIRE(!m.adapt_log.empty());
  int checked = 0;
  for (const auto& e : m.adapt_log) {
    if (!e.feasible || e.report_bound <= 0.0) continue;
    CHECK(e.n_h >= static_cast<int>(std::ceil(e.report_bound - 1e-9)));
    ++checked;
  }
  CHECK(checked > 0);
  // After every connection is active, the middle connection runs below the
  // per-connection edge average (it hears both edge clusters).
  double t_full = cfg.staged_base_s + 4 * 3.0 + 2.0;
  auto steady_bits = [&](int c) {
    double bits = 0.0;
    for (std::size_t w = 0; w < m.window_bits[static_cast<std::size_t>(c)].size(); ++w) {
      double wt = (static_cast<double>(w) + 1.0) * m.window_s;
      if (wt > t_full) bits += m.window_bits[static_cast<std::size_t>(c)][w];
    }
    return bits;
  };
  double mid = steady_bits(0);
  double edge_sum = 0.0;
  int edges = 0;
  for (std::size_t c = 1; c < topo.connections.size(); ++c) {
    edge_sum += steady_bits(static_cast<int>(c));
    ++edges;
  }
  CHECK(mid < edge_sum / edges);
}

TEST_CASE("energy modes never use more E_b than the rate maximizer") {
  auto topo = generate_topology(TopologySetting::kSingleSquare, 4, 15);
  auto table = make_table(15, 20, 8, [](Scheme, int k, int n_h, int n_s) {
    return n_h * n_s >= 8 * k ? 0.0 : 0.2;
  });
  NetSimConfig rate_cfg;
  rate_cfg.duration_s = 20.0;
  auto m_rate = run_simulation(topo, rate_cfg, table, 2);
  NetSimConfig eb_cfg = rate_cfg;
  eb_cfg.mode = AdaptationMode::kEnergyEb;
  auto m_eb = run_simulation(topo, eb_cfg, table, 2);
  CHECK(m_eb.mean_energy_per_bit_all() <= m_rate.mean_energy_per_bit_all() * 1.0001);
  CHECK(m_eb.total_delivered() > 0);
}

TEST_CASE("dead control channel: aborted handshakes are counted, no data flows") {
  auto topo = generate_topology(TopologySetting::kSingleSquare, 2, 12);
  NetSimConfig cfg;
  cfg.duration_s = 2.0;
  // Control packets at the caps pair always fail once an interferer exists;
  // with two connections each blocks the other's handshake forever.
  auto table = make_table(15, 20, 8, [](Scheme, int k, int n_h, int n_s) {
    return k >= 1 && n_h == 15 && n_s == 20 ? 0.5 : 0.0;
  });
  auto m = run_simulation(topo, cfg, table, 19);
  long aborts = 0;
  for (const auto& c : m.conns) aborts += c.handshake_aborts;
  CHECK(aborts > 0);
}

TEST_CASE("missing table coverage is a configuration error") {
  auto topo = generate_topology(TopologySetting::kSingleSquare, 9, 1);
  NetSimConfig cfg;
  auto table = make_table(15, 20, 3, [](Scheme, int, int, int) { return 0.0; });
  CHECK_THROWS_WITH_AS(run_simulation(topo, cfg, table, 1),
                       doctest::Contains("BerTable"), std::invalid_argument);
}

TEST_CASE("throughput never exceeds the current pair's rate") {
  auto topo = generate_topology(TopologySetting::kSingleSquare, 2, 8);
  NetSimConfig cfg;
  cfg.duration_s = 10.0;
  auto table = zero_table();
  auto m = run_simulation(topo, cfg, table, 44);
  double max_rate = rate_bps(1, 1, cfg.constraints.tc_s);
  for (std::size_t c = 0; c < m.window_bits.size(); ++c)
    for (double bits : m.window_bits[c])
      CHECK(bits / m.window_s <= max_rate);
}

TEST_CASE("empty run produces zero metrics") {
  Metrics m;
  m.duration_s = 10.0;
  CHECK(m.total_delivered() == 0);
  CHECK(m.drop_rate() == 0.0);
  CHECK(m.aggregate_throughput_bps() == 0.0);
}
