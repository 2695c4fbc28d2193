#include "uswb/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "uswb/channel.hpp"
#include "uswb/csv.hpp"
#include "uswb/rng.hpp"

namespace uswb {

std::string adaptation_mode_name(AdaptationMode m) {
  switch (m) {
    case AdaptationMode::kImplicit: return "implicit";
    case AdaptationMode::kExplicit: return "explicit";
    case AdaptationMode::kEnergyEb: return "energy-eb";
    case AdaptationMode::kEnergyEs: return "energy-es";
  }
  return "?";
}

AdaptationMode adaptation_mode_from_name(const std::string& s) {
  if (s == "implicit") return AdaptationMode::kImplicit;
  if (s == "explicit") return AdaptationMode::kExplicit;
  if (s == "energy-eb") return AdaptationMode::kEnergyEb;
  if (s == "energy-es") return AdaptationMode::kEnergyEs;
  throw std::invalid_argument("unknown adaptation mode '" + s + "'");
}

double Topology::node_distance(int a, int b) const {
  double dx = nodes[static_cast<std::size_t>(a)][0] - nodes[static_cast<std::size_t>(b)][0];
  double dy = nodes[static_cast<std::size_t>(a)][1] - nodes[static_cast<std::size_t>(b)][1];
  return std::sqrt(dx * dx + dy * dy);
}

namespace {

double truncated_gaussian(Pcg32& rng, double sigma, double bound) {
  for (;;) {
    double v = rng.gaussian() * sigma;
    if (std::abs(v) < bound) return v;
  }
}

}  // namespace

Topology generate_topology(TopologySetting setting, int n_pairs,
                           std::uint64_t seed, const TopologyConfig& cfg) {
  if (n_pairs < 1) throw std::invalid_argument("generate_topology: n_pairs must be >= 1");
  Topology t;
  t.sound_speed_m_s = cfg.sound_speed_m_s;
  Pcg32 rng(derive_seed(seed, "topology"));

  if (setting == TopologySetting::kSingleSquare) {
    if (n_pairs > 9)
      throw std::invalid_argument("generate_topology: the single square holds at most 9 pairs");
    t.range_m = cfg.range_single_m;
    // 18 static nodes regardless of how many pairs communicate.
    for (int n = 0; n < 18; ++n)
      t.nodes.push_back({rng.next_double() * cfg.square_side_m,
                         rng.next_double() * cfg.square_side_m});
    for (int p = 0; p < n_pairs; ++p)
      t.connections.push_back({2 * p, 2 * p + 1, 0});
  } else {
    t.range_m = cfg.range_clusters_m;
    // Clusters 0 and 2 at the edges, 1 in the middle. Connection 0 lives in
    // the middle; later connections alternate 0, 2, 0, 2, ...
    auto place = [&](int cluster) {
      double cx = cluster * cfg.cluster_spacing_m;
      t.nodes.push_back({cx + truncated_gaussian(rng, cfg.cluster_sigma_m, cfg.cluster_truncate_m),
                         truncated_gaussian(rng, cfg.cluster_sigma_m, cfg.cluster_truncate_m)});
      return static_cast<int>(t.nodes.size()) - 1;
    };
    for (int p = 0; p < n_pairs; ++p) {
      int cluster = p == 0 ? 1 : (p % 2 == 1 ? 0 : 2);
      int tx = place(cluster);
      int rx = place(cluster);
      t.connections.push_back({tx, rx, cluster});
    }
  }

  int n = static_cast<int>(t.connections.size());
  t.interferers.assign(static_cast<std::size_t>(n), {});
  t.gain.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  t.link_delay_s.resize(static_cast<std::size_t>(n));
  t.rx_delay_s.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    const auto& ci = t.connections[static_cast<std::size_t>(i)];
    t.link_delay_s[static_cast<std::size_t>(i)] =
        t.node_distance(ci.tx_node, ci.rx_node) / cfg.sound_speed_m_s;
    for (int j = 0; j < n; ++j) {
      const auto& cj = t.connections[static_cast<std::size_t>(j)];
      double d = t.node_distance(cj.tx_node, ci.rx_node);
      t.gain[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          path_gain(std::max(d, 1e-4), cfg.gain_freq_mhz, cfg.medium);
      t.rx_delay_s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          t.node_distance(ci.rx_node, cj.rx_node) / cfg.sound_speed_m_s;
    }
  }
  // Symmetric interference sets: connections interfere when either cross
  // transmitter-receiver distance is inside the range.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& ci = t.connections[static_cast<std::size_t>(i)];
      const auto& cj = t.connections[static_cast<std::size_t>(j)];
      bool hit = t.node_distance(cj.tx_node, ci.rx_node) < t.range_m ||
                 t.node_distance(ci.tx_node, cj.rx_node) < t.range_m;
      if (hit) t.interferers[static_cast<std::size_t>(i)].push_back(j);
    }
  return t;
}

long Metrics::total_delivered() const {
  long s = 0;
  for (const auto& c : conns) s += c.delivered;
  return s;
}

long Metrics::total_dropped() const {
  long s = 0;
  for (const auto& c : conns) s += c.dropped;
  return s;
}

double Metrics::drop_rate() const {
  long del = total_delivered(), drop = total_dropped();
  if (del + drop == 0) return 0.0;
  return static_cast<double>(drop) / static_cast<double>(del + drop);
}

double Metrics::aggregate_throughput_bps() const {
  double bits = 0.0;
  for (const auto& c : conns) bits += c.delivered_bits;
  return duration_s > 0.0 ? bits / duration_s : 0.0;
}

double Metrics::connection_throughput_bps(int conn) const {
  return duration_s > 0.0
             ? conns[static_cast<std::size_t>(conn)].delivered_bits / duration_s
             : 0.0;
}

double Metrics::mean_energy_per_bit(int conn) const {
  const auto& c = conns[static_cast<std::size_t>(conn)];
  return c.delivered_bits > 0.0 ? c.energy_j / c.delivered_bits : 0.0;
}

double Metrics::mean_energy_per_bit_all() const {
  double e = 0.0, b = 0.0;
  for (const auto& c : conns) {
    e += c.energy_j;
    b += c.delivered_bits;
  }
  return b > 0.0 ? e / b : 0.0;
}

void Metrics::write_metrics_csv(const std::string& path) const {
  auto f = open_output(path);
  f << "t,connection,throughput_bps\n";
  for (std::size_t c = 0; c < window_bits.size(); ++c)
    for (std::size_t w = 0; w < window_bits[c].size(); ++w)
      f << format_double((static_cast<double>(w) + 1.0) * window_s) << ','
        << c << ',' << format_double(window_bits[c][w] / window_s) << '\n';
}

void Metrics::write_trace_csv(const std::string& path) const {
  auto f = open_output(path);
  f << "t,connection,N_h,N_s\n";
  for (const auto& e : trace)
    f << format_double(e.t) << ',' << e.conn << ',' << e.n_h << ',' << e.n_s << '\n';
}

void Metrics::write_events_csv(const std::string& path) const {
  auto f = open_output(path);
  f << "t,kind,connection,info\n";
  for (const auto& e : events)
    f << format_double(e.t) << ',' << e.kind << ',' << e.conn << ',' << e.info << '\n';
}

namespace {

enum class Ev {
  kActivate,
  kR2tArrive,
  kC2tArrive,
  kHsTimeout,
  kDataArrive,
  kAckArrive,
  kAckTimeout,
  kReportArrive,
};

struct Event {
  double t = 0.0;
  long id = 0;  // deterministic tie-break
  Ev kind = Ev::kActivate;
  int conn = 0;
  long epoch = 0;
  long seq = 0;
  int attempt = 0;
  int n_h = 0;  // pair carried by the packet
  int n_s = 0;
  bool flag = false;  // ACK (true) vs NACK
  int src_conn = 0;   // report origin
  double g = 0.0;     // report gamma
  double d = 0.0;     // report delta (total)
};

struct EventCmp {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.id > b.id;
  }
};

struct Report {
  bool valid = false;
  double gamma = 0.0;
  double delta_total = 0.0;  // includes the listener's own contribution
  int n_h = 0;
};

struct ConnState {
  enum class S { kIdle, kAwaitC2t, kConnected } s = S::kIdle;
  bool active = false;
  int hs_attempt = 0;
  long epoch = 0;
  long seq = 0;
  int attempt = 0;
  bool waiting_ack = false;
  bool in_service = false;  // current seq counted in `generated`
  int n_h = 0, n_s = 0;     // adapted pair in force at the transmitter
  int tx_n_h = 0, tx_n_s = 0;  // pair of the outstanding transmission
  long last_delivered_seq = -1;
  std::vector<Report> reports;  // latest report heard from each connection's rx
};

class Simulator {
 public:
  Simulator(const Topology& topo, const NetSimConfig& cfg, const BerTable& table,
            std::uint64_t seed)
      : topo_(topo), cfg_(cfg), table_(table), rng_(derive_seed(seed, "netsim")) {
    n_ = static_cast<int>(topo.connections.size());
    if (n_ == 0) throw std::invalid_argument("run_simulation: empty topology");
    int k_max = 0;
    for (const auto& s : topo_.interferers)
      k_max = std::max(k_max, static_cast<int>(s.size()));
    std::string gap = table_.first_gap(cfg_.scheme, cfg_.constraints.n_h_max,
                                       cfg_.constraints.n_s_max, k_max);
    if (!gap.empty())
      throw std::invalid_argument("run_simulation: BerTable does not cover the "
                                  "configured grid, first gap " + gap);
    if (cfg_.mode == AdaptationMode::kExplicit && cfg_.oracle != OracleKind::kSinr)
      throw std::invalid_argument("run_simulation: explicit mode requires the "
                                  "SINR oracle (reports carry SINR terms)");
    state_.assign(static_cast<std::size_t>(n_), ConnState{});
    for (auto& st : state_) {
      st.n_h = cfg_.constraints.n_h_max;
      st.n_s = cfg_.constraints.n_s_max;
      st.reports.assign(static_cast<std::size_t>(n_), Report{});
    }
    metrics_.duration_s = cfg_.duration_s;
    metrics_.window_s = cfg_.metrics_window_s;
    metrics_.conns.assign(static_cast<std::size_t>(n_), {});
    std::size_t n_windows = static_cast<std::size_t>(
        std::ceil(cfg_.duration_s / cfg_.metrics_window_s));
    metrics_.window_bits.assign(static_cast<std::size_t>(n_),
                                std::vector<double>(n_windows, 0.0));
  }

  Metrics run() {
    for (int c = 0; c < n_; ++c) {
      double t0;
      if (cfg_.staged_delay_s >= 0.0)
        t0 = cfg_.staged_base_s + c * cfg_.staged_delay_s;
      else
        t0 = rng_.next_double() * cfg_.activation_window_s;
      schedule(t0, Ev::kActivate, c);
    }
    while (!queue_.empty()) {
      Event e = queue_.top();
      queue_.pop();
      if (e.t > cfg_.duration_s) break;
      dispatch(e);
    }
    return std::move(metrics_);
  }

 private:
  // --- scheduling helpers ---
  void schedule(double t, Ev kind, int conn, Event tmpl = {}) {
    tmpl.t = t;
    tmpl.id = next_id_++;
    tmpl.kind = kind;
    tmpl.conn = conn;
    queue_.push(tmpl);
  }

  double rate(int n_h, int n_s) const { return rate_bps(n_h, n_s, cfg_.constraints.tc_s); }

  double ctrl_tx_time() const {
    return cfg_.mac.ctrl_bits / rate(cfg_.constraints.n_h_max, cfg_.constraints.n_s_max);
  }

  double per(int k, int n_h, int n_s, int bits) const {
    double ber = table_.ber(cfg_.scheme, k, n_h, n_s);
    if (ber <= 0.0) return 0.0;
    return 1.0 - std::pow(1.0 - ber, bits);
  }

  int interferer_count(int conn) const {
    int k = 0;
    for (int j : topo_.interferers[static_cast<std::size_t>(conn)])
      if (state_[static_cast<std::size_t>(j)].s == ConnState::S::kConnected) ++k;
    return k;
  }

  void log_event(double t, const char* kind, int conn, std::string info = "") {
    if (cfg_.record_events) metrics_.events.push_back({t, kind, conn, std::move(info)});
  }

  void add_energy(int conn, int bits, int n_s) {
    metrics_.conns[static_cast<std::size_t>(conn)].energy_j +=
        static_cast<double>(bits) * n_s * cfg_.pulse_energy_j;
  }

  // --- adaptation ---
  struct Decision {
    bool feasible = false;
    int n_h = 0;
    int n_s = 0;
    double report_bound = 0.0;
  };

  Decision adapt(int conn, double t) {
    int k = interferer_count(conn);
    Decision dec;
    std::vector<InterferenceReport> reports;
    double bound = 0.0;

    FeasibilityOracle oracle;
    if (cfg_.oracle == OracleKind::kBerTable) {
      oracle = [this, k](int n_h, int n_s) {
        return table_.ber(cfg_.scheme, k, n_h, n_s) <= cfg_.ber_max;
      };
    } else {
      // Own SINR with interferers at their currently adopted pairs; in
      // implicit modes the peers are assumed to mirror the candidate pair.
      std::vector<int> active;
      for (int j : topo_.interferers[static_cast<std::size_t>(conn)])
        if (state_[static_cast<std::size_t>(j)].s == ConnState::S::kConnected)
          active.push_back(j);
      bool mirror = cfg_.mode == AdaptationMode::kImplicit;
      oracle = [this, conn, active, mirror](int n_h, int n_s) {
        SinrInputs in;
        in.own_power = cfg_.tx_power;
        in.own_gain = topo_.gain[static_cast<std::size_t>(conn)][static_cast<std::size_t>(conn)];
        in.eta = cfg_.eta;
        in.sigma2 = cfg_.sigma2;
        in.tc_s = cfg_.constraints.tc_s;
        std::vector<LinkConfig> peers;
        for (int j : active) {
          const auto& sj = state_[static_cast<std::size_t>(j)];
          peers.push_back({j, mirror ? n_h : sj.n_h, mirror ? n_s : sj.n_s,
                           cfg_.tx_power,
                           topo_.gain[static_cast<std::size_t>(j)][static_cast<std::size_t>(conn)]});
        }
        if (in.eta <= 0.0 && peers.empty()) return true;
        return sinr(n_h, n_s, in, peers) >= cfg_.sinr_min;
      };
    }

    if (cfg_.mode == AdaptationMode::kExplicit) {
      const auto& st = state_[static_cast<std::size_t>(conn)];
      for (int j : topo_.interferers[static_cast<std::size_t>(conn)]) {
        const auto& rep = st.reports[static_cast<std::size_t>(j)];
        if (!rep.valid) continue;
        InterferenceReport r;
        r.gamma = rep.gamma;
        // epsilon_i: interference this transmitter inflicts on receiver i.
        r.epsilon = cfg_.sigma2 * cfg_.constraints.tc_s * cfg_.tx_power *
                    topo_.gain[static_cast<std::size_t>(conn)][static_cast<std::size_t>(j)] *
                    rep.n_h;
        // The broadcast delta includes our own current contribution; remove it.
        r.delta = std::max(0.0, rep.delta_total -
                                    r.epsilon / std::max(1, state_[static_cast<std::size_t>(conn)].n_h));
        reports.push_back(r);
        double b = report_min_frame_length(r, cfg_.sinr_min, cfg_.eta);
        bound = std::max(bound, b);
      }
    }

    std::optional<SolveResult> res;
    switch (cfg_.mode) {
      case AdaptationMode::kImplicit:
        res = solve_implicit(cfg_.constraints, oracle);
        break;
      case AdaptationMode::kExplicit:
        res = solve_explicit(cfg_.constraints, oracle, reports, cfg_.sinr_min, cfg_.eta);
        break;
      case AdaptationMode::kEnergyEb:
      case AdaptationMode::kEnergyEs:
        res = solve_energy_min(cfg_.mode == AdaptationMode::kEnergyEb
                                   ? EnergyObjective::kEnergyPerBit
                                   : EnergyObjective::kEnergyPerSecond,
                               cfg_.pulse_energy_j, cfg_.constraints, oracle,
                               reports, cfg_.sinr_min, cfg_.eta);
        break;
    }
    if (res.has_value()) {
      dec.feasible = true;
      dec.n_h = res->n_h;
      dec.n_s = res->n_s;
    } else if (cfg_.mode == AdaptationMode::kExplicit) {
      // A transiently impossible report bound (a neighbor is itself above
      // its SINR budget until it re-adapts) has no satisfiable answer; hold
      // the current operating point and wait for fresh reports.
      dec.feasible = false;
      dec.n_h = state_[static_cast<std::size_t>(conn)].n_h;
      dec.n_s = state_[static_cast<std::size_t>(conn)].n_s;
      metrics_.conns[static_cast<std::size_t>(conn)].infeasible_adaptations++;
    } else {
      // No feasible operating point: fall back to the most robust pair and
      // keep going; the packet error process records the consequences.
      dec.feasible = false;
      dec.n_h = cfg_.constraints.n_h_max;
      dec.n_s = cfg_.constraints.n_s_max;
      metrics_.conns[static_cast<std::size_t>(conn)].infeasible_adaptations++;
    }
    dec.report_bound = std::isfinite(bound) ? bound : -1.0;
    metrics_.adapt_log.push_back({t, conn, k, dec.feasible, dec.n_h, dec.n_s,
                                  dec.report_bound});
    return dec;
  }

  void broadcast_report(int conn, double t) {
    // Receiver `conn` shares its tolerable-interference terms on the common
    // channel; every interfering receiver that hears it stores the latest.
    const auto& st = state_[static_cast<std::size_t>(conn)];
    double gamma = cfg_.tx_power *
                   topo_.gain[static_cast<std::size_t>(conn)][static_cast<std::size_t>(conn)] *
                   cfg_.constraints.tc_s * st.n_h * st.n_s;
    double delta_total = 0.0;
    for (int j : topo_.interferers[static_cast<std::size_t>(conn)]) {
      const auto& sj = state_[static_cast<std::size_t>(j)];
      if (sj.s != ConnState::S::kConnected) continue;
      delta_total += cfg_.sigma2 * cfg_.constraints.tc_s * cfg_.tx_power *
                     topo_.gain[static_cast<std::size_t>(j)][static_cast<std::size_t>(conn)] *
                     st.n_h / std::max(1, sj.n_h);
    }
    for (int j : topo_.interferers[static_cast<std::size_t>(conn)]) {
      Event tmpl;
      tmpl.src_conn = conn;
      tmpl.g = gamma;
      tmpl.d = delta_total;
      tmpl.n_h = st.n_h;
      schedule(t + ctrl_tx_time() +
                   topo_.rx_delay_s[static_cast<std::size_t>(conn)][static_cast<std::size_t>(j)],
               Ev::kReportArrive, j, tmpl);
    }
    add_energy(conn, cfg_.mac.ctrl_bits, cfg_.constraints.n_s_max);
  }

  // --- MAC actions ---
  void start_handshake(int conn, double t) {
    auto& st = state_[static_cast<std::size_t>(conn)];
    st.s = ConnState::S::kAwaitC2t;
    send_r2t(conn, t);
  }

  void send_r2t(int conn, double t) {
    auto& st = state_[static_cast<std::size_t>(conn)];
    ++st.epoch;
    double tt = ctrl_tx_time();
    double prop = topo_.link_delay_s[static_cast<std::size_t>(conn)];
    Event tmpl;
    tmpl.epoch = st.epoch;
    schedule(t + tt + prop, Ev::kR2tArrive, conn, tmpl);
    schedule(t + 2.0 * (tt + prop) + cfg_.mac.timeout_guard_s, Ev::kHsTimeout, conn, tmpl);
    add_energy(conn, cfg_.mac.ctrl_bits, cfg_.constraints.n_s_max);
    log_event(t, "r2t", conn);
  }

  void send_data(int conn, double t) {
    auto& st = state_[static_cast<std::size_t>(conn)];
    ++st.epoch;
    st.waiting_ack = true;
    if (!st.in_service) {
      st.in_service = true;
      metrics_.conns[static_cast<std::size_t>(conn)].generated++;
    }
    // After two consecutive failed attempts the transmitter falls back to
    // the maximum frame and code length, mirroring the conservative rule
    // used at connection opening; otherwise persistent errors at an
    // aggressive pair would also destroy the ACK/NACK feedback that could
    // fix it. The pair in use rides in the packet header.
    st.tx_n_h = st.attempt >= 3 ? cfg_.constraints.n_h_max : st.n_h;
    st.tx_n_s = st.attempt >= 3 ? cfg_.constraints.n_s_max : st.n_s;
    double tt = cfg_.mac.data_bits / rate(st.tx_n_h, st.tx_n_s);
    double prop = topo_.link_delay_s[static_cast<std::size_t>(conn)];
    double ack_tt = cfg_.mac.ack_bits / rate(st.tx_n_h, st.tx_n_s);
    Event tmpl;
    tmpl.epoch = st.epoch;
    tmpl.seq = st.seq;
    tmpl.attempt = st.attempt;
    tmpl.n_h = st.tx_n_h;
    tmpl.n_s = st.tx_n_s;
    schedule(t + tt + prop, Ev::kDataArrive, conn, tmpl);
    schedule(t + tt + 2.0 * prop + ack_tt + cfg_.mac.timeout_guard_s,
             Ev::kAckTimeout, conn, tmpl);
    add_energy(conn, cfg_.mac.data_bits, st.tx_n_s);
    log_event(t, "data", conn,
              "seq=" + std::to_string(st.seq) + " attempt=" + std::to_string(st.attempt));
  }

  void give_up_packet(int conn, double t) {
    auto& st = state_[static_cast<std::size_t>(conn)];
    metrics_.conns[static_cast<std::size_t>(conn)].dropped++;
    log_event(t, "drop", conn, "seq=" + std::to_string(st.seq));
    st.seq++;
    st.attempt = 1;
    st.in_service = false;
    send_data(conn, t);
  }

  // --- event dispatch ---
  void dispatch(const Event& e) {
    auto& st = state_[static_cast<std::size_t>(e.conn)];
    switch (e.kind) {
      case Ev::kActivate: {
        if (st.s != ConnState::S::kIdle) break;
        st.active = true;
        st.hs_attempt = 1;
        start_handshake(e.conn, e.t);
        break;
      }
      case Ev::kR2tArrive: {
        if (st.s != ConnState::S::kAwaitC2t || e.epoch != st.epoch) break;
        int k = interferer_count(e.conn);
        double loss = per(k, cfg_.constraints.n_h_max, cfg_.constraints.n_s_max,
                          cfg_.mac.ctrl_bits);
        if (rng_.next_double() < loss) break;  // R2T corrupted
        // Receiver answers C2T on the common channel.
        double tt = ctrl_tx_time();
        double prop = topo_.link_delay_s[static_cast<std::size_t>(e.conn)];
        Event tmpl;
        tmpl.epoch = e.epoch;
        schedule(e.t + tt + prop, Ev::kC2tArrive, e.conn, tmpl);
        add_energy(e.conn, cfg_.mac.ctrl_bits, cfg_.constraints.n_s_max);
        break;
      }
      case Ev::kC2tArrive: {
        if (st.s != ConnState::S::kAwaitC2t || e.epoch != st.epoch) break;
        int k = interferer_count(e.conn);
        double loss = per(k, cfg_.constraints.n_h_max, cfg_.constraints.n_s_max,
                          cfg_.mac.ctrl_bits);
        if (rng_.next_double() < loss) break;  // C2T corrupted
        st.s = ConnState::S::kConnected;
        ++st.epoch;  // cancel the handshake timeout
        // First packet conservatively at the maximum frame and code length.
        st.n_h = cfg_.constraints.n_h_max;
        st.n_s = cfg_.constraints.n_s_max;
        st.seq = 0;
        st.attempt = 1;
        metrics_.trace.push_back({e.t, e.conn, st.n_h, st.n_s});
        log_event(e.t, "connected", e.conn);
        send_data(e.conn, e.t);
        break;
      }
      case Ev::kHsTimeout: {
        if (st.s != ConnState::S::kAwaitC2t || e.epoch != st.epoch) break;
        st.hs_attempt++;
        double backoff = rng_.uniform(cfg_.mac.backoff_min_s, cfg_.mac.backoff_max_s);
        if (st.hs_attempt > cfg_.mac.handshake_retries) {
          // Abort, return to idle, count the failed attempt; with an
          // infinite backlog the node tries again after a fresh backoff.
          st.s = ConnState::S::kIdle;
          metrics_.conns[static_cast<std::size_t>(e.conn)].handshake_aborts++;
          log_event(e.t, "hs-abort", e.conn);
          schedule(e.t + backoff, Ev::kActivate, e.conn);
        } else {
          send_r2t(e.conn, e.t + backoff);
        }
        break;
      }
      case Ev::kDataArrive: {
        if (st.s != ConnState::S::kConnected) break;
        int k = interferer_count(e.conn);
        Decision dec = adapt(e.conn, e.t);
        double loss = per(k, e.n_h, e.n_s, cfg_.mac.data_bits);
        bool ok = rng_.next_double() >= loss;
        bool duplicate = ok && e.seq <= st.last_delivered_seq;
        if (ok && !duplicate) st.last_delivered_seq = e.seq;
        if (duplicate) metrics_.conns[static_cast<std::size_t>(e.conn)].duplicates++;
        if (cfg_.mode == AdaptationMode::kExplicit) broadcast_report(e.conn, e.t);
        // ACK/NACK piggybacks the commanded pair, sent at the pair of the
        // data packet it answers.
        double ack_tt = cfg_.mac.ack_bits / rate(e.n_h, e.n_s);
        double prop = topo_.link_delay_s[static_cast<std::size_t>(e.conn)];
        Event tmpl;
        tmpl.epoch = e.epoch;
        tmpl.seq = e.seq;
        tmpl.attempt = e.attempt;
        tmpl.n_h = dec.n_h;
        tmpl.n_s = dec.n_s;
        tmpl.flag = ok;
        schedule(e.t + ack_tt + prop, Ev::kAckArrive, e.conn, tmpl);
        add_energy(e.conn, cfg_.mac.ack_bits, e.n_s);
        break;
      }
      case Ev::kAckArrive: {
        if (st.s != ConnState::S::kConnected || !st.waiting_ack) break;
        if (e.epoch != st.epoch || e.seq != st.seq) break;
        int k = interferer_count(e.conn);
        double loss = per(k, st.tx_n_h, st.tx_n_s, cfg_.mac.ack_bits);
        if (rng_.next_double() < loss) break;  // ACK corrupted; timeout handles it
        ++st.epoch;  // cancel the pending timeout
        st.waiting_ack = false;
        // Adopt the piggybacked pair for the next transmission.
        if (e.n_h != st.n_h || e.n_s != st.n_s) {
          st.n_h = e.n_h;
          st.n_s = e.n_s;
          metrics_.trace.push_back({e.t, e.conn, st.n_h, st.n_s});
        }
        if (e.flag) {
          auto& m = metrics_.conns[static_cast<std::size_t>(e.conn)];
          m.delivered++;
          m.delivered_bits += cfg_.mac.data_bits;
          std::size_t w = static_cast<std::size_t>(e.t / cfg_.metrics_window_s);
          if (w < metrics_.window_bits[static_cast<std::size_t>(e.conn)].size())
            metrics_.window_bits[static_cast<std::size_t>(e.conn)][w] += cfg_.mac.data_bits;
          st.seq++;
          st.attempt = 1;
          st.in_service = false;
          send_data(e.conn, e.t);
        } else {
          st.attempt++;
          if (st.attempt > cfg_.mac.data_retries + 1)
            give_up_packet(e.conn, e.t);
          else
            send_data(e.conn, e.t);
        }
        break;
      }
      case Ev::kAckTimeout: {
        if (st.s != ConnState::S::kConnected || !st.waiting_ack) break;
        if (e.epoch != st.epoch) break;
        st.attempt++;
        if (st.attempt > cfg_.mac.data_retries + 1)
          give_up_packet(e.conn, e.t);
        else
          send_data(e.conn, e.t);
        break;
      }
      case Ev::kReportArrive: {
        // Loss on the common channel at the listener.
        int k = interferer_count(e.conn);
        double loss = per(k, cfg_.constraints.n_h_max, cfg_.constraints.n_s_max,
                          cfg_.mac.ctrl_bits);
        if (rng_.next_double() < loss) break;
        auto& rep = st.reports[static_cast<std::size_t>(e.src_conn)];
        rep.valid = true;
        rep.gamma = e.g;
        rep.delta_total = e.d;
        rep.n_h = e.n_h;
        break;
      }
    }
  }

  const Topology& topo_;
  NetSimConfig cfg_;
  const BerTable& table_;
  Pcg32 rng_;
  int n_ = 0;
  long next_id_ = 0;
  std::vector<ConnState> state_;
  std::priority_queue<Event, std::vector<Event>, EventCmp> queue_;
  Metrics metrics_;
};

}  // namespace

Metrics run_simulation(const Topology& topology, const NetSimConfig& config,
                       const BerTable& table, std::uint64_t seed) {
  Simulator sim(topology, config, table, seed);
  return sim.run();
}

Metrics staged_activation(const Topology& topology, NetSimConfig config,
                          const BerTable& table, std::uint64_t seed,
                          double inter_activation_delay_s) {
  if (inter_activation_delay_s < 0.0)
    throw std::invalid_argument("staged_activation: delay must be >= 0");
  config.staged_delay_s = inter_activation_delay_s;
  return run_simulation(topology, config, table, seed);
}

}  // namespace uswb
