#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uswb/adapt.hpp"
#include "uswb/medium.hpp"
#include "uswb/phy.hpp"

namespace uswb {

enum class TopologySetting { kSingleSquare, kThreeClusters };
enum class AdaptationMode { kImplicit, kExplicit, kEnergyEb, kEnergyEs };
enum class OracleKind { kBerTable, kSinr };

std::string adaptation_mode_name(AdaptationMode m);
AdaptationMode adaptation_mode_from_name(const std::string& s);

struct TopologyConfig {
  double square_side_m = 0.20;
  double cluster_side_m = 0.10;
  double cluster_spacing_m = 0.20;   // center-to-center
  double cluster_sigma_m = 0.015;    // Gaussian spread, truncated to +/- 0.04
  double cluster_truncate_m = 0.04;
  double range_single_m = 0.35;      // > square diagonal: everyone interferes
  double range_clusters_m = 0.30;    // adjacent clusters only
  double sound_speed_m_s = 1540.0;
  double gain_freq_mhz = 0.1;        // path gains evaluated here
  MediumParams medium{1580.0, 1050.0, 12.55, 1.0};  // muscle-like
};

struct Topology {
  struct Connection {
    int tx_node = 0;
    int rx_node = 0;
    int cluster = 0;  // 0/2 edge, 1 middle; 0 for the single square
  };
  std::vector<std::array<double, 2>> nodes;
  std::vector<Connection> connections;
  double range_m = 0.0;
  double sound_speed_m_s = 1540.0;
  std::vector<std::vector<int>> interferers;   // per connection
  std::vector<std::vector<double>> gain;       // gain[j][i]: tx j -> rx i
  std::vector<double> link_delay_s;            // tx -> rx per connection
  std::vector<std::vector<double>> rx_delay_s; // rx i -> rx j (control traffic)

  double node_distance(int a, int b) const;
};

// Setting 1: 18 nodes uniform in the square, up to 9 pairs, all mutually
// interfering. Setting 2: three clusters on a line; connection 0 in the
// middle cluster, later connections alternate between the edge clusters;
// only adjacent clusters interfere.
Topology generate_topology(TopologySetting setting, int n_pairs,
                           std::uint64_t seed, const TopologyConfig& cfg = {});

struct MacConfig {
  int data_bits = 1024;
  int ctrl_bits = 64;
  int ack_bits = 64;
  double backoff_min_s = 1e-3;
  double backoff_max_s = 10e-3;
  int handshake_retries = 3;  // N_R
  int data_retries = 7;       // retransmissions per packet before dropping
  double timeout_guard_s = 1e-3;
};

struct NetSimConfig {
  Scheme scheme = Scheme::kPpmBpsk;
  AdaptationMode mode = AdaptationMode::kImplicit;
  OracleKind oracle = OracleKind::kBerTable;
  AdaptConstraints constraints;  // caps, R_min, Tc
  MacConfig mac;
  double ber_max = 1e-6;
  double sinr_min = 25.0;  // SINR-form oracle threshold
  double eta = 1e-9;       // noise energy in the SINR model
  double sigma2 = 1.0;
  double tx_power = 1.0;
  double pulse_energy_j = 2.3e-11;
  double duration_s = 100.0;
  double activation_window_s = 2.0;  // random starts no later than this
  double staged_delay_s = -1.0;      // >= 0: connection i starts at base + i*delay
  double staged_base_s = 0.5;
  double metrics_window_s = 1.0;
  bool record_events = false;
};

struct Metrics {
  struct PerConnection {
    long generated = 0;
    long delivered = 0;  // acknowledged at the transmitter
    long dropped = 0;
    long duplicates = 0;
    long handshake_aborts = 0;
    long infeasible_adaptations = 0;
    double delivered_bits = 0.0;
    double energy_j = 0.0;
  };
  struct TraceEntry {
    double t = 0.0;
    int conn = 0;
    int n_h = 0;
    int n_s = 0;
  };
  struct AdaptEntry {
    double t = 0.0;
    int conn = 0;
    int k = 0;
    bool feasible = false;
    int n_h = 0;
    int n_s = 0;
    double report_bound = 0.0;  // largest report-induced lower bound on N_h
  };
  struct EventEntry {
    double t = 0.0;
    std::string kind;
    int conn = 0;
    std::string info;
  };

  double duration_s = 0.0;
  double window_s = 1.0;
  std::vector<PerConnection> conns;
  std::vector<std::vector<double>> window_bits;  // [conn][window]
  std::vector<TraceEntry> trace;
  std::vector<AdaptEntry> adapt_log;
  std::vector<EventEntry> events;

  long total_delivered() const;
  long total_dropped() const;
  double drop_rate() const;  // dropped / (dropped + delivered)
  double aggregate_throughput_bps() const;
  double connection_throughput_bps(int conn) const;
  double mean_energy_per_bit(int conn) const;
  double mean_energy_per_bit_all() const;

  void write_metrics_csv(const std::string& path) const;
  void write_trace_csv(const std::string& path) const;
  void write_events_csv(const std::string& path) const;
};

// Packet-level discrete-event simulation of the UsWB MAC: R2T/C2T handshake
// on the common control channel, ID-derived dedicated channels, per-packet
// receiver-side adaptation piggybacked on ACK/NACK, stop-and-wait ARQ with
// a retransmission budget, PER drawn from the BerTable, propagation delays
// from the topology. Deterministic for a fixed (config, seed).
Metrics run_simulation(const Topology& topology, const NetSimConfig& config,
                       const BerTable& table, std::uint64_t seed);

// run_simulation with scripted start times (staged_delay_s >= 0).
Metrics staged_activation(const Topology& topology, NetSimConfig config,
                          const BerTable& table, std::uint64_t seed,
                          double inter_activation_delay_s);

}  // namespace uswb
