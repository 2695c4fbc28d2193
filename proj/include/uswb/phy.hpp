#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "uswb/channel.hpp"
#include "uswb/rng.hpp"

namespace uswb {

enum class Scheme { kPpmBpsk, kPpmPpm };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

// Chip/pulse timing of the impulse transceiver.
//   tc_s             chip duration
//   delta_s          PPM shift of a '1' pulse (0 < delta < Tc)
//   pulse_width_s    truncated support of the pulse
//   samples_per_chip simulation sample grid (>= 8)
struct PhyParams {
  double tc_s = 5e-7;
  double delta_s = 2.5e-7;        // Tc/2
  double pulse_width_s = 1.25e-7;  // Tc/4
  int samples_per_chip = 16;

  double sample_dt() const { return tc_s / samples_per_chip; }
  double sample_rate() const { return samples_per_chip / tc_s; }
  // Width parameter: zero crossings of the pulse sit at +/- sigma_p.
  double sigma_p() const { return pulse_width_s / 8.0; }

  void validate() const;
};

// Second derivative of a Gaussian, evaluated at `t_grid` (seconds, centered
// on the pulse peak) and normalized to unit energy on that grid.
std::vector<double> pulse_waveform(const PhyParams& params,
                                   const std::vector<double>& t_grid);

// Unnormalized pulse shape (peak 1 at t = 0); zero outside the support.
double pulse_shape(const PhyParams& params, double t);

// Per-node transmission plan: time-hopping sequence and spreading code,
// both reproducible from the node id alone.
struct HoppingPlan {
  std::uint64_t node_id = 0;
  Scheme scheme = Scheme::kPpmBpsk;
  int n_h = 1;
  int n_s = 1;
  std::vector<int> th;    // chip index per chip-in-bit, in [0, N_h)
  std::vector<int> code;  // +/-1 for PPM-BPSK, 0/1 for PPM-PPM
};

HoppingPlan derive_hopping_plan(std::uint64_t node_id, int n_h, int n_s,
                                Scheme scheme);

// Baseband sample stream for a bit sequence. Bit i occupies frames
// i*N_s + j (j = 0..N_s-1) of N_h chips each; one pulse per frame in chip
// th[j], shifted by delta per the scheme's PPM rule.
std::vector<double> modulate(const std::vector<int>& bits,
                             const HoppingPlan& plan, const PhyParams& params);

// Tap-delay convolution (tap delays quantized to the sample grid, real
// projection of the complex tap gains) plus AWGN. `eta` is the one-sided
// noise energy density; per-sample variance is eta * fs / 2.
std::vector<double> apply_channel(const std::vector<double>& stream,
                                  const ChannelImpulseResponse& cir,
                                  double eta, Pcg32& rng,
                                  const PhyParams& params);

// Correlation receiver for PPM-BPSK-spread; needs the strongest tap's
// delay and (signed) gain. De-spreads sum_j a_j * (corr_delta - corr_0),
// threshold at zero.
std::vector<int> demodulate_coherent(const std::vector<double>& stream,
                                     const HoppingPlan& plan,
                                     const PhyParams& params,
                                     double strongest_tap_delay_s,
                                     double strongest_tap_gain);

// Energy detector for PPM-PPM-spread; frame synchronization only. Chip
// decision by energy in [0, delta) vs [delta, 2 delta), XOR-decoded and
// majority-voted (ties decode to 0).
std::vector<int> demodulate_noncoherent(const std::vector<double>& stream,
                                        const HoppingPlan& plan,
                                        const PhyParams& params);

// Monte Carlo channel abstraction for BER estimation: flat per-link gains
// (consistent with the SINR model), AWGN, chip-asynchronous interferers
// with uniform random offsets and per-trial random plans.
struct BerSimParams {
  PhyParams phy;
  double eta = 2e-2;                 // noise energy density
  double signal_amplitude = 1.0;     // victim pulse amplitude at the receiver
  double interferer_amplitude = 3.7; // per-interferer amplitude at the receiver
};

struct BerEstimate {
  double ber = 0.0;
  long trials = 0;
  double half_width = 0.0;  // Wilson 95% half-width
  long errors = 0;
};

BerEstimate estimate_ber(Scheme scheme, int n_h, int n_s, int k_interferers,
                         long trials, std::uint64_t rng_seed,
                         const BerSimParams& sim = BerSimParams{});

// Wilson score interval half-width at 95% for `errors` out of `trials`.
double wilson_half_width(long errors, long trials);

// Empirical BER surface keyed by (scheme, K, N_h, N_s).
class BerTable {
 public:
  struct Key {
    Scheme scheme;
    int k;
    int n_h;
    int n_s;
    bool operator<(const Key& o) const {
      return std::tie(scheme, k, n_h, n_s) < std::tie(o.scheme, o.k, o.n_h, o.n_s);
    }
  };

  void insert(const Key& key, const BerEstimate& e);
  bool has(const Key& key) const { return entries_.count(key) != 0; }
  const BerEstimate& at(const Key& key) const;
  double ber(Scheme scheme, int k, int n_h, int n_s) const;
  std::size_t size() const { return entries_.size(); }

  // True if every (n_h, n_s, k) combination up to the given maxima is present.
  bool covers(Scheme scheme, int n_h_max, int n_s_max, int k_max) const;
  // First missing key, for diagnostics.
  std::string first_gap(Scheme scheme, int n_h_max, int n_s_max, int k_max) const;

  // CSV: header scheme,K,N_h,N_s,ber,trials,ci_half_width; rows sorted by
  // key; full-precision floats (bit-exact round-trip).
  void save_csv(const std::string& path) const;
  static BerTable load_csv(const std::string& path);

  const std::map<Key, BerEstimate>& entries() const { return entries_; }

 private:
  std::map<Key, BerEstimate> entries_;
};

// Full-grid Monte Carlo sweep; points are independent and processed in a
// small thread pool with per-point derived seeds (result is identical for
// any thread count).
BerTable build_ber_table(const std::vector<Scheme>& schemes, int n_h_max,
                         int n_s_max, int k_max, long trials,
                         std::uint64_t rng_seed,
                         const BerSimParams& sim = BerSimParams{},
                         int n_threads = 0);

}  // namespace uswb
