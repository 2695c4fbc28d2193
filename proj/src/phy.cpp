#include "uswb/phy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "uswb/csv.hpp"

namespace uswb {

std::string scheme_name(Scheme s) {
  return s == Scheme::kPpmBpsk ? "ppm-bpsk" : "ppm-ppm";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "ppm-bpsk") return Scheme::kPpmBpsk;
  if (name == "ppm-ppm") return Scheme::kPpmPpm;
  throw std::invalid_argument("unknown scheme '" + name +
                              "' (expected ppm-bpsk or ppm-ppm)");
}

void PhyParams::validate() const {
  if (!(tc_s > 0.0)) throw std::invalid_argument("PhyParams: Tc must be > 0");
  if (!(delta_s > 0.0) || !(delta_s < tc_s))
    throw std::invalid_argument("PhyParams: need 0 < delta < Tc");
  if (!(pulse_width_s > 0.0))
    throw std::invalid_argument("PhyParams: pulse_width must be > 0");
  if (delta_s + pulse_width_s > tc_s)
    throw std::invalid_argument("PhyParams: a shifted pulse must fit in its chip "
                                "(delta + pulse_width <= Tc)");
  if (2.0 * delta_s > tc_s + 1e-12 * tc_s)
    throw std::invalid_argument("PhyParams: PPM windows must fit in the chip "
                                "(2 delta <= Tc)");
  if (pulse_width_s > delta_s)
    throw std::invalid_argument("PhyParams: pulse_width must not exceed delta");
  if (samples_per_chip < 8)
    throw std::invalid_argument("PhyParams: samples_per_chip must be >= 8");
}

double pulse_shape(const PhyParams& params, double t) {
  double half = 0.5 * params.pulse_width_s;
  if (t < -half || t > half) return 0.0;
  double s2 = params.sigma_p() * params.sigma_p();
  return (1.0 - t * t / s2) * std::exp(-t * t / (2.0 * s2));
}

std::vector<double> pulse_waveform(const PhyParams& params,
                                   const std::vector<double>& t_grid) {
  params.validate();
  if (t_grid.size() < 2)
    throw std::invalid_argument("pulse_waveform: need at least 2 grid points");
  double dt = t_grid[1] - t_grid[0];
  if (!(dt > 0.0))
    throw std::invalid_argument("pulse_waveform: grid must be increasing");
  std::vector<double> out(t_grid.size());
  double energy = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    out[i] = pulse_shape(params, t_grid[i]);
    energy += out[i] * out[i] * dt;
  }
  if (energy <= 0.0)
    throw std::invalid_argument("pulse_waveform: grid misses the pulse support");
  double scale = 1.0 / std::sqrt(energy);
  for (double& v : out) v *= scale;
  return out;
}

namespace {

// Unit-energy pulse template on the chip sample grid. Support spans
// samples 0..n-1 starting at the pulse's nominal start; `scale` converts
// the analytic shape to the same normalization for off-grid evaluation.
struct Template {
  std::vector<double> h;
  double dt = 0.0;
  double scale = 1.0;
};

Template make_template(const PhyParams& params) {
  Template t;
  t.dt = params.sample_dt();
  int n = static_cast<int>(std::llround(params.pulse_width_s / t.dt)) + 1;
  t.h.resize(static_cast<std::size_t>(n));
  double energy = 0.0;
  double half = 0.5 * params.pulse_width_s;
  for (int m = 0; m < n; ++m) {
    t.h[static_cast<std::size_t>(m)] = pulse_shape(params, m * t.dt - half);
    energy += t.h[static_cast<std::size_t>(m)] * t.h[static_cast<std::size_t>(m)] * t.dt;
  }
  t.scale = 1.0 / std::sqrt(energy);
  for (double& v : t.h) v *= t.scale;
  return t;
}

inline long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline int euclid_mod(long long a, long long b) {
  long long m = a % b;
  if (m < 0) m += (b < 0 ? -b : b);
  return static_cast<int>(m);
}

int delta_samples(const PhyParams& p) {
  return static_cast<int>(std::llround(p.delta_s / p.sample_dt()));
}

void check_bits(const std::vector<int>& bits) {
  for (int b : bits)
    if (b != 0 && b != 1)
      throw std::invalid_argument("bit values must be 0 or 1");
}

}  // namespace

HoppingPlan derive_hopping_plan(std::uint64_t node_id, int n_h, int n_s,
                                Scheme scheme) {
  if (n_h < 1 || n_s < 1)
    throw std::invalid_argument("derive_hopping_plan: N_h and N_s must be >= 1");
  HoppingPlan plan;
  plan.node_id = node_id;
  plan.scheme = scheme;
  plan.n_h = n_h;
  plan.n_s = n_s;
  plan.th.resize(static_cast<std::size_t>(n_s));
  plan.code.resize(static_cast<std::size_t>(n_s));
  Pcg32 gen(derive_seed(node_id, "uswb-plan"));
  for (int j = 0; j < n_s; ++j)
    plan.th[static_cast<std::size_t>(j)] =
        n_h == 1 ? 0 : static_cast<int>(gen.next_below(static_cast<std::uint32_t>(n_h)));
  for (int j = 0; j < n_s; ++j) {
    int bit = static_cast<int>(gen.next_u32() & 1u);
    plan.code[static_cast<std::size_t>(j)] =
        scheme == Scheme::kPpmBpsk ? (bit != 0 ? 1 : -1) : bit;
  }
  return plan;
}

std::vector<double> modulate(const std::vector<int>& bits,
                             const HoppingPlan& plan, const PhyParams& params) {
  params.validate();
  check_bits(bits);
  Template tpl = make_template(params);
  int spc = params.samples_per_chip;
  int ds = delta_samples(params);
  std::size_t frame_samples = static_cast<std::size_t>(plan.n_h) * spc;
  std::vector<double> stream(bits.size() * plan.n_s * frame_samples, 0.0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    for (int j = 0; j < plan.n_s; ++j) {
      std::size_t frame = i * plan.n_s + static_cast<std::size_t>(j);
      int chip = plan.th[static_cast<std::size_t>(j)];
      double polarity = 1.0;
      int offset;
      if (plan.scheme == Scheme::kPpmBpsk) {
        polarity = plan.code[static_cast<std::size_t>(j)];
        offset = bits[i] * ds;
      } else {
        offset = (plan.code[static_cast<std::size_t>(j)] ^ bits[i]) * ds;
      }
      std::size_t base = frame * frame_samples +
                         static_cast<std::size_t>(chip) * spc +
                         static_cast<std::size_t>(offset);
      for (std::size_t m = 0; m < tpl.h.size(); ++m)
        stream[base + m] += polarity * tpl.h[m];
    }
  }
  return stream;
}

std::vector<double> apply_channel(const std::vector<double>& stream,
                                  const ChannelImpulseResponse& cir,
                                  double eta, Pcg32& rng,
                                  const PhyParams& params) {
  cir.validate();
  params.validate();
  if (eta < 0.0) throw std::invalid_argument("apply_channel: eta must be >= 0");
  double dts = params.sample_dt();
  std::vector<double> out(stream.size(), 0.0);
  // Tap delays are quantized to the sample grid. A real baseband simulation
  // sees the in-phase projection of the complex low-pass tap gains.
  for (const auto& tap : cir.taps) {
    double gain = tap.amplitude.real();
    if (gain == 0.0) continue;
    long long shift = std::llround(tap.delay_s / dts);
    if (shift < 0)
      throw std::invalid_argument("apply_channel: negative tap delay");
    for (std::size_t i = 0; i + static_cast<std::size_t>(shift) < out.size(); ++i)
      out[i + static_cast<std::size_t>(shift)] += gain * stream[i];
  }
  if (eta > 0.0) {
    double sigma = std::sqrt(eta * params.sample_rate() / 2.0);
    for (double& v : out) v += sigma * rng.gaussian();
  }
  return out;
}

std::vector<int> demodulate_coherent(const std::vector<double>& stream,
                                     const HoppingPlan& plan,
                                     const PhyParams& params,
                                     double strongest_tap_delay_s,
                                     double strongest_tap_gain) {
  params.validate();
  Template tpl = make_template(params);
  int spc = params.samples_per_chip;
  int ds = delta_samples(params);
  double dts = params.sample_dt();
  long long shift = std::llround(strongest_tap_delay_s / dts);
  double sgn = strongest_tap_gain < 0.0 ? -1.0 : 1.0;
  std::size_t frame_samples = static_cast<std::size_t>(plan.n_h) * spc;
  std::size_t bit_samples = frame_samples * static_cast<std::size_t>(plan.n_s);
  std::size_t n_bits = stream.size() / bit_samples;
  std::vector<int> bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    double d_stat = 0.0;
    for (int j = 0; j < plan.n_s; ++j) {
      std::size_t frame = i * plan.n_s + static_cast<std::size_t>(j);
      long long base = static_cast<long long>(frame * frame_samples) +
                       static_cast<long long>(plan.th[static_cast<std::size_t>(j)]) * spc +
                       shift;
      double corr[2] = {0.0, 0.0};
      for (int w = 0; w < 2; ++w) {
        long long start = base + w * ds;
        for (std::size_t m = 0; m < tpl.h.size(); ++m) {
          long long idx = start + static_cast<long long>(m);
          if (idx >= 0 && idx < static_cast<long long>(stream.size()))
            corr[w] += stream[static_cast<std::size_t>(idx)] * tpl.h[m];
        }
        corr[w] *= dts * sgn;
      }
      d_stat += plan.code[static_cast<std::size_t>(j)] * (corr[1] - corr[0]);
    }
    bits[i] = d_stat > 0.0 ? 1 : 0;
  }
  return bits;
}

std::vector<int> demodulate_noncoherent(const std::vector<double>& stream,
                                        const HoppingPlan& plan,
                                        const PhyParams& params) {
  params.validate();
  int spc = params.samples_per_chip;
  int ds = delta_samples(params);
  std::size_t frame_samples = static_cast<std::size_t>(plan.n_h) * spc;
  std::size_t bit_samples = frame_samples * static_cast<std::size_t>(plan.n_s);
  std::size_t n_bits = stream.size() / bit_samples;
  std::vector<int> bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    int votes = 0;
    for (int j = 0; j < plan.n_s; ++j) {
      std::size_t frame = i * plan.n_s + static_cast<std::size_t>(j);
      std::size_t base = frame * frame_samples +
                         static_cast<std::size_t>(plan.th[static_cast<std::size_t>(j)]) * spc;
      double energy[2] = {0.0, 0.0};
      for (int w = 0; w < 2; ++w)
        for (int m = 0; m < ds; ++m) {
          std::size_t idx = base + static_cast<std::size_t>(w * ds + m);
          if (idx < stream.size()) energy[w] += stream[idx] * stream[idx];
        }
      int window_vote = energy[1] > energy[0] ? 1 : 0;
      votes += window_vote ^ plan.code[static_cast<std::size_t>(j)];
    }
    bits[i] = 2 * votes > plan.n_s ? 1 : 0;  // ties decode to 0
  }
  return bits;
}

double wilson_half_width(long errors, long trials) {
  if (trials <= 0) throw std::invalid_argument("wilson_half_width: trials must be > 0");
  const double z = 1.959963984540054;
  double n = static_cast<double>(trials);
  double p = static_cast<double>(errors) / n;
  double z2 = z * z;
  return z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
}

namespace {

// Gamma(alpha, 1) via Marsaglia-Tsang, deterministic on our PRNG.
double gamma_sample(Pcg32& rng, double alpha) {
  if (alpha < 1.0) {
    double u = rng.next_double();
    while (u <= 0.0) u = rng.next_double();
    return gamma_sample(rng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  double d = alpha - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.gaussian();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

double chi_square_sample(Pcg32& rng, int dof) {
  if (dof <= 0) return 0.0;
  return 2.0 * gamma_sample(rng, 0.5 * dof);
}

// One Monte Carlo trial of estimate_ber: synthesizes the victim's N_s chip
// windows only. Both receivers read nothing outside those windows, so this
// is exactly equivalent to composing full sample streams (checked against
// the full modulate/apply_channel/demodulate path in the test suite).
struct BerTrialContext {
  const PhyParams& phy;
  Scheme scheme;
  int n_h;
  int n_s;
  int k;
  double eta;
  double a_sig;
  double a_int;
  const Template& tpl;

  bool run(Pcg32& rng) const {
    double tc = phy.tc_s;
    double tf = n_h * tc;
    double pw = phy.pulse_width_s;
    double dts = phy.sample_dt();
    int spc = phy.samples_per_chip;
    int ds = delta_samples(phy);
    double sigma_n = std::sqrt(eta * phy.sample_rate() / 2.0);

    std::uint64_t victim_id = rng.next_u64();
    int d = static_cast<int>(rng.next_u32() & 1u);
    HoppingPlan victim = derive_hopping_plan(victim_id, n_h, n_s, scheme);

    struct Interferer {
      HoppingPlan plan;
      std::uint64_t bit_seed;
      double offset;
    };
    std::vector<Interferer> interf;
    interf.reserve(static_cast<std::size_t>(k));
    for (int q = 0; q < k; ++q) {
      std::uint64_t id = rng.next_u64();
      std::uint64_t bit_seed = rng.next_u64();
      double offset = rng.next_double() * tf;
      interf.push_back({derive_hopping_plan(id, n_h, n_s, scheme), bit_seed, offset});
    }

    std::vector<double> x(static_cast<std::size_t>(spc));
    double d_stat = 0.0;  // coherent de-spread statistic
    int votes = 0;        // non-coherent chip votes

    for (int j = 0; j < n_s; ++j) {
      std::fill(x.begin(), x.end(), 0.0);
      // Victim pulse (aligned to the sample grid).
      double pol = 1.0;
      int off;
      if (scheme == Scheme::kPpmBpsk) {
        pol = victim.code[static_cast<std::size_t>(j)];
        off = d * ds;
      } else {
        off = (victim.code[static_cast<std::size_t>(j)] ^ d) * ds;
      }
      for (std::size_t m = 0; m < tpl.h.size(); ++m)
        x[static_cast<std::size_t>(off) + m] += a_sig * pol * tpl.h[m];

      // Interference landing in this chip window.
      double win_start = j * tf + victim.th[static_cast<std::size_t>(j)] * tc;
      double win_end = win_start + tc;
      for (const auto& it : interf) {
        long long q_lo = static_cast<long long>(
            std::floor((win_start - pw - it.offset - (n_h - 1) * tc -
                        phy.delta_s) / tf)) - 1;
        long long q_hi = static_cast<long long>(std::floor((win_end - it.offset) / tf)) + 1;
        for (long long q = q_lo; q <= q_hi; ++q) {
          int chip_in_bit = euclid_mod(q, n_s);
          double p_start = it.offset + static_cast<double>(q) * tf +
                           it.plan.th[static_cast<std::size_t>(chip_in_bit)] * tc;
          long long bit_idx = floor_div(q, n_s);
          int d_k = static_cast<int>(mix64(it.bit_seed ^ static_cast<std::uint64_t>(bit_idx + 0x100000)) & 1u);
          double ipol = 1.0;
          if (scheme == Scheme::kPpmBpsk) {
            ipol = it.plan.code[static_cast<std::size_t>(chip_in_bit)];
            p_start += d_k * phy.delta_s;
          } else {
            p_start += (it.plan.code[static_cast<std::size_t>(chip_in_bit)] ^ d_k) *
                       phy.delta_s;
          }
          if (p_start >= win_end || p_start + pw <= win_start) continue;
          double center = p_start + 0.5 * pw;
          int m_lo = std::max(0, static_cast<int>(std::ceil((p_start - win_start) / dts)));
          int m_hi = std::min(spc - 1,
                              static_cast<int>(std::floor((p_start + pw - win_start) / dts)));
          double amp = a_int * ipol * tpl.scale;
          for (int m = m_lo; m <= m_hi; ++m) {
            double t = win_start + m * dts;
            x[static_cast<std::size_t>(m)] += amp * pulse_shape(phy, t - center);
          }
        }
      }

      if (scheme == Scheme::kPpmBpsk) {
        double corr[2];
        for (int w = 0; w < 2; ++w) {
          double c = 0.0;
          for (std::size_t m = 0; m < tpl.h.size(); ++m)
            c += x[static_cast<std::size_t>(w * ds) + m] * tpl.h[m];
          corr[w] = c * dts + rng.gaussian() * std::sqrt(eta / 2.0);
        }
        d_stat += victim.code[static_cast<std::size_t>(j)] * (corr[1] - corr[0]);
      } else {
        double energy[2];
        for (int w = 0; w < 2; ++w) {
          double sum_sq = 0.0;
          for (int m = 0; m < ds; ++m) {
            double v = x[static_cast<std::size_t>(w * ds + m)];
            sum_sq += v * v;
          }
          // Exact AWGN effect on the energy statistic: project onto the
          // signal direction plus an independent chi-square remainder.
          double along = std::sqrt(sum_sq) + sigma_n * rng.gaussian();
          double rest = sigma_n * sigma_n * chi_square_sample(rng, ds - 1);
          energy[w] = (along * along + rest) * dts;
        }
        int window_vote = energy[1] > energy[0] ? 1 : 0;
        votes += window_vote ^ victim.code[static_cast<std::size_t>(j)];
      }
    }

    int decided;
    if (scheme == Scheme::kPpmBpsk)
      decided = d_stat > 0.0 ? 1 : 0;
    else
      decided = 2 * votes > n_s ? 1 : 0;
    return decided != d;
  }
};

}  // namespace

BerEstimate estimate_ber(Scheme scheme, int n_h, int n_s, int k_interferers,
                         long trials, std::uint64_t rng_seed,
                         const BerSimParams& sim) {
  if (trials < 100)
    throw std::invalid_argument("estimate_ber: need at least 100 trials");
  if (n_h < 1 || n_s < 1 || k_interferers < 0)
    throw std::invalid_argument("estimate_ber: bad grid point");
  sim.phy.validate();
  Template tpl = make_template(sim.phy);
  BerTrialContext ctx{sim.phy, scheme, n_h, n_s, k_interferers,
                      sim.eta, sim.signal_amplitude, sim.interferer_amplitude,
                      tpl};
  long errors = 0;
  for (long t = 0; t < trials; ++t) {
    Pcg32 rng(rng_seed, static_cast<std::uint64_t>(t));
    if (ctx.run(rng)) ++errors;
  }
  BerEstimate e;
  e.trials = trials;
  e.errors = errors;
  e.ber = static_cast<double>(errors) / static_cast<double>(trials);
  e.half_width = wilson_half_width(errors, trials);
  return e;
}

void BerTable::insert(const Key& key, const BerEstimate& e) {
  entries_[key] = e;
}

const BerEstimate& BerTable::at(const Key& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw std::out_of_range("BerTable: missing entry (" + scheme_name(key.scheme) +
                            ", K=" + std::to_string(key.k) +
                            ", N_h=" + std::to_string(key.n_h) +
                            ", N_s=" + std::to_string(key.n_s) + ")");
  return it->second;
}

double BerTable::ber(Scheme scheme, int k, int n_h, int n_s) const {
  return at(Key{scheme, k, n_h, n_s}).ber;
}

bool BerTable::covers(Scheme scheme, int n_h_max, int n_s_max, int k_max) const {
  return first_gap(scheme, n_h_max, n_s_max, k_max).empty();
}

std::string BerTable::first_gap(Scheme scheme, int n_h_max, int n_s_max,
                                int k_max) const {
  for (int k = 0; k <= k_max; ++k)
    for (int n_h = 1; n_h <= n_h_max; ++n_h)
      for (int n_s = 1; n_s <= n_s_max; ++n_s)
        if (!has(Key{scheme, k, n_h, n_s}))
          return "(" + scheme_name(scheme) + ", K=" + std::to_string(k) +
                 ", N_h=" + std::to_string(n_h) + ", N_s=" + std::to_string(n_s) + ")";
  return "";
}

void BerTable::save_csv(const std::string& path) const {
  auto f = open_output(path);
  f << "scheme,K,N_h,N_s,ber,trials,ci_half_width\n";
  for (const auto& [key, e] : entries_)
    f << scheme_name(key.scheme) << ',' << key.k << ',' << key.n_h << ','
      << key.n_s << ',' << format_double(e.ber) << ',' << e.trials << ','
      << format_double(e.half_width) << '\n';
}

BerTable BerTable::load_csv(const std::string& path) {
  auto f = open_input(path);
  std::string line;
  if (!std::getline(f, line) ||
      line != "scheme,K,N_h,N_s,ber,trials,ci_half_width")
    throw std::runtime_error(path + ": bad BerTable header");
  BerTable t;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 7)
      throw std::runtime_error(path + ": expected 7 fields, got '" + line + "'");
    Key key{scheme_from_name(fields[0]),
            static_cast<int>(parse_long(fields[1], "K")),
            static_cast<int>(parse_long(fields[2], "N_h")),
            static_cast<int>(parse_long(fields[3], "N_s"))};
    BerEstimate e;
    e.ber = parse_double(fields[4], "ber");
    e.trials = parse_long(fields[5], "trials");
    e.half_width = parse_double(fields[6], "ci_half_width");
    e.errors = std::lround(e.ber * static_cast<double>(e.trials));
    if (e.ber < 0.0 || e.ber > 1.0)
      throw std::runtime_error(path + ": ber out of [0,1]");
    if (e.trials <= 0) throw std::runtime_error(path + ": trials must be > 0");
    if (t.has(key)) throw std::runtime_error(path + ": duplicate key '" + line + "'");
    t.insert(key, e);
  }
  return t;
}

BerTable build_ber_table(const std::vector<Scheme>& schemes, int n_h_max,
                         int n_s_max, int k_max, long trials,
                         std::uint64_t rng_seed, const BerSimParams& sim,
                         int n_threads) {
  if (schemes.empty() || n_h_max < 1 || n_s_max < 1 || k_max < 0)
    throw std::invalid_argument("build_ber_table: empty range");
  struct Point {
    BerTable::Key key;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  std::uint64_t base = derive_seed(rng_seed, "ber-table");
  for (Scheme s : schemes)
    for (int k = 0; k <= k_max; ++k)
      for (int n_h = 1; n_h <= n_h_max; ++n_h)
        for (int n_s = 1; n_s <= n_s_max; ++n_s) {
          std::uint64_t seed = derive_seed(
              derive_seed(derive_seed(derive_seed(base, static_cast<std::uint64_t>(s)),
                                      static_cast<std::uint64_t>(k)),
                          static_cast<std::uint64_t>(n_h)),
              static_cast<std::uint64_t>(n_s));
          points.push_back({BerTable::Key{s, k, n_h, n_s}, seed});
        }

  std::vector<BerEstimate> results(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      results[i] = estimate_ber(points[i].key.scheme, points[i].key.n_h,
                                points[i].key.n_s, points[i].key.k, trials,
                                points[i].seed, sim);
    }
  };
  if (n_threads <= 0)
    n_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  BerTable table;
  for (std::size_t i = 0; i < points.size(); ++i)
    table.insert(points[i].key, results[i]);
  return table;
}

}  // namespace uswb
