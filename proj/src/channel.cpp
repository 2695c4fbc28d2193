#include "uswb/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "uswb/csv.hpp"
#include "uswb/rng.hpp"

namespace uswb {

void ChannelImpulseResponse::validate() const {
  if (taps.empty())
    throw std::invalid_argument("ChannelImpulseResponse: at least one tap required");
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& t : taps) {
    if (!(t.delay_s > prev))
      throw std::invalid_argument("ChannelImpulseResponse: delays must be strictly increasing");
    if (!std::isfinite(t.amplitude.real()) || !std::isfinite(t.amplitude.imag()))
      throw std::invalid_argument("ChannelImpulseResponse: non-finite tap amplitude");
    prev = t.delay_s;
  }
}

ChannelImpulseResponse ChannelImpulseResponse::single_tap(double gain) {
  ChannelImpulseResponse cir;
  cir.taps.push_back({0.0, {gain, 0.0}});
  return cir;
}

void ChannelImpulseResponse::save_csv(const std::string& path) const {
  auto f = open_output(path);
  f << "delay_s,re,im\n";
  for (const auto& t : taps)
    f << format_double(t.delay_s) << ',' << format_double(t.amplitude.real())
      << ',' << format_double(t.amplitude.imag()) << '\n';
}

ChannelImpulseResponse ChannelImpulseResponse::load_csv(const std::string& path) {
  auto f = open_input(path);
  std::string line;
  if (!std::getline(f, line) || split_csv_line(line) !=
      std::vector<std::string>{"delay_s", "re", "im"})
    throw std::runtime_error(path + ": expected header 'delay_s,re,im'");
  ChannelImpulseResponse cir;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw std::runtime_error(path + ": expected 3 fields, got line '" + line + "'");
    cir.taps.push_back({parse_double(fields[0], "delay_s"),
                        {parse_double(fields[1], "re"),
                         parse_double(fields[2], "im")}});
  }
  cir.validate();
  return cir;
}

double attenuation_coefficient(double f_mhz, const MediumParams& medium) {
  if (!(f_mhz > 0.0))
    throw std::invalid_argument("attenuation_coefficient: f must be > 0");
  return medium.a * std::pow(f_mhz, medium.b);
}

double pressure_ratio(double d_m, double alpha_np_per_m) {
  if (d_m < 0.0) throw std::invalid_argument("pressure_ratio: d must be >= 0");
  if (alpha_np_per_m < 0.0)
    throw std::invalid_argument("pressure_ratio: alpha must be >= 0");
  return std::exp(-alpha_np_per_m * d_m);
}

double max_frequency_for_budget(double d_m, const MediumParams& medium,
                                double budget_db) {
  if (!(budget_db > 0.0))
    throw std::invalid_argument("max_frequency_for_budget: budget must be > 0");
  // 20*log10(exp(a f^b d)) <= budget_db  <=>  a f^b d <= budget_np
  double budget_np = budget_db * std::numbers::ln10 / 20.0;
  if (medium.a <= 0.0 || d_m <= 0.0)
    return std::numeric_limits<double>::infinity();
  return std::pow(budget_np / (medium.a * d_m), 1.0 / medium.b);
}

double path_gain(double d_m, double f_mhz, const MediumParams& medium,
                 bool geometric_spreading, double reference_distance_m) {
  if (!(d_m > 0.0)) throw std::invalid_argument("path_gain: d must be > 0");
  double alpha = attenuation_coefficient(f_mhz, medium);
  double g = std::exp(-2.0 * alpha * d_m);
  if (geometric_spreading) g *= reference_distance_m / d_m;
  return g;
}

ChannelImpulseResponse synth_impulse_response(int n_taps, double tap_spacing_s,
                                              double decay_constant_s,
                                              std::uint64_t rng_seed,
                                              double distance_m) {
  if (n_taps < 1)
    throw std::invalid_argument("synth_impulse_response: n_taps must be >= 1");
  if (!(tap_spacing_s > 0.0))
    throw std::invalid_argument("synth_impulse_response: tap_spacing must be > 0");
  if (!(decay_constant_s > 0.0))
    throw std::invalid_argument("synth_impulse_response: decay_constant must be > 0");
  Pcg32 rng(derive_seed(rng_seed, "synth_cir"));
  ChannelImpulseResponse cir;
  cir.distance_m = distance_m;
  cir.taps.reserve(static_cast<std::size_t>(n_taps));
  for (int k = 0; k < n_taps; ++k) {
    double t = k * tap_spacing_s;
    double amp = std::exp(-0.5 * t / decay_constant_s);  // power ~ exp(-t/gamma)
    double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    cir.taps.push_back({t, std::polar(amp, phase)});
  }
  return cir;
}

DelayStats delay_stats(const ChannelImpulseResponse& cir) {
  cir.validate();
  double t0 = cir.taps.front().delay_s;
  double p_sum = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& tap : cir.taps) {
    double p = std::norm(tap.amplitude);
    double t = tap.delay_s - t0;
    p_sum += p;
    m1 += p * t;
    m2 += p * t * t;
  }
  if (p_sum <= 0.0)
    throw std::invalid_argument("delay_stats: zero-power impulse response");
  DelayStats s;
  s.tau_m = m1 / p_sum;
  double var = m2 / p_sum - s.tau_m * s.tau_m;
  s.tau_rms = std::sqrt(std::max(0.0, var));
  s.coherence_bandwidth = s.tau_rms > 0.0
                              ? kCoherenceConstant / s.tau_rms
                              : std::numeric_limits<double>::infinity();
  return s;
}

double calibrate_decay_constant(int n_taps, double tap_spacing_s,
                                double target_tau_rms_s) {
  if (!(target_tau_rms_s > 0.0))
    throw std::invalid_argument("calibrate_decay_constant: target must be > 0");
  if (n_taps < 2)
    throw std::invalid_argument("calibrate_decay_constant: need >= 2 taps");
  auto rms_for = [&](double gamma) {
    return delay_stats(synth_impulse_response(n_taps, tap_spacing_s, gamma, 0))
        .tau_rms;
  };
  // tau_rms grows monotonically with the decay constant toward the
  // truncation-limited maximum; bracket then bisect.
  double lo = target_tau_rms_s * 1e-3;
  double hi = target_tau_rms_s;
  while (rms_for(hi) < target_tau_rms_s) {
    hi *= 2.0;
    if (hi > 1.0)
      throw std::runtime_error(
          "calibrate_decay_constant: target tau_rms unreachable with this tap "
          "layout (increase n_taps or spacing)");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (rms_for(mid) < target_tau_rms_s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace uswb
