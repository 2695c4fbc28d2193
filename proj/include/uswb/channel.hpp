#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "uswb/medium.hpp"

namespace uswb {

// One multipath tap of the complex low-pass equivalent impulse response.
struct ChannelTap {
  double delay_s = 0.0;
  std::complex<double> amplitude;
};

// Tap-delay line channel. Delays are strictly increasing and measured from
// the first arrival; `distance_m` records the reference Tx-Rx distance.
struct ChannelImpulseResponse {
  std::vector<ChannelTap> taps;
  double distance_m = 0.0;

  void validate() const;
  static ChannelImpulseResponse single_tap(double gain = 1.0);

  void save_csv(const std::string& path) const;
  static ChannelImpulseResponse load_csv(const std::string& path);
};

// Power-weighted delay statistics of a tap-delay profile.
struct DelayStats {
  double tau_m = 0.0;             // mean excess delay [s]
  double tau_rms = 0.0;           // RMS delay spread [s]
  double coherence_bandwidth = 0.0;  // [Hz], k / tau_rms
};

// Proportionality constant for coherence bandwidth, B_c = k / tau_rms.
// k = 1/5 reproduces the ~7 kHz coherence figure for tau_rms = 2.6883e-5 s.
inline constexpr double kCoherenceConstant = 1.0 / 5.0;

// Amplitude attenuation coefficient alpha = a * f^b  [Np/m], f in MHz.
double attenuation_coefficient(double f_mhz, const MediumParams& medium);

// Pressure ratio after distance d: P(d)/P0 = exp(-alpha * d).
double pressure_ratio(double d_m, double alpha_np_per_m);

// Largest frequency [MHz] whose end-to-end attenuation stays within
// `budget_db` over distance d; closed-form inversion of the power law.
double max_frequency_for_budget(double d_m, const MediumParams& medium,
                                double budget_db);

// Power path gain used by the SINR model: squared amplitude ratio
// exp(-2 alpha d). Optional 1/d geometric spreading (off by default,
// matching the analytical model, which carries no spreading term).
double path_gain(double d_m, double f_mhz, const MediumParams& medium,
                 bool geometric_spreading = false,
                 double reference_distance_m = 1.0);

// Synthetic multipath profile: taps every `tap_spacing_s`, exponentially
// decaying power exp(-t/decay_constant_s), independent uniform phases.
// Deterministic for a fixed seed.
ChannelImpulseResponse synth_impulse_response(int n_taps, double tap_spacing_s,
                                              double decay_constant_s,
                                              std::uint64_t rng_seed,
                                              double distance_m = 0.0);

// First and second power-weighted moments relative to the first arrival.
DelayStats delay_stats(const ChannelImpulseResponse& cir);

// Finds the decay constant for which synth_impulse_response (with the given
// tap layout) has the target RMS delay spread. Bisection; phases do not
// enter the power-delay profile, so the result is seed-independent.
double calibrate_decay_constant(int n_taps, double tap_spacing_s,
                                double target_tau_rms_s);

// Default synthetic-profile layout used by channel calibration.
inline constexpr int kDefaultSynthTaps = 200;
inline constexpr double kDefaultSynthSpacing = 1e-6;  // [s]

}  // namespace uswb
