#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uswb/channel.hpp"
#include "uswb/medium.hpp"

namespace uswb {

// Cell-labeled rectangular tissue map with per-cell acoustic parameters.
struct TissueGeometry {
  double width_m = 0.20;   // x extent
  double height_m = 0.10;  // y extent
  double dx = 0.0;         // grid spacing (square cells)
  int nx = 0;
  int ny = 0;
  std::vector<std::uint8_t> label;  // nx*ny, row-major in x
  std::vector<std::string> tissue_names;
  std::vector<MediumParams> tissue_params;  // indexed by label

  std::uint8_t at(int i, int j) const {
    return label[static_cast<std::size_t>(j) * nx + i];
  }
  const MediumParams& params_at(int i, int j) const {
    return tissue_params[at(i, j)];
  }
  double max_sound_speed() const;
};

// Arm-section layer stack, symmetric about the horizontal midline:
// bone core 18 mm half-width, then muscle 22 mm, fat 7 mm, skin 3 mm.
inline constexpr double kArmHalfWidths[4] = {0.018, 0.022, 0.007, 0.003};

// Builds the layered arm map on a dx grid. Every layer must span at least
// `min_cells_per_layer` cells, otherwise a resolution error names the
// offending layer.
TissueGeometry build_arm_geometry(double dx, const TissueTable& table,
                                  int min_cells_per_layer = 4);

// Uniform single-tissue map of the same footprint (solver sanity checks).
TissueGeometry build_uniform_geometry(double dx, const MediumParams& medium,
                                      double width_m = 0.20,
                                      double height_m = 0.10);

struct GridPos {
  int i = 0;
  int j = 0;
};

GridPos grid_pos_of(const TissueGeometry& geom, double x_m, double y_m);

struct FieldSnapshot {
  double time_s = 0.0;
  std::vector<double> pressure;  // nx*ny
};

struct WaveRunConfig {
  double dt = 0.0;
  int n_steps = 0;
  GridPos source;
  GridPos sink;
  std::vector<GridPos> probes;          // extra recording points
  std::vector<double> source_waveform;  // injected additively at the source
  double source_center_freq_mhz = 2.0;  // attenuation is evaluated here
  int sponge_cells = 20;
  double sponge_strength = 0.25;
  int snapshot_every = 0;  // 0 = no snapshots
};

struct WaveRunResult {
  std::vector<double> sink_series;  // pressure at the sink, length n_steps
  std::vector<std::vector<double>> probe_series;
  std::vector<FieldSnapshot> snapshots;
};

// Leapfrog FDTD on a staggered grid for the coupled first-order acoustic
// equations with per-cell c, rho, and amplitude damping derived from
// alpha = a f^b at the source center frequency. Throws if the CFL bound
// dt <= dx / (c_max sqrt(2)) is violated (the message carries the largest
// admissible dt). Single-threaded and bit-reproducible.
WaveRunResult simulate_field(const TissueGeometry& geom,
                             const WaveRunConfig& config);

// Largest stable time step for this geometry.
double cfl_limit(const TissueGeometry& geom);

// Gaussian approximation of a Dirac excitation (width = 2 dt by default).
std::vector<double> dirac_like_waveform(double dt, int n_steps,
                                        double width_factor = 2.0);

// First sample index where |series| reaches `fraction` of its peak; -1 if
// the series is all zero.
long first_arrival_index(const std::vector<double>& series, double fraction);

// Converts a recorded pressure series into tap-delay form: peak-normalized,
// leading dead time discarded, strongest samples retained until they hold
// `energy_fraction` of the total energy. Throws on an all-zero series.
ChannelImpulseResponse extract_impulse_response(const std::vector<double>& series,
                                                double dt,
                                                double energy_fraction = 0.999);

}  // namespace uswb
