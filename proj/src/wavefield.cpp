#include "uswb/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "uswb/channel.hpp"
#include "uswb/csv.hpp"

namespace uswb {

namespace {

constexpr const char* kArmLayerNames[4] = {"bone", "muscle", "fat", "skin"};

bool divides_evenly(double length, double dx, int* n_out) {
  double n = length / dx;
  long nr = std::lround(n);
  if (nr < 1 || std::abs(n - static_cast<double>(nr)) > 1e-6 * n) return false;
  *n_out = static_cast<int>(nr);
  return true;
}

}  // namespace

double TissueGeometry::max_sound_speed() const {
  double c_max = 0.0;
  for (const auto& p : tissue_params) c_max = std::max(c_max, p.c);
  return c_max;
}

TissueGeometry build_arm_geometry(double dx, const TissueTable& table,
                                  int min_cells_per_layer) {
  if (!(dx > 0.0)) throw std::invalid_argument("build_arm_geometry: dx must be > 0");
  TissueGeometry g;
  g.dx = dx;
  if (!divides_evenly(g.width_m, dx, &g.nx) || !divides_evenly(g.height_m, dx, &g.ny))
    throw std::invalid_argument("build_arm_geometry: dx must divide 0.20 m x 0.10 m evenly");
  // Check the thinnest layer first so the error names the binding one.
  int order[4] = {3, 2, 0, 1};
  for (int l : order) {
    double cells = kArmHalfWidths[l] / dx;
    if (cells < min_cells_per_layer)
      throw std::invalid_argument(
          std::string("build_arm_geometry: dx too coarse, layer '") +
          kArmLayerNames[l] + "' (" + format_double(kArmHalfWidths[l] * 1e3) +
          " mm) spans fewer than " + std::to_string(min_cells_per_layer) +
          " cells");
  }
  for (int l = 0; l < 4; ++l) {
    g.tissue_names.emplace_back(kArmLayerNames[l]);
    g.tissue_params.push_back(table.get(kArmLayerNames[l]));
  }
  g.label.resize(static_cast<std::size_t>(g.nx) * g.ny);
  double mid = 0.5 * g.height_m;
  // Cumulative half-widths from the midline outward.
  double edges[4];
  double acc = 0.0;
  for (int l = 0; l < 4; ++l) {
    acc += kArmHalfWidths[l];
    edges[l] = acc;
  }
  for (int j = 0; j < g.ny; ++j) {
    double y = (j + 0.5) * dx;
    double dist = std::abs(y - mid);
    std::uint8_t lab = 3;
    for (int l = 0; l < 4; ++l)
      if (dist < edges[l]) {
        lab = static_cast<std::uint8_t>(l);
        break;
      }
    for (int i = 0; i < g.nx; ++i)
      g.label[static_cast<std::size_t>(j) * g.nx + i] = lab;
  }
  return g;
}

TissueGeometry build_uniform_geometry(double dx, const MediumParams& medium,
                                      double width_m, double height_m) {
  if (!(dx > 0.0)) throw std::invalid_argument("build_uniform_geometry: dx must be > 0");
  medium.validate();
  TissueGeometry g;
  g.width_m = width_m;
  g.height_m = height_m;
  g.dx = dx;
  if (!divides_evenly(width_m, dx, &g.nx) || !divides_evenly(height_m, dx, &g.ny))
    throw std::invalid_argument("build_uniform_geometry: dx must divide the domain evenly");
  g.tissue_names = {"uniform"};
  g.tissue_params = {medium};
  g.label.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);
  return g;
}

GridPos grid_pos_of(const TissueGeometry& geom, double x_m, double y_m) {
  GridPos p;
  p.i = static_cast<int>(std::floor(x_m / geom.dx));
  p.j = static_cast<int>(std::floor(y_m / geom.dx));
  if (p.i < 0 || p.i >= geom.nx || p.j < 0 || p.j >= geom.ny)
    throw std::invalid_argument("grid_pos_of: position outside the domain");
  return p;
}

double cfl_limit(const TissueGeometry& geom) {
  return geom.dx / (geom.max_sound_speed() * std::sqrt(2.0));
}

std::vector<double> dirac_like_waveform(double dt, int n_steps,
                                        double width_factor) {
  if (!(dt > 0.0) || n_steps < 1)
    throw std::invalid_argument("dirac_like_waveform: bad dt or n_steps");
  std::vector<double> s(static_cast<std::size_t>(n_steps), 0.0);
  double tau = width_factor * dt;
  double t0 = 4.0 * tau;
  for (int n = 0; n < n_steps; ++n) {
    double u = (n * dt - t0) / tau;
    double v = std::exp(-u * u);
    if (v < 1e-14 && n * dt > t0) break;
    s[static_cast<std::size_t>(n)] = v;
  }
  return s;
}

WaveRunResult simulate_field(const TissueGeometry& geom,
                             const WaveRunConfig& config) {
  if (geom.nx < 3 || geom.ny < 3)
    throw std::invalid_argument("simulate_field: grid too small");
  if (config.n_steps < 1)
    throw std::invalid_argument("simulate_field: n_steps must be >= 1");
  double dt_max = cfl_limit(geom);
  if (!(config.dt > 0.0) || config.dt > dt_max)
    throw std::invalid_argument(
        "simulate_field: CFL violation, dt must be in (0, " +
        format_double(dt_max) + "] s");
  auto check = [&](const GridPos& p, const char* what) {
    if (p.i < 0 || p.i >= geom.nx || p.j < 0 || p.j >= geom.ny)
      throw std::invalid_argument(std::string("simulate_field: ") + what +
                                  " outside the domain");
  };
  check(config.source, "source");
  check(config.sink, "sink");
  for (const auto& p : config.probes) check(p, "probe");

  const int nx = geom.nx, ny = geom.ny;
  const double dt = config.dt, dx = geom.dx;
  const std::size_t n_cells = static_cast<std::size_t>(nx) * ny;

  // Per-cell coefficients.
  std::vector<double> kappa(n_cells);     // rho c^2 dt / dx
  std::vector<double> inv_rho(n_cells);   // dt / (rho dx)
  std::vector<double> damp(n_cells);      // exp(-alpha c dt)
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const MediumParams& m = geom.params_at(i, j);
      std::size_t idx = static_cast<std::size_t>(j) * nx + i;
      kappa[idx] = m.rho * m.c * m.c * dt / dx;
      inv_rho[idx] = dt / (m.rho * dx);
      double alpha = m.a * std::pow(config.source_center_freq_mhz, m.b);
      damp[idx] = std::exp(-alpha * m.c * dt);
    }

  // Exponential sponge layer against edge reflections.
  std::vector<double> sponge(n_cells, 1.0);
  int w = config.sponge_cells;
  if (w > 0) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        int d = std::min(std::min(i, nx - 1 - i), std::min(j, ny - 1 - j));
        if (d < w) {
          double u = static_cast<double>(w - d) / w;
          sponge[static_cast<std::size_t>(j) * nx + i] =
              std::exp(-config.sponge_strength * u * u);
        }
      }
  }

  std::vector<double> p(n_cells, 0.0);
  std::vector<double> vx(static_cast<std::size_t>(nx + 1) * ny, 0.0);
  std::vector<double> vy(static_cast<std::size_t>(nx) * (ny + 1), 0.0);

  WaveRunResult out;
  out.sink_series.resize(static_cast<std::size_t>(config.n_steps), 0.0);
  out.probe_series.assign(config.probes.size(),
                          std::vector<double>(static_cast<std::size_t>(config.n_steps), 0.0));
  std::size_t src = static_cast<std::size_t>(config.source.j) * nx + config.source.i;
  std::size_t snk = static_cast<std::size_t>(config.sink.j) * nx + config.sink.i;
  std::vector<std::size_t> probe_idx;
  for (const auto& pr : config.probes)
    probe_idx.push_back(static_cast<std::size_t>(pr.j) * nx + pr.i);

  for (int n = 0; n < config.n_steps; ++n) {
    // Velocity update (interior faces; boundary faces stay rigid).
    for (int j = 0; j < ny; ++j) {
      std::size_t row = static_cast<std::size_t>(j) * nx;
      std::size_t vrow = static_cast<std::size_t>(j) * (nx + 1);
      for (int i = 1; i < nx; ++i) {
        double ir = 0.5 * (inv_rho[row + i - 1] + inv_rho[row + i]);
        vx[vrow + i] -= ir * (p[row + i] - p[row + i - 1]);
      }
    }
    for (int j = 1; j < ny; ++j) {
      std::size_t row = static_cast<std::size_t>(j) * nx;
      std::size_t prev = row - static_cast<std::size_t>(nx);
      for (int i = 0; i < nx; ++i) {
        double ir = 0.5 * (inv_rho[prev + i] + inv_rho[row + i]);
        vy[row + i] -= ir * (p[row + i] - p[prev + i]);
      }
    }
    // Pressure update with attenuation and sponge damping.
    for (int j = 0; j < ny; ++j) {
      std::size_t row = static_cast<std::size_t>(j) * nx;
      std::size_t vrow = static_cast<std::size_t>(j) * (nx + 1);
      std::size_t vyrow = row;
      std::size_t vyrow_next = row + static_cast<std::size_t>(nx);
      for (int i = 0; i < nx; ++i) {
        std::size_t idx = row + i;
        double div = (vx[vrow + i + 1] - vx[vrow + i]) +
                     (vy[vyrow_next + i] - vy[vyrow + i]);
        p[idx] = (p[idx] - kappa[idx] * div) * damp[idx] * sponge[idx];
      }
    }
    if (n < static_cast<int>(config.source_waveform.size()))
      p[src] += config.source_waveform[static_cast<std::size_t>(n)];
    out.sink_series[static_cast<std::size_t>(n)] = p[snk];
    for (std::size_t q = 0; q < probe_idx.size(); ++q)
      out.probe_series[q][static_cast<std::size_t>(n)] = p[probe_idx[q]];
    if (config.snapshot_every > 0 && n % config.snapshot_every == 0)
      out.snapshots.push_back({n * dt, p});
  }
  return out;
}

long first_arrival_index(const std::vector<double>& series, double fraction) {
  double peak = 0.0;
  for (double v : series) peak = std::max(peak, std::abs(v));
  if (peak <= 0.0) return -1;
  double thr = fraction * peak;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (std::abs(series[i]) >= thr) return static_cast<long>(i);
  return -1;
}

ChannelImpulseResponse extract_impulse_response(const std::vector<double>& series,
                                                double dt,
                                                double energy_fraction) {
  if (series.empty())
    throw std::invalid_argument("extract_impulse_response: empty series");
  if (!(dt > 0.0))
    throw std::invalid_argument("extract_impulse_response: dt must be > 0");
  double total = 0.0, peak = 0.0;
  for (double v : series) {
    total += v * v;
    peak = std::max(peak, std::abs(v));
  }
  if (total <= 0.0 || peak <= 0.0)
    throw std::invalid_argument("extract_impulse_response: all-zero series");

  std::vector<std::size_t> order(series.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double pa = series[a] * series[a], pb = series[b] * series[b];
    if (pa != pb) return pa > pb;
    return a < b;
  });
  std::vector<bool> keep(series.size(), false);
  double acc = 0.0;
  for (std::size_t k : order) {
    keep[k] = true;
    acc += series[k] * series[k];
    if (acc >= energy_fraction * total) break;
  }

  // Leading dead time carries no taps; delays keep the recording timeline.
  ChannelImpulseResponse cir;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (keep[i])
      cir.taps.push_back({static_cast<double>(i) * dt, {series[i] / peak, 0.0}});
  cir.validate();
  return cir;
}

}  // namespace uswb
