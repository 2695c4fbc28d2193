#include "uswb/adapt.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uswb {

double rate_bps(int n_h, int n_s, double tc_s) {
  if (n_h < 1 || n_s < 1)
    throw std::invalid_argument("rate: N_h and N_s must be >= 1");
  if (!(tc_s > 0.0)) throw std::invalid_argument("rate: Tc must be > 0");
  return 1.0 / (static_cast<double>(n_s) * n_h * tc_s);
}

double sinr(int n_h, int n_s, const SinrInputs& in,
            const std::vector<LinkConfig>& interferers) {
  if (n_h < 1 || n_s < 1)
    throw std::invalid_argument("sinr: N_h and N_s must be >= 1");
  double interference = 0.0;
  for (const auto& k : interferers) {
    if (k.n_h < 1) throw std::invalid_argument("sinr: interferer N_h must be >= 1");
    interference += static_cast<double>(n_h) / k.n_h * k.power * k.gain_to_victim;
  }
  double denom = in.eta + in.sigma2 * in.tc_s * interference;
  if (denom <= 0.0)
    throw std::domain_error("sinr: zero denominator (eta = 0 with no interference)");
  return n_s * in.own_power * in.own_gain * n_h * in.tc_s / denom;
}

FeasibilityOracle sinr_oracle_implicit(const SinrInputs& in, int k_interferers,
                                       double interferer_power,
                                       double interferer_gain,
                                       double sinr_min) {
  return [=](int n_h, int n_s) {
    std::vector<LinkConfig> peers(
        static_cast<std::size_t>(k_interferers),
        LinkConfig{0, n_h, n_s, interferer_power, interferer_gain});
    return sinr(n_h, n_s, in, peers) >= sinr_min;
  };
}

namespace {

// Shared enumeration: scans the full grid, keeps the best pair under `better`.
template <typename Better>
std::optional<SolveResult> enumerate_best(const AdaptConstraints& c,
                                          const FeasibilityOracle& feasible,
                                          int n_h_lower, Better better) {
  if (c.n_h_max < 1 || c.n_s_max < 1)
    throw std::invalid_argument("solver: N_h_max and N_s_max must be >= 1");
  std::optional<SolveResult> best;
  for (int n_h = n_h_lower; n_h <= c.n_h_max; ++n_h) {
    for (int n_s = 1; n_s <= c.n_s_max; ++n_s) {
      double r = rate_bps(n_h, n_s, c.tc_s);
      if (r < c.r_min_bps) continue;
      if (!feasible(n_h, n_s)) continue;
      SolveResult cand{n_h, n_s, r};
      if (!best || better(cand, *best)) best = cand;
    }
  }
  return best;
}

// Rate-maximizing order; ties by smaller N_s, then smaller N_h.
bool rate_better(const SolveResult& a, const SolveResult& b) {
  if (a.rate != b.rate) return a.rate > b.rate;
  if (a.n_s != b.n_s) return a.n_s < b.n_s;
  return a.n_h < b.n_h;
}

}  // namespace

std::optional<SolveResult> solve_implicit(const AdaptConstraints& c,
                                          const FeasibilityOracle& feasible) {
  return enumerate_best(c, feasible, 1, rate_better);
}

double report_min_frame_length(const InterferenceReport& rep, double sinr_min,
                               double eta) {
  if (!(rep.gamma > 0.0))
    throw std::invalid_argument("InterferenceReport: gamma must be > 0");
  double headroom = rep.gamma / sinr_min - eta - rep.delta;
  if (headroom <= 0.0) return std::numeric_limits<double>::infinity();
  return rep.epsilon / headroom;
}

std::optional<SolveResult> solve_explicit(
    const AdaptConstraints& c, const FeasibilityOracle& own_feasible,
    const std::vector<InterferenceReport>& reports, double sinr_min,
    double eta) {
  int n_h_lower = 1;
  for (const auto& rep : reports) {
    double bound = report_min_frame_length(rep, sinr_min, eta);
    if (std::isinf(bound)) return std::nullopt;  // no interference headroom
    n_h_lower = std::max(n_h_lower, static_cast<int>(std::ceil(bound)));
  }
  if (n_h_lower > c.n_h_max) return std::nullopt;
  return enumerate_best(c, own_feasible, n_h_lower, rate_better);
}

std::optional<RelaxedSolution> solve_relaxed(const RelaxedProblem& p) {
  const auto& c = p.constraints;
  if (!(p.alpha > 0.0))
    throw std::invalid_argument("solve_relaxed: alpha must be > 0");
  if (!(p.sinr_min > 0.0))
    throw std::invalid_argument("solve_relaxed: sinr_min must be > 0");
  double budget = p.alpha / p.sinr_min;  // right side of the posynomial constraint

  // Log variables x = ln N_h, y = ln N_s. The program reads
  //   minimize   s = x + y                        (inverse rate / Tc)
  //   subject to eta e^{-s} + B e^{-y} <= budget  (B = beta_sum)
  //              s <= ln(1 / (R_min Tc))
  //              max(0, report bounds) <= x <= ln N_h_max,  0 <= y <= ln N_s_max
  // The domain is relaxed to [1, N_max] per coordinate: every integer point
  // lies inside, so the lower-bound property L <= p*_int is preserved and
  // the program stays bounded. For fixed s the constraint's left side is
  // minimal at the largest admissible y, so feasibility is monotone in s
  // and the optimum is found by bisection on s.
  double x_cap = std::log(static_cast<double>(c.n_h_max));
  double y_cap = std::log(static_cast<double>(c.n_s_max));
  double x_lb = 0.0;
  for (const auto& rep : p.reports) {
    double bound = report_min_frame_length(rep, p.sinr_min, p.eta);
    if (std::isinf(bound)) return std::nullopt;
    if (bound > 1.0) x_lb = std::max(x_lb, std::log(bound));
  }
  if (x_lb > x_cap) return std::nullopt;

  double s_rate_cap = std::log(1.0 / (c.r_min_bps * c.tc_s));
  double s_max = std::min(x_cap + y_cap, s_rate_cap);
  double s_min = x_lb;  // y = 0
  if (s_min > s_max) return std::nullopt;

  auto split = [&](double s) {
    double y = std::min(y_cap, s - x_lb);
    return std::pair<double, double>(s - y, y);  // (x, y)
  };
  auto feasible_at = [&](double s) {
    auto [x, y] = split(s);
    (void)x;
    return p.eta * std::exp(-s) + p.beta_sum * std::exp(-y) <= budget;
  };

  if (!feasible_at(s_max)) return std::nullopt;
  double s;
  if (feasible_at(s_min)) {
    s = s_min;  // constraint slack over the whole box
  } else {
    double lo = s_min, hi = s_max;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if (feasible_at(mid))
        hi = mid;
      else
        lo = mid;
    }
    s = hi;
  }
  auto [x, y] = split(s);
  RelaxedSolution sol;
  sol.n_h = std::exp(x);
  sol.n_s = std::exp(y);
  sol.objective = std::exp(s) * c.tc_s;
  return sol;
}

std::optional<RoundedSolution> round_relaxed(const RelaxedSolution& rlx,
                                             double threshold,
                                             const AdaptConstraints& c,
                                             const FeasibilityOracle& feasible) {
  if (threshold < 0.0 || threshold > 1.0)
    throw std::invalid_argument("round_relaxed: threshold must be in [0, 1]");
  auto round_one = [&](double v, int cap) {
    double base = std::floor(v);
    double frac = v - base;
    int r = static_cast<int>(base) + (frac > threshold ? 1 : 0);
    return std::min(std::max(r, 1), cap);
  };
  int n_h = round_one(rlx.n_h, c.n_h_max);
  int n_s = round_one(rlx.n_s, c.n_s_max);
  double r = rate_bps(n_h, n_s, c.tc_s);
  if (r < c.r_min_bps || !feasible(n_h, n_s)) return std::nullopt;
  RoundedSolution out;
  out.n_h = n_h;
  out.n_s = n_s;
  out.lower = rlx.objective;
  out.upper = 1.0 / r;
  return out;
}

double PiezoParams::capacitance() const {
  if (c0_f > 0.0) return c0_f;
  if (!(area_m2 > 0.0) || !(dielectric_k > 0.0) || !(thickness_m > 0.0))
    throw std::invalid_argument(
        "PiezoParams: need either C0 or all of (area, dielectric K, thickness)");
  return area_m2 * kEpsilon0 * dielectric_k / thickness_m;
}

double max_safe_pressure(double intensity_limit_w_m2, double rho, double c) {
  if (intensity_limit_w_m2 < 0.0 || !(rho > 0.0) || !(c > 0.0))
    throw std::invalid_argument("max_safe_pressure: bad inputs");
  return std::sqrt(intensity_limit_w_m2 * rho * c);
}

double pulse_energy(const PiezoParams& piezo) {
  if (!(piezo.g33 > 0.0) || !(piezo.p_out_pa > 0.0) || !(piezo.thickness_m > 0.0))
    throw std::invalid_argument("pulse_energy: g33, P and t_h must be > 0");
  double cap = max_safe_pressure(piezo.intensity_limit_w_m2, piezo.rho, piezo.c);
  if (piezo.p_out_pa > cap)
    throw std::domain_error("pulse_energy: drive pressure exceeds the safety cap");
  double v = piezo.g33 * piezo.p_out_pa * piezo.thickness_m;
  return piezo.capacitance() * v * v;
}

EnergyMetrics energy_metrics(double e_p, int n_h, int n_s, double tc_s) {
  if (n_h < 1 || n_s < 1)
    throw std::invalid_argument("energy_metrics: N_h and N_s must be >= 1");
  EnergyMetrics m;
  m.e_b = e_p * n_s;
  m.e_s = e_p / (tc_s * n_h);
  return m;
}

std::optional<SolveResult> solve_energy_min(
    EnergyObjective objective, double e_p, const AdaptConstraints& c,
    const FeasibilityOracle& own_feasible,
    const std::vector<InterferenceReport>& reports, double sinr_min,
    double eta) {
  int n_h_lower = 1;
  for (const auto& rep : reports) {
    double bound = report_min_frame_length(rep, sinr_min, eta);
    if (std::isinf(bound)) return std::nullopt;
    n_h_lower = std::max(n_h_lower, static_cast<int>(std::ceil(bound)));
  }
  if (n_h_lower > c.n_h_max) return std::nullopt;

  auto energy_of = [&](const SolveResult& r) {
    EnergyMetrics m = energy_metrics(e_p, r.n_h, r.n_s, c.tc_s);
    return objective == EnergyObjective::kEnergyPerBit ? m.e_b : m.e_s;
  };
  auto other_of = [&](const SolveResult& r) {
    EnergyMetrics m = energy_metrics(e_p, r.n_h, r.n_s, c.tc_s);
    return objective == EnergyObjective::kEnergyPerBit ? m.e_s : m.e_b;
  };
  auto better = [&](const SolveResult& a, const SolveResult& b) {
    double ea = energy_of(a), eb = energy_of(b);
    if (ea != eb) return ea < eb;
    if (a.rate != b.rate) return a.rate > b.rate;
    double oa = other_of(a), ob = other_of(b);
    if (oa != ob) return oa < ob;
    if (a.n_s != b.n_s) return a.n_s < b.n_s;
    return a.n_h < b.n_h;
  };
  return enumerate_best(c, own_feasible, n_h_lower, better);
}

}  // namespace uswb
