#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace uswb {

// Vacuum permittivity [F/m].
inline constexpr double kEpsilon0 = 8.8542e-12;

// Information rate R = 1 / (N_s * N_h * Tc)  [bit/s].
double rate_bps(int n_h, int n_s, double tc_s);

// One ongoing link as seen by the SINR model.
struct LinkConfig {
  int id = 0;
  int n_h = 1;       // frame length [chips]
  int n_s = 1;       // code length [chips/bit]
  double power = 1.0;  // average power per pulse period
  double gain_to_victim = 1.0;  // g_{k,i} toward the receiver of interest
};

struct SinrInputs {
  double own_power = 1.0;  // P_i
  double own_gain = 1.0;   // g_{i,i}
  double eta = 0.0;        // background noise energy
  double sigma2 = 1.0;     // pulse-shape parameter of the interference term
  double tc_s = 5e-7;
};

// SINR of link i:
//   N_s * P_i g_ii N_h Tc / (eta + sigma^2 Tc sum_k (N_h / N_h_k) P_k g_ki)
double sinr(int n_h, int n_s, const SinrInputs& in,
            const std::vector<LinkConfig>& interferers);

// Solver-facing constraint set. Exactly one feasibility oracle is active:
// a closed-form SINR threshold or an externally supplied BER predicate.
struct AdaptConstraints {
  double r_min_bps = 1e3;
  int n_h_max = 15;
  int n_s_max = 20;
  double tc_s = 5e-7;
};

// Feasibility oracle over the integer grid: true if (n_h, n_s) satisfies the
// SINR/BER constraint at the modeled interference level.
using FeasibilityOracle = std::function<bool(int n_h, int n_s)>;

// Closed-form oracle for the implicitly cooperative problem: K symmetric
// interferers assumed to adopt the same candidate pair.
FeasibilityOracle sinr_oracle_implicit(const SinrInputs& in, int k_interferers,
                                       double interferer_power,
                                       double interferer_gain,
                                       double sinr_min);

// Tolerable-interference terms reported by the receiver of interfering
// link i (posynomial-form coefficients of its SINR constraint).
struct InterferenceReport {
  double gamma = 0.0;    // P_i g_ii Tc N_h_i N_s_i
  double delta = 0.0;    // sigma^2 Tc N_h_i sum_k P_k g_ik / N_h_k (k != r)
  double epsilon = 0.0;  // sigma^2 Tc P_r g_ir N_h_i
};

struct SolveResult {
  int n_h = 0;
  int n_s = 0;
  double rate = 0.0;
};

// Exhaustive rate-maximizing enumeration; ties broken by smaller N_s,
// then smaller N_h. Empty optional = infeasible.
std::optional<SolveResult> solve_implicit(const AdaptConstraints& c,
                                          const FeasibilityOracle& feasible);

// Rate maximization with per-interferer lower bounds on N_h derived from
// the reports: N_h >= eps_i / (gamma_i / SINR_min - eta - delta_i).
// A report whose denominator is <= 0 tolerates no extra interference.
std::optional<SolveResult> solve_explicit(
    const AdaptConstraints& c, const FeasibilityOracle& own_feasible,
    const std::vector<InterferenceReport>& reports, double sinr_min,
    double eta);

// Lower bound on N_h imposed by one report (+inf if intolerable).
double report_min_frame_length(const InterferenceReport& rep, double sinr_min,
                               double eta);

// Continuous relaxation of the cooperative program in log variables.
struct RelaxedSolution {
  double n_h = 0.0;
  double n_s = 0.0;
  double objective = 0.0;  // p*_rlx, inverse rate N_s*N_h*Tc [s/bit]
};

struct RelaxedProblem {
  AdaptConstraints constraints;
  double alpha = 1.0;       // P_r g_rr Tc
  double beta_sum = 0.0;    // sum_k sigma^2 Tc P_k g_rk / N_h_k
  double eta = 0.0;
  double sinr_min = 1.0;
  std::vector<InterferenceReport> reports;  // optional report-induced bounds
};

std::optional<RelaxedSolution> solve_relaxed(const RelaxedProblem& p);

// Threshold rounding of the relaxed point. On success returns the integer
// pair plus (L, U) bounds on the integer optimum of the inverse-rate
// objective; rejected if the rounded point is infeasible.
struct RoundedSolution {
  int n_h = 0;
  int n_s = 0;
  double lower = 0.0;  // L = p*_rlx
  double upper = 0.0;  // U = objective at the rounded point
};

std::optional<RoundedSolution> round_relaxed(const RelaxedSolution& rlx,
                                             double threshold,
                                             const AdaptConstraints& c,
                                             const FeasibilityOracle& feasible);

// Piezo disc transducer model.
struct PiezoParams {
  double c0_f = 0.0;     // static capacitance [F]; 0 = derive from (A, K, t_h)
  double area_m2 = 0.0;  // disc area
  double dielectric_k = 0.0;
  double thickness_m = 0.0;  // t_h
  double g33 = 0.0;          // piezoelectric voltage coefficient [V m / N]
  double p_out_pa = 0.0;     // driven output pressure
  double intensity_limit_w_m2 = 1e4;
  double rho = 1050.0;  // propagation medium density / sound speed for the
  double c = 1580.0;    // safety pressure cap

  double capacitance() const;
};

// Safety cap: P_RMS = sqrt(I * rho * c).
double max_safe_pressure(double intensity_limit_w_m2, double rho, double c);

// Energy per pulse E_p = C0 (g33 P t_h)^2; throws if the drive pressure
// exceeds the safety cap.
double pulse_energy(const PiezoParams& piezo);

struct EnergyMetrics {
  double e_b = 0.0;  // energy per bit [J]
  double e_s = 0.0;  // average emitted power [J/s]
};

// E_b = E_p * N_s ; E_s = E_p / (Tc * N_h).
EnergyMetrics energy_metrics(double e_p, int n_h, int n_s, double tc_s);

enum class EnergyObjective { kEnergyPerBit, kEnergyPerSecond };

// Enumeration minimizing E_b or E_s subject to the same feasibility
// constraints as solve_explicit. Ties: higher rate, then the other metric.
std::optional<SolveResult> solve_energy_min(
    EnergyObjective objective, double e_p, const AdaptConstraints& c,
    const FeasibilityOracle& own_feasible,
    const std::vector<InterferenceReport>& reports, double sinr_min,
    double eta);

}  // namespace uswb
