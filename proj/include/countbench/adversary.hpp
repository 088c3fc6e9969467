#pragma once

// Closed-form side of the construction: the phi coefficient vectors, the
// gamma schedule, Gamma = sum_j gamma_j Phi_j, the four Delta-norm formulas,
// the Psi-Hadamard recurrence and the resource tradeoff of the main theorem.

#include <optional>
#include <utility>
#include <vector>

#include "countbench/johnson.hpp"
#include "countbench/linalg.hpp"

namespace countbench::adversary {

using linalg::MatrixXd;
using Vec4 = Eigen::Vector4d;

struct ProblemInstance {
  int n = 0;
  int k = 0;
  int k_prime = 0;
  double eps = 0;               // (k' - k) / k
  bool theorem_regime = false;  // n >= 5k and 1/k <= eps <= 1

  /// Validates 1 <= k < k' and n >= 2k' + 1.
  static ProblemInstance make(int n, int k, int k_prime);
  /// k' = k, eps = 0. Only meaningful for the closed-form formulas.
  static ProblemInstance degenerate(int n, int k);
};

struct PhiTable {
  std::vector<Vec4> phi;        // j = 0..k
  std::vector<Vec4> phi_prime;  // same with k' in place of k
};

/// The four coefficients (phi_{j,0}, ..., phi_{j,3}) at size parameter k.
Vec4 phi_vector(int n, int k, int j);
PhiTable phi_table(const ProblemInstance& inst);

struct GammaSchedule {
  double t = 1;
  int k = 0;
  std::vector<double> gammas;  // gamma_0 .. gamma_k

  /// gamma_j, with gamma_j = 0 outside 0..k (covers gamma_{k+1} and the
  /// irrelevant gamma_{-1}).
  double at(int j) const;
};

GammaSchedule gamma_schedule(double t, int k);

struct TildeTable {
  std::vector<Vec4> tilde;
  std::vector<Vec4> tilde_prime;
};

TildeTable tilde_table(const GammaSchedule& sched, const PhiTable& phis);

MatrixXd assemble_adversary(const GammaSchedule& sched, const std::vector<johnson::Transporter>& transporters);
/// Same with arbitrary coefficients, one per transporter.
MatrixXd assemble_adversary(const std::vector<double>& coeffs, const std::vector<johnson::Transporter>& transporters);

/// Coefficients of (sum_j c_j Phi_j) ∘ Psi in the Phi_j basis.
std::vector<double> hadamard_psi_step(const std::vector<double>& coeffs, const ProblemInstance& inst);
std::vector<double> hadamard_psi_step(const std::vector<double>& coeffs, const PhiTable& phis);

/// Both forms <phi_j, tilde phi'_j> and <phi'_j, tilde phi_j>, per j.
std::pair<std::vector<double>, std::vector<double>> psi_coefficient_forms(const GammaSchedule& sched,
                                                                           const PhiTable& phis);

double overlap_D(const ProblemInstance& inst, int j);
/// D^l / 2 with D the smallest D_j over 0 <= j <= min(l, k). Needs t >= 2l.
double psi_power_lower_bound(const ProblemInstance& inst, double t, int ell);

// Per-j terms of the norm formulas; the norms are their maxima.
std::vector<std::pair<double, double>> delta_state_gen_terms(const GammaSchedule& sched, const PhiTable& phis);
std::vector<double> delta_reflection_terms(const GammaSchedule& sched, const PhiTable& phis);
std::vector<double> delta_membership_terms(const GammaSchedule& sched, const ProblemInstance& inst);

/// (||Gamma ∘ Delta_psi||, ||Gamma ∘ Delta_psi*||).
std::pair<double, double> norm_delta_state_gen(const GammaSchedule& sched, const ProblemInstance& inst);
double norm_delta_reflection(const GammaSchedule& sched, const ProblemInstance& inst);
double norm_delta_membership(const GammaSchedule& sched, const ProblemInstance& inst);

inline constexpr double kDefaultFeasibilityThreshold = 0.25;

struct FeasibilityReport {
  double t = 0;
  int ell = 0;
  double gamma_norm = 0;       // max_j |gamma_j|
  double psi_lower_bound = 0;  // D^l / 2
  double inv_T1 = 0;           // membership norm
  double inv_T2 = 0;           // max of the two state-generation norms
  double inv_T3 = 0;           // reflection norm
  double threshold = kDefaultFeasibilityThreshold;
  bool psi_bound_ok = false;   // psi_lower_bound >= threshold
  bool theorem_regime = false;
  bool t_within_k_over_5 = false;
};

FeasibilityReport dual_feasibility_report(const ProblemInstance& inst, double t, int ell,
                                          double threshold = kDefaultFeasibilityThreshold);

struct TradeoffConstants {
  double c_prime = 8;
};

struct BoundReport {
  double n = 0;
  double k = 0;
  double eps = 0;
  int ell = 0;
  int ell_prime = 0;
  // Branch values of the theorem. Terms that are vacuous (l = 0, or
  // l + l' = 0) are dropped from their minimum.
  double copies = 0;
  double state_generation = 0;
  double reflection = 0;
  double membership = 0;
  double fifth_threshold = 0;   // sqrt(n/k)
  double fifth_reflection = 0;  // sqrt(k/eps)
  // Query-weight reading: T1 membership, T2 state generation, T3 reflection,
  // with weights 1/T_i.
  double T1 = 0;
  double T2 = 0;
  double T3 = 0;
  double c_prime = 8;
  double t = 1;  // max{2l, C' l', 1/(5 eps)}, clamped to >= 1
  bool n_ge_5k = false;
  bool eps_in_range = false;
  bool in_regime = false;
  /// Closed-form feasibility at k' = round(k(1+eps)), when that instance is valid.
  std::optional<FeasibilityReport> feasibility;
};

BoundReport theorem_tradeoff(double n, double k, double eps, int ell, int ell_prime,
                             const TradeoffConstants& constants = {},
                             double threshold = kDefaultFeasibilityThreshold);

}  // namespace countbench::adversary
