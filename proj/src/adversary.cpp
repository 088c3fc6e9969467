#include "countbench/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace countbench::adversary {

namespace {

double root(double x) { return std::sqrt(std::max(x, 0.0)); }

void check_schedule(const GammaSchedule& sched, const ProblemInstance& inst) {
  if (sched.k != inst.k || static_cast<int>(sched.gammas.size()) != inst.k + 1)
    throw UsageError("gamma schedule built for k = " + std::to_string(sched.k) + ", instance has k = " +
                     std::to_string(inst.k));
}

void check_phis(const GammaSchedule& sched, const PhiTable& phis) {
  if (phis.phi.size() != sched.gammas.size() || phis.phi_prime.size() != sched.gammas.size())
    throw UsageError("phi table and gamma schedule disagree on k");
}

}  // namespace

ProblemInstance ProblemInstance::make(int n, int k, int k_prime) {
  if (k < 1 || k_prime <= k) throw UsageError("ProblemInstance: need 1 <= k < k'");
  if (n < 2 * k_prime + 1) throw UsageError("ProblemInstance: need n >= 2k' + 1");
  ProblemInstance inst;
  inst.n = n;
  inst.k = k;
  inst.k_prime = k_prime;
  inst.eps = static_cast<double>(k_prime - k) / k;
  inst.theorem_regime = n >= 5 * k && inst.eps >= 1.0 / k && inst.eps <= 1.0;
  return inst;
}

ProblemInstance ProblemInstance::degenerate(int n, int k) {
  if (k < 1 || n < 2 * k + 1) throw UsageError("ProblemInstance: need k >= 1 and n >= 2k + 1");
  ProblemInstance inst;
  inst.n = n;
  inst.k = k;
  inst.k_prime = k;
  inst.eps = 0;
  inst.theorem_regime = false;
  return inst;
}

Vec4 phi_vector(int n, int k, int j) {
  if (j < 0 || j > k || n < 2 * k + 1) throw UsageError("phi_vector: need 0 <= j <= k and n >= 2k + 1");
  const double N = n;
  const double K = k;
  const double J = j;
  Vec4 phi;
  phi[0] = root(J * (K - J + 1) * (N - K - J + 1) / ((N - 2 * J + 2) * (N - 2 * J + 1) * K));
  phi[1] = std::sqrt(K / N);
  phi[2] = (N - 2 * K) / std::sqrt(N * K) * root(J * (N - J + 1) / ((N - 2 * J + 2) * (N - 2 * J)));
  phi[3] = root((N - J + 1) * (K - J) * (N - K - J) / ((N - 2 * J + 1) * (N - 2 * J) * K));
  return phi;
}

PhiTable phi_table(const ProblemInstance& inst) {
  PhiTable out;
  for (int j = 0; j <= inst.k; ++j) {
    out.phi.push_back(phi_vector(inst.n, inst.k, j));
    out.phi_prime.push_back(phi_vector(inst.n, inst.k_prime, j));
  }
  return out;
}

double GammaSchedule::at(int j) const {
  if (j < 0 || j > k) return 0.0;
  return gammas[static_cast<std::size_t>(j)];
}

GammaSchedule gamma_schedule(double t, int k) {
  if (!(t >= 1)) throw UsageError("gamma_schedule: need t >= 1");
  if (k < 0) throw UsageError("gamma_schedule: need k >= 0");
  GammaSchedule out;
  out.t = t;
  out.k = k;
  for (int j = 0; j <= k; ++j) out.gammas.push_back(std::max(1.0 - j / t, 0.0));
  return out;
}

TildeTable tilde_table(const GammaSchedule& sched, const PhiTable& phis) {
  check_phis(sched, phis);
  TildeTable out;
  for (int j = 0; j <= sched.k; ++j) {
    const Vec4 w(sched.at(j - 1), sched.at(j), sched.at(j), sched.at(j + 1));
    out.tilde.push_back(w.cwiseProduct(phis.phi[static_cast<std::size_t>(j)]));
    out.tilde_prime.push_back(w.cwiseProduct(phis.phi_prime[static_cast<std::size_t>(j)]));
  }
  return out;
}

MatrixXd assemble_adversary(const std::vector<double>& coeffs, const std::vector<johnson::Transporter>& transporters) {
  if (transporters.empty()) throw UsageError("assemble_adversary: no transporters");
  if (coeffs.size() != transporters.size()) throw UsageError("assemble_adversary: coefficient count mismatch");
  const auto rows = transporters.front().matrix.rows();
  const auto cols = transporters.front().matrix.cols();
  MatrixXd gamma = MatrixXd::Zero(rows, cols);
  for (std::size_t j = 0; j < transporters.size(); ++j) {
    const auto& phi = transporters[j].matrix;
    if (phi.rows() != rows || phi.cols() != cols) throw UsageError("assemble_adversary: transporter shapes differ");
    if (coeffs[j] != 0.0) gamma += coeffs[j] * phi;
  }
  return gamma;
}

MatrixXd assemble_adversary(const GammaSchedule& sched, const std::vector<johnson::Transporter>& transporters) {
  if (transporters.size() != sched.gammas.size())
    throw UsageError("assemble_adversary: expected one transporter per j = 0..k");
  return assemble_adversary(sched.gammas, transporters);
}

std::vector<double> hadamard_psi_step(const std::vector<double>& coeffs, const PhiTable& phis) {
  if (coeffs.size() != phis.phi.size()) throw UsageError("hadamard_psi_step: expected k + 1 coefficients");
  const int k = static_cast<int>(coeffs.size()) - 1;
  auto c = [&](int j) { return (j < 0 || j > k) ? 0.0 : coeffs[static_cast<std::size_t>(j)]; };
  std::vector<double> out(coeffs.size());
  for (int j = 0; j <= k; ++j) {
    const Vec4& p = phis.phi[static_cast<std::size_t>(j)];
    const Vec4& q = phis.phi_prime[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(j)] =
        c(j - 1) * p[0] * q[0] + c(j) * (p[1] * q[1] + p[2] * q[2]) + c(j + 1) * p[3] * q[3];
  }
  return out;
}

std::vector<double> hadamard_psi_step(const std::vector<double>& coeffs, const ProblemInstance& inst) {
  return hadamard_psi_step(coeffs, phi_table(inst));
}

std::pair<std::vector<double>, std::vector<double>> psi_coefficient_forms(const GammaSchedule& sched,
                                                                           const PhiTable& phis) {
  const TildeTable tl = tilde_table(sched, phis);
  std::vector<double> first;
  std::vector<double> second;
  for (std::size_t j = 0; j < phis.phi.size(); ++j) {
    first.push_back(phis.phi[j].dot(tl.tilde_prime[j]));
    second.push_back(phis.phi_prime[j].dot(tl.tilde[j]));
  }
  return {first, second};
}

double overlap_D(const ProblemInstance& inst, int j) {
  if (j < 0 || j > inst.k) throw UsageError("overlap_D: j out of range");
  return phi_vector(inst.n, inst.k, j).dot(phi_vector(inst.n, inst.k_prime, j));
}

double psi_power_lower_bound(const ProblemInstance& inst, double t, int ell) {
  if (ell < 0) throw UsageError("psi_power_lower_bound: need l >= 0");
  if (t < 2.0 * ell) throw UsageError("psi_power_lower_bound: need t >= 2l");
  double d = 1.0;
  for (int j = 0; j <= std::min(ell, inst.k); ++j) d = std::min(d, overlap_D(inst, j));
  return std::pow(d, ell) / 2;
}

std::vector<std::pair<double, double>> delta_state_gen_terms(const GammaSchedule& sched, const PhiTable& phis) {
  const TildeTable tl = tilde_table(sched, phis);
  std::vector<std::pair<double, double>> out;
  for (int j = 0; j <= sched.k; ++j) {
    const auto s = static_cast<std::size_t>(j);
    const double g = sched.at(j);
    out.emplace_back((tl.tilde_prime[s] - g * phis.phi[s]).norm(), (g * phis.phi_prime[s] - tl.tilde[s]).norm());
  }
  return out;
}

std::vector<double> delta_reflection_terms(const GammaSchedule& sched, const PhiTable& phis) {
  const TildeTable tl = tilde_table(sched, phis);
  std::vector<double> out;
  for (std::size_t j = 0; j < phis.phi.size(); ++j) {
    const Eigen::Matrix4d m =
        phis.phi_prime[j] * tl.tilde_prime[j].transpose() - tl.tilde[j] * phis.phi[j].transpose();
    out.push_back(linalg::spectral_norm(m));
  }
  return out;
}

std::vector<double> delta_membership_terms(const GammaSchedule& sched, const ProblemInstance& inst) {
  check_schedule(sched, inst);
  const double n = inst.n;
  const double k = inst.k;
  const double kp = inst.k_prime;
  std::vector<double> out;
  for (int j = 0; j <= inst.k; ++j) {
    const double J = j;
    const double a = root((k - J) * (n - kp - J)) / (n - 2 * J);
    const double b = root((kp - J) * (n - k - J)) / (n - 2 * J);
    const double g0 = sched.at(j);
    const double g1 = sched.at(j + 1);
    out.push_back(std::max(std::abs(a * g0 - b * g1), std::abs(b * g0 - a * g1)));
  }
  return out;
}

std::pair<double, double> norm_delta_state_gen(const GammaSchedule& sched, const ProblemInstance& inst) {
  check_schedule(sched, inst);
  double a = 0;
  double b = 0;
  for (const auto& [x, y] : delta_state_gen_terms(sched, phi_table(inst))) {
    a = std::max(a, x);
    b = std::max(b, y);
  }
  return {a, b};
}

double norm_delta_reflection(const GammaSchedule& sched, const ProblemInstance& inst) {
  check_schedule(sched, inst);
  const auto terms = delta_reflection_terms(sched, phi_table(inst));
  return *std::max_element(terms.begin(), terms.end());
}

double norm_delta_membership(const GammaSchedule& sched, const ProblemInstance& inst) {
  const auto terms = delta_membership_terms(sched, inst);
  return *std::max_element(terms.begin(), terms.end());
}

FeasibilityReport dual_feasibility_report(const ProblemInstance& inst, double t, int ell, double threshold) {
  const GammaSchedule sched = gamma_schedule(t, inst.k);
  FeasibilityReport out;
  out.t = t;
  out.ell = ell;
  out.threshold = threshold;
  out.gamma_norm = 0;
  for (double g : sched.gammas) out.gamma_norm = std::max(out.gamma_norm, std::abs(g));
  out.psi_lower_bound = psi_power_lower_bound(inst, t, ell);
  out.inv_T1 = norm_delta_membership(sched, inst);
  const auto gen = norm_delta_state_gen(sched, inst);
  out.inv_T2 = std::max(gen.first, gen.second);
  out.inv_T3 = norm_delta_reflection(sched, inst);
  out.psi_bound_ok = out.psi_lower_bound >= threshold;
  out.theorem_regime = inst.theorem_regime;
  out.t_within_k_over_5 = t <= inst.k / 5.0;
  return out;
}

BoundReport theorem_tradeoff(double n, double k, double eps, int ell, int ell_prime, const TradeoffConstants& constants,
                             double threshold) {
  if (!(n > 0) || !(k > 0) || !(eps > 0)) throw UsageError("theorem_tradeoff: n, k and eps must be positive");
  if (ell < 0 || ell_prime < 0) throw UsageError("theorem_tradeoff: l and l' must be nonnegative");
  if (!(constants.c_prime > 0)) throw UsageError("theorem_tradeoff: C' must be positive");
  if (!std::isfinite(n) || !std::isfinite(k) || !std::isfinite(eps))
    throw UsageError("theorem_tradeoff: parameters must be finite");

  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundReport r;
  r.n = n;
  r.k = k;
  r.eps = eps;
  r.ell = ell;
  r.ell_prime = ell_prime;
  r.c_prime = constants.c_prime;

  const double base = std::sqrt(n / k) / eps;
  r.copies = std::min({k, std::sqrt(k) / eps, n / (k * eps * eps)});
  const double by_copies = ell == 0 ? inf : std::sqrt(k / ell) / eps;
  r.state_generation = std::min({base, by_copies, std::cbrt(k) / std::pow(eps, 2.0 / 3.0)});
  const double by_uses = (ell + ell_prime) == 0 ? inf : std::sqrt(k / (ell + ell_prime)) / eps;
  r.reflection = std::min(base, by_uses);
  r.membership = base;
  r.fifth_threshold = std::sqrt(n / k);
  r.fifth_reflection = std::sqrt(k / eps);
  r.T1 = r.membership;
  r.T2 = r.state_generation;
  r.T3 = r.reflection;
  r.t = std::max({2.0 * ell, constants.c_prime * ell_prime, 1.0 / (5 * eps), 1.0});
  r.n_ge_5k = n >= 5 * k;
  r.eps_in_range = eps >= 1 / k && eps <= 1;
  r.in_regime = r.n_ge_5k && r.eps_in_range;

  const double kp = std::round(k * (1 + eps));
  const bool integral = k == std::floor(k) && k <= 1e6 && n == std::floor(n) && n <= 2e9;
  if (integral && kp > k && n >= 2 * kp + 1 && r.t >= 2.0 * ell) {
    const auto inst = ProblemInstance::make(static_cast<int>(n), static_cast<int>(k), static_cast<int>(kp));
    r.feasibility = dual_feasibility_report(inst, r.t, ell, threshold);
  }
  return r;
}

}  // namespace countbench::adversary
