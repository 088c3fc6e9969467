#pragma once

// Explicit-matrix side: Psi, Delta_i, the six psi-lifts, V, the Pi
// projectors, the Xi transporters, and verify(), which compares each
// closed-form formula in adversary against a direct matrix computation.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "countbench/adversary.hpp"
#include "countbench/johnson.hpp"
#include "countbench/linalg.hpp"

namespace countbench::bruteforce {

using adversary::ProblemInstance;
using johnson::SubsetBasis;
using linalg::MatrixXd;
using linalg::VectorXd;

/// Largest lifted dimension C(n,k') * n a context may build.
inline constexpr long long kMaxLiftedDim = 20000;

/// Uniform superposition over the elements of s, as a length-n vector.
VectorXd psi_vector(johnson::Subset s, int n);
/// n x |Z| matrix whose columns are psi_z in basis order.
MatrixXd psi_columns(const SubsetBasis& basis);

/// |X| x |Y| matrix with entries |x ∩ y| / sqrt(k k').
MatrixXd psi_gram(const ProblemInstance& inst);
/// 0/1 matrix, 1 iff exactly one of x, y contains i (1-based).
MatrixXd delta_membership_mask(const ProblemInstance& inst, int i);

enum class LiftKind { RowPsi, RowPsiStar, RowPsiPsiStar, ColPsi, ColPsiStar, ColPsiPsiStar };
inline constexpr std::array<LiftKind, 6> kAllLiftKinds = {LiftKind::RowPsi,  LiftKind::RowPsiStar,
                                                          LiftKind::RowPsiPsiStar, LiftKind::ColPsi,
                                                          LiftKind::ColPsiStar, LiftKind::ColPsiPsiStar};

/// Replace each entry m[x,y] by m[x,y] psi_z, psi_z^T or psi_z psi_z^T, where z
/// is the row subset (Row kinds) or column subset (Col kinds) taken from
/// side_basis. Lifted indices (z, i) are laid out z-major: z*n + i.
MatrixXd lift(const MatrixXd& m, LiftKind kind, const SubsetBasis& side_basis);

/// (Pi_0, Pi_1) = (u u^T, I - u u^T) with u uniform of length n.
std::pair<MatrixXd, MatrixXd> build_projection_pair(int n);

// Element (l, m) of the index set {(1,-1), (0,0), (1,0), (1,1)}; position in
// this array is the phi component that multiplies the matching Xi.
struct XiIndex {
  int l;
  int m;
};
inline constexpr std::array<XiIndex, 4> kXiIndices = {XiIndex{1, -1}, XiIndex{0, 0}, XiIndex{1, 0}, XiIndex{1, 1}};

/// Precomputed scheme data for one instance, shared read-only by checks.
class InstanceContext {
 public:
  explicit InstanceContext(const ProblemInstance& inst);

  const ProblemInstance& instance() const { return inst_; }
  const SubsetBasis& X() const { return x_; }
  const SubsetBasis& Y() const { return y_; }
  const johnson::ProjectorFamily& family(bool hat) const { return hat ? large_ : small_; }
  const std::vector<johnson::Transporter>& transporters() const { return transporters_; }
  const MatrixXd& V(bool hat) const { return hat ? v_hat_ : v_; }
  const MatrixXd& psi() const { return psi_; }

  /// (E_{j+m} ⊗ Pi_l) V Q_j with Q_j the stored basis of E_j, so that
  /// Xi_j = K Q_j^T / ||K||. Zero columns for the declared border cases.
  MatrixXd xi_compact(bool hat, int j, int l, int m) const;
  /// Dense Xi_j^{l,m} and the normaliser ||(E_{j+m} ⊗ Pi_l) V E_j||.
  std::pair<MatrixXd, double> xi(bool hat, int j, int l, int m) const;

 private:
  ProblemInstance inst_;
  SubsetBasis x_;
  SubsetBasis y_;
  johnson::ProjectorFamily small_;
  johnson::ProjectorFamily large_;
  std::vector<johnson::Transporter> transporters_;
  MatrixXd v_;
  MatrixXd v_hat_;
  MatrixXd psi_;
  MatrixXd psi_hat_;
};

/// Dense Xi_j^{l,m} on the k side. Throws UsageError for (l,m) outside the index set.
MatrixXd build_Xi(const ProblemInstance& inst, int j, int l, int m);

enum class CheckId {
  PSI_COEFFS,
  DELTA_GEN,
  DELTA_REFL,
  DELTA_MEMB,
  V_DECOMP,
  PHI_COMMUTE,
  TABLES,
  PROJECTORS,
  NORM_GAMMA,
  PSI_POWER,
};
inline constexpr std::array<CheckId, 10> kAllChecks = {
    CheckId::PSI_COEFFS, CheckId::DELTA_GEN, CheckId::DELTA_REFL,  CheckId::DELTA_MEMB, CheckId::V_DECOMP,
    CheckId::PHI_COMMUTE, CheckId::TABLES,   CheckId::PROJECTORS, CheckId::NORM_GAMMA, CheckId::PSI_POWER};

std::string_view check_name(CheckId id);
CheckId check_from_name(std::string_view name);
/// Short label of the statement a check validates, for reports.
std::string_view check_statement(CheckId id);
/// Norm comparisons use the norm tolerance, algebraic identities the exact one.
bool is_norm_check(CheckId id);

struct Tolerances {
  double norm = 1e-8;
  double exact = 1e-10;
};

struct DiscrepancyReport {
  CheckId check = CheckId::PSI_COEFFS;
  int n = 0;
  int k = 0;
  int k_prime = 0;
  double t = 1;
  int ell = 0;
  double closed_form = 0;
  double brute_force = 0;
  double discrepancy = 0;
  double tolerance = 0;
  bool pass = false;
  double spread = 0;  // DELTA_MEMB: max - min of the per-i brute-force norms
  double millis = 0;
};

DiscrepancyReport verify(CheckId check, const InstanceContext& ctx, double t, int ell, const Tolerances& tol = {});
DiscrepancyReport verify(CheckId check, const ProblemInstance& inst, double t, int ell, const Tolerances& tol = {});

/// Brute-force ||Gamma ∘ Delta_i|| for every i in [n].
std::vector<double> membership_norms(const InstanceContext& ctx, const MatrixXd& gamma);
/// Brute-force (||Gamma ∘ Delta_psi||, ||Gamma ∘ Delta_psi*||).
std::pair<double, double> state_gen_norms(const InstanceContext& ctx, const MatrixXd& gamma);
/// Brute-force ||Gamma ∘ Delta_psipsi*||, evaluated through the factorisation
/// [V | col-psi(Gamma)] [row-psi*(Gamma); -V'^T].
double reflection_norm(const InstanceContext& ctx, const MatrixXd& gamma);
/// tr(Phi_j^T M) / d_j for each j.
std::vector<double> phi_coefficients(const InstanceContext& ctx, const MatrixXd& m);

}  // namespace countbench::bruteforce
