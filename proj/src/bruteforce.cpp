#include "countbench/bruteforce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace countbench::bruteforce {

using adversary::GammaSchedule;
using adversary::PhiTable;

VectorXd psi_vector(johnson::Subset s, int n) {
  const int size = johnson::subset_size(s);
  if (size == 0) throw UsageError("psi_vector: empty set");
  VectorXd v = VectorXd::Zero(n);
  const double w = 1.0 / std::sqrt(static_cast<double>(size));
  for (int e : johnson::elements_of(s)) {
    if (e > n) throw UsageError("psi_vector: element exceeds n");
    v[e - 1] = w;
  }
  return v;
}

MatrixXd psi_columns(const SubsetBasis& basis) {
  MatrixXd p(basis.n(), basis.size());
  for (Eigen::Index z = 0; z < basis.size(); ++z) p.col(z) = psi_vector(basis.at(z), basis.n());
  return p;
}

MatrixXd psi_gram(const ProblemInstance& inst) {
  const SubsetBasis x(inst.n, inst.k);
  const SubsetBasis y(inst.n, inst.k_prime);
  const double scale = 1.0 / std::sqrt(static_cast<double>(inst.k) * inst.k_prime);
  MatrixXd g(x.size(), y.size());
  for (Eigen::Index c = 0; c < y.size(); ++c)
    for (Eigen::Index r = 0; r < x.size(); ++r) g(r, c) = johnson::subset_size(x.at(r) & y.at(c)) * scale;
  return g;
}

namespace {

MatrixXd membership_mask(const SubsetBasis& x, const SubsetBasis& y, int i) {
  const johnson::Subset bit = johnson::singleton(i);
  MatrixXd mask(x.size(), y.size());
  for (Eigen::Index c = 0; c < y.size(); ++c) {
    const bool in_y = (y.at(c) & bit) != 0;
    for (Eigen::Index r = 0; r < x.size(); ++r) mask(r, c) = (((x.at(r) & bit) != 0) != in_y) ? 1.0 : 0.0;
  }
  return mask;
}

}  // namespace

MatrixXd delta_membership_mask(const ProblemInstance& inst, int i) {
  if (i < 1 || i > inst.n) throw UsageError("delta_membership_mask: i out of range");
  return membership_mask(SubsetBasis(inst.n, inst.k), SubsetBasis(inst.n, inst.k_prime), i);
}

MatrixXd lift(const MatrixXd& m, LiftKind kind, const SubsetBasis& side_basis) {
  const bool row_side = kind == LiftKind::RowPsi || kind == LiftKind::RowPsiStar || kind == LiftKind::RowPsiPsiStar;
  const Eigen::Index side = row_side ? m.rows() : m.cols();
  if (side != side_basis.size()) throw UsageError("lift: basis size does not match the lifted side");
  const Eigen::Index n = side_basis.n();
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  const MatrixXd psi = psi_columns(side_basis);
  auto psi_of = [&](Eigen::Index x, Eigen::Index y) { return psi.col(row_side ? x : y); };

  MatrixXd out;
  switch (kind) {
    case LiftKind::RowPsi:
    case LiftKind::ColPsi:
      out = MatrixXd::Zero(rows * n, cols);
      for (Eigen::Index y = 0; y < cols; ++y)
        for (Eigen::Index x = 0; x < rows; ++x)
          if (m(x, y) != 0.0) out.col(y).segment(x * n, n) = m(x, y) * psi_of(x, y);
      break;
    case LiftKind::RowPsiStar:
    case LiftKind::ColPsiStar:
      out = MatrixXd::Zero(rows, cols * n);
      for (Eigen::Index y = 0; y < cols; ++y)
        for (Eigen::Index x = 0; x < rows; ++x)
          if (m(x, y) != 0.0) out.row(x).segment(y * n, n) = m(x, y) * psi_of(x, y).transpose();
      break;
    case LiftKind::RowPsiPsiStar:
    case LiftKind::ColPsiPsiStar:
      out = MatrixXd::Zero(rows * n, cols * n);
      for (Eigen::Index y = 0; y < cols; ++y)
        for (Eigen::Index x = 0; x < rows; ++x)
          if (m(x, y) != 0.0) {
            const VectorXd p = psi_of(x, y);
            out.block(x * n, y * n, n, n) = m(x, y) * p * p.transpose();
          }
      break;
  }
  return out;
}

std::pair<MatrixXd, MatrixXd> build_projection_pair(int n) {
  if (n < 2) throw UsageError("build_projection_pair: need n >= 2");
  const MatrixXd pi0 = MatrixXd::Constant(n, n, 1.0 / n);
  return {pi0, MatrixXd::Identity(n, n) - pi0};
}

InstanceContext::InstanceContext(const ProblemInstance& inst)
    : inst_(inst),
      x_([&] {
        const long long dim = johnson::binomial(inst.n, inst.k_prime) * inst.n;
        if (dim > kMaxLiftedDim)
          throw UsageError("instance (" + std::to_string(inst.n) + "," + std::to_string(inst.k) + "," +
                           std::to_string(inst.k_prime) + ") has lifted dimension " + std::to_string(dim) +
                           " > " + std::to_string(kMaxLiftedDim));
        return SubsetBasis(inst.n, inst.k);
      }()),
      y_(inst.n, inst.k_prime),
      small_(johnson::irrep_projectors(inst.n, inst.k)),
      large_(johnson::irrep_projectors(inst.n, inst.k_prime)) {
  for (int j = 0; j <= inst.k; ++j) transporters_.push_back(johnson::transporter(small_, large_, j));
  v_ = lift(MatrixXd::Identity(x_.size(), x_.size()), LiftKind::RowPsi, x_);
  v_hat_ = lift(MatrixXd::Identity(y_.size(), y_.size()), LiftKind::RowPsi, y_);
  psi_ = psi_columns(x_);
  psi_hat_ = psi_columns(y_);
}

namespace {

bool valid_index(int l, int m) {
  return std::any_of(kXiIndices.begin(), kXiIndices.end(), [&](const XiIndex& i) { return i.l == l && i.m == m; });
}

bool is_border(int j, int m, int l, int k) {
  return j + m < 0 || j + m > k || (j == 0 && l == 1 && m == 0);
}

}  // namespace

MatrixXd InstanceContext::xi_compact(bool hat, int j, int l, int m) const {
  if (!valid_index(l, m)) throw UsageError("Xi: (l,m) must be one of (1,-1), (0,0), (1,0), (1,1)");
  const auto& fam = family(hat);
  if (j < 0 || j > fam.k) throw UsageError("Xi: j out of range");
  const MatrixXd& q = fam.bases[static_cast<std::size_t>(j)];
  const Eigen::Index n = inst_.n;
  const Eigen::Index z = q.rows();
  if (is_border(j, m, l, fam.k)) return MatrixXd::Zero(z * n, q.cols());

  const MatrixXd& target = fam.bases[static_cast<std::size_t>(j + m)];
  const MatrixXd& psi = hat ? psi_hat_ : psi_;
  MatrixXd out(z * n, q.cols());
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    // Column c of V Q_j viewed as n x |Z|: column z is Q_j[z,c] psi_z. Then
    // (E ⊗ Pi) acts on that view as Pi * block * E^T, with E = Q Q^T.
    MatrixXd rows = psi * q.col(c).asDiagonal();
    const Eigen::RowVectorXd mean = rows.colwise().mean();
    if (l == 0)
      rows = mean.replicate(n, 1);
    else
      rows.rowwise() -= mean;
    Eigen::Map<MatrixXd> dst(out.col(c).data(), n, z);
    dst.noalias() = (rows * target) * target.transpose();
  }
  return out;
}

std::pair<MatrixXd, double> InstanceContext::xi(bool hat, int j, int l, int m) const {
  const MatrixXd k = xi_compact(hat, j, l, m);
  const auto& fam = family(hat);
  const MatrixXd& q = fam.bases[static_cast<std::size_t>(j)];
  if (is_border(j, m, l, fam.k)) return {MatrixXd::Zero(k.rows(), q.rows()), 0.0};
  const double norm = linalg::spectral_norm(k);
  if (norm < 1e-12) throw DegenerateError("Xi: (E ⊗ Pi) V E_j vanishes outside the border cases");
  return {k * q.transpose() / norm, norm};
}

MatrixXd build_Xi(const ProblemInstance& inst, int j, int l, int m) {
  if (!valid_index(l, m)) throw UsageError("build_Xi: (l,m) must be one of (1,-1), (0,0), (1,0), (1,1)");
  return InstanceContext(inst).xi(false, j, l, m).first;
}

std::string_view check_name(CheckId id) {
  switch (id) {
    case CheckId::PSI_COEFFS: return "PSI_COEFFS";
    case CheckId::DELTA_GEN: return "DELTA_GEN";
    case CheckId::DELTA_REFL: return "DELTA_REFL";
    case CheckId::DELTA_MEMB: return "DELTA_MEMB";
    case CheckId::V_DECOMP: return "V_DECOMP";
    case CheckId::PHI_COMMUTE: return "PHI_COMMUTE";
    case CheckId::TABLES: return "TABLES";
    case CheckId::PROJECTORS: return "PROJECTORS";
    case CheckId::NORM_GAMMA: return "NORM_GAMMA";
    case CheckId::PSI_POWER: return "PSI_POWER";
  }
  return "?";
}

CheckId check_from_name(std::string_view name) {
  for (CheckId id : kAllChecks)
    if (check_name(id) == name) return id;
  throw UsageError("unknown check id '" + std::string(name) + "'");
}

std::string_view check_statement(CheckId id) {
  switch (id) {
    case CheckId::PSI_COEFFS: return "Gamma∘Psi = sum_j <phi_j, tilde phi'_j> Phi_j = sum_j <phi'_j, tilde phi_j> Phi_j";
    case CheckId::DELTA_GEN: return "||Gamma∘Delta_psi|| = max_j ||tilde phi'_j - gamma_j phi_j||, mirrored for psi*";
    case CheckId::DELTA_REFL: return "||Gamma∘Delta_psipsi*|| = max_j ||phi'_j tilde phi'_j^T - tilde phi_j phi_j^T||";
    case CheckId::DELTA_MEMB: return "||Gamma∘Delta_i|| two-branch max formula, for all i in [n]";
    case CheckId::V_DECOMP: return "V = sum_j (phi_j0 Xi^{1,-1} + phi_j1 Xi^{0,0} + phi_j2 Xi^{1,0} + phi_j3 Xi^{1,1})";
    case CheckId::PHI_COMMUTE: return "(Phi_{j+m} ⊗ I) hat Xi_j^{l,m} = Xi_j^{l,m} Phi_j";
    case CheckId::TABLES: return "basis-change coefficients between {v, v~}, {w_o, w_i} and the two-fixed bases";
    case CheckId::PROJECTORS: return "Johnson scheme decomposition into S_n irreps S^(n-j,j)";
    case CheckId::NORM_GAMMA: return "||Gamma|| = max_j |gamma_j|";
    case CheckId::PSI_POWER: return "||Gamma∘Psi^{∘l}|| >= D^l / 2";
  }
  return "?";
}

bool is_norm_check(CheckId id) {
  switch (id) {
    case CheckId::DELTA_GEN:
    case CheckId::DELTA_REFL:
    case CheckId::DELTA_MEMB:
    case CheckId::NORM_GAMMA:
    case CheckId::PSI_POWER:
      return true;
    default:
      return false;
  }
}

std::vector<double> phi_coefficients(const InstanceContext& ctx, const MatrixXd& m) {
  std::vector<double> out;
  const auto& fam = ctx.family(false);
  for (std::size_t j = 0; j < ctx.transporters().size(); ++j) {
    const MatrixXd& phi = ctx.transporters()[j].matrix;
    if (phi.rows() != m.rows() || phi.cols() != m.cols()) throw UsageError("phi_coefficients: shape mismatch");
    out.push_back(phi.cwiseProduct(m).sum() / fam.rank(static_cast<int>(j)));
  }
  return out;
}

std::vector<double> membership_norms(const InstanceContext& ctx, const MatrixXd& gamma) {
  std::vector<double> out;
  for (int i = 1; i <= ctx.instance().n; ++i)
    out.push_back(linalg::spectral_norm(gamma.cwiseProduct(membership_mask(ctx.X(), ctx.Y(), i))));
  return out;
}

std::pair<double, double> state_gen_norms(const InstanceContext& ctx, const MatrixXd& gamma) {
  const MatrixXd d_psi = lift(gamma, LiftKind::RowPsi, ctx.X()) - lift(gamma, LiftKind::ColPsi, ctx.Y());
  const MatrixXd d_psi_star = lift(gamma, LiftKind::RowPsiStar, ctx.X()) - lift(gamma, LiftKind::ColPsiStar, ctx.Y());
  return {linalg::spectral_norm(d_psi), linalg::spectral_norm(d_psi_star)};
}

double reflection_norm(const InstanceContext& ctx, const MatrixXd& gamma) {
  // row-psipsi*(Gamma) = V row-psi*(Gamma) and col-psipsi*(Gamma) = col-psi(Gamma) V'^T.
  const MatrixXd a = lift(gamma, LiftKind::RowPsiStar, ctx.X());
  const MatrixXd b = lift(gamma, LiftKind::ColPsi, ctx.Y());
  const MatrixXd& v = ctx.V(false);
  const MatrixXd& vh = ctx.V(true);
  MatrixXd left(v.rows(), v.cols() + b.cols());
  left << v, b;
  MatrixXd right(a.rows() + vh.cols(), a.cols());
  right << a, -vh.transpose();
  return linalg::product_spectral_norm(left, right);
}

namespace {

double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct Outcome {
  double closed = 0;
  double brute = 0;
  double discrepancy = 0;
  double spread = 0;
};

Outcome check_psi_coeffs(const InstanceContext& ctx, const GammaSchedule& sched, const PhiTable& phis,
                         const MatrixXd& gamma, int ell) {
  const MatrixXd psi = psi_gram(ctx.instance());
  Outcome o;
  const auto forms = adversary::psi_coefficient_forms(sched, phis);
  for (std::size_t j = 0; j < forms.first.size(); ++j)
    o.discrepancy = std::max(o.discrepancy, std::abs(forms.first[j] - forms.second[j]));

  std::vector<double> closed = sched.gammas;
  MatrixXd m = gamma;
  for (int s = 1; s <= std::max(1, ell); ++s) {
    closed = adversary::hadamard_psi_step(closed, phis);
    m = m.cwiseProduct(psi);
    const std::vector<double> brute = phi_coefficients(ctx, m);
    for (std::size_t j = 0; j < closed.size(); ++j)
      o.discrepancy = std::max(o.discrepancy, std::abs(closed[j] - brute[j]));
    // Gamma∘Psi^s must lie in the span of the Phi_j with exactly these coefficients.
    o.discrepancy = std::max(o.discrepancy, max_abs(m - adversary::assemble_adversary(brute, ctx.transporters())));
    o.closed = 0;
    o.brute = 0;
    for (std::size_t j = 0; j < closed.size(); ++j) {
      o.closed = std::max(o.closed, std::abs(closed[j]));
      o.brute = std::max(o.brute, std::abs(brute[j]));
    }
  }
  return o;
}

Outcome check_v_decomp(const InstanceContext& ctx) {
  Outcome o;
  for (bool hat : {false, true}) {
    const MatrixXd& v = ctx.V(hat);
    const auto& fam = ctx.family(hat);
    // V - sum_j sum_i phi_{j,i} Xi_j^i = sum_j R_j Q_j^T with
    // R_j = V Q_j - sum_i phi_{j,i} K_i / ||K_i||. The Q_j have orthonormal,
    // mutually orthogonal columns, so the Frobenius norm of the residual is
    // the root-sum-square of the ||R_j||_F, and it bounds every entry.
    double residual_sq = 0;
    double recomposed_sq = 0;
    // The hatted side runs over j = 0..k', beyond the range of the instance's phi table.
    for (int j = 0; j <= fam.k; ++j) {
      const MatrixXd& q = fam.bases[static_cast<std::size_t>(j)];
      const adversary::Vec4 coeffs = adversary::phi_vector(fam.n, fam.k, j);
      MatrixXd recomposed = MatrixXd::Zero(v.rows(), q.cols());
      for (std::size_t i = 0; i < kXiIndices.size(); ++i) {
        const auto [l, m] = kXiIndices[i];
        const double phi = coeffs[static_cast<Eigen::Index>(i)];
        const MatrixXd k = ctx.xi_compact(hat, j, l, m);
        const double norm = linalg::spectral_norm(k);
        o.discrepancy = std::max(o.discrepancy, std::abs(norm - phi));
        if (is_border(j, m, l, fam.k) || norm < 1e-12) continue;
        recomposed += (phi / norm) * k;
      }
      residual_sq += (v * q - recomposed).squaredNorm();
      recomposed_sq += recomposed.squaredNorm();
    }
    o.discrepancy = std::max(o.discrepancy, std::sqrt(residual_sq));
    // ||V||_F^2 = |Z| for an isometry.
    o.closed = std::max(o.closed, std::sqrt(recomposed_sq));
    o.brute = std::max(o.brute, v.norm());
  }
  return o;
}

Outcome check_phi_commute(const InstanceContext& ctx) {
  Outcome o;
  const int k = ctx.instance().k;
  const Eigen::Index n = ctx.instance().n;
  const MatrixXd id = MatrixXd::Identity(n, n);
  const auto& small = ctx.family(false);
  const auto& large = ctx.family(true);
  const auto& phis = ctx.transporters();
  for (int j = 0; j <= k; ++j) {
    const MatrixXd& q = small.bases[static_cast<std::size_t>(j)];
    const MatrixXd& qh = large.bases[static_cast<std::size_t>(j)];
    const MatrixXd& phi_j = phis[static_cast<std::size_t>(j)].matrix;
    // Phi_j restricted to the stored bases; Phi_j = Q_j C Q'_j^T.
    const MatrixXd c = q.transpose() * phi_j * qh;
    for (const auto [l, m] : kXiIndices) {
      if (is_border(j, m, l, k)) continue;
      const MatrixXd& phi_jm = phis[static_cast<std::size_t>(j + m)].matrix;
      const MatrixXd kx = ctx.xi_compact(false, j, l, m);
      const MatrixXd kh = ctx.xi_compact(true, j, l, m);
      const double nx = linalg::spectral_norm(kx);
      const double nh = linalg::spectral_norm(kh);
      // (Phi_{j+m} ⊗ I) hat Xi_j - Xi_j Phi_j, written against Q'_j^T on the right.
      const MatrixXd forward = linalg::kron_apply(phi_jm, id, kh) / nh - kx * c / nx;
      // (Phi_{j+m}^T ⊗ I) Xi_j - hat Xi_j Phi_j^T, written against Q_j^T on the right.
      const MatrixXd backward = linalg::kron_apply(phi_jm.transpose(), id, kx) / nx - kh * c.transpose() / nh;
      o.discrepancy = std::max({o.discrepancy, linalg::spectral_norm(forward), linalg::spectral_norm(backward)});
    }
  }
  return o;
}

Outcome check_tables(const ProblemInstance& inst) {
  Outcome o;
  for (int kk : {inst.k, inst.k_prime}) {
    for (int j = 0; j <= kk; ++j) {
      const auto [t1, t2] = johnson::basis_change_tables(inst.n, kk, j);
      const johnson::ReferenceVectors r = johnson::reference_vectors(inst.n, kk, j);
      auto unit = [&](const VectorXd& v) { o.discrepancy = std::max(o.discrepancy, std::abs(v.norm() - 1)); };
      o.discrepancy = std::max(o.discrepancy, max_abs(t1.transpose() * t1 - MatrixXd::Identity(2, 2)));

      const std::array<const VectorXd*, 2> rows1 = {&r.w_circ, r.w_bullet ? &*r.w_bullet : nullptr};
      const std::array<const VectorXd*, 2> cols1 = {&r.v, r.v_tilde ? &*r.v_tilde : nullptr};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (rows1[a] && cols1[b])
            o.discrepancy = std::max(o.discrepancy, std::abs(rows1[a]->dot(*cols1[b]) - t1(a, b)));
      for (const auto* p : rows1)
        if (p) unit(*p);
      for (const auto* p : cols1)
        if (p) unit(*p);

      if (r.has_two_fixed) {
        o.discrepancy = std::max(o.discrepancy, max_abs(t2.transpose() * t2 - MatrixXd::Identity(4, 4)));
        const std::array<const VectorXd*, 4> rows2 = {&r.w_empty, &r.w_c, &r.w_d, r.w_cd ? &*r.w_cd : nullptr};
        const std::array<const VectorXd*, 4> cols2 = {&r.v_minus, &r.v, &r.v_zero, r.v_plus ? &*r.v_plus : nullptr};
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            if (rows2[a] && cols2[b])
              o.discrepancy = std::max(o.discrepancy, std::abs(rows2[a]->dot(*cols2[b]) - t2(a, b)));
        for (const auto* p : rows2)
          if (p) unit(*p);
        for (const auto* p : cols2)
          if (p) unit(*p);
      }
    }
  }
  return o;
}

Outcome check_projectors(const InstanceContext& ctx) {
  Outcome o;
  const int n = ctx.instance().n;
  for (bool hat : {false, true}) {
    const auto& fam = ctx.family(hat);
    const Eigen::Index dim = fam.projectors.front().rows();
    MatrixXd total = MatrixXd::Zero(dim, dim);
    for (int i = 0; i <= fam.k; ++i) {
      const MatrixXd& e = fam.projectors[static_cast<std::size_t>(i)];
      total += e;
      o.discrepancy = std::max({o.discrepancy, max_abs(e * e - e), max_abs(e - e.transpose())});
      for (int j = i + 1; j <= fam.k; ++j)
        o.discrepancy = std::max(o.discrepancy, max_abs(e * fam.projectors[static_cast<std::size_t>(j)]));
      const auto expected = johnson::binomial(n, i) - johnson::binomial(n, i - 1);
      o.discrepancy = std::max(o.discrepancy, std::abs(static_cast<double>(fam.rank(i) - expected)));
    }
    o.discrepancy = std::max(o.discrepancy, max_abs(total - MatrixXd::Identity(dim, dim)));
  }
  // Transporters are partial isometries between the matching isotypic components.
  for (const auto& phi : ctx.transporters()) {
    const auto j = static_cast<std::size_t>(phi.j);
    o.discrepancy = std::max({o.discrepancy,
                              max_abs(phi.matrix.transpose() * phi.matrix - ctx.family(true).projectors[j]),
                              max_abs(phi.matrix * phi.matrix.transpose() - ctx.family(false).projectors[j])});
  }
  return o;
}

}  // namespace

DiscrepancyReport verify(CheckId check, const InstanceContext& ctx, double t, int ell, const Tolerances& tol) {
  const auto start = std::chrono::steady_clock::now();
  const ProblemInstance& inst = ctx.instance();
  if (ell < 0) throw UsageError("verify: l must be nonnegative");
  const GammaSchedule sched = adversary::gamma_schedule(t, inst.k);
  const PhiTable phis = adversary::phi_table(inst);

  DiscrepancyReport rep;
  rep.check = check;
  rep.n = inst.n;
  rep.k = inst.k;
  rep.k_prime = inst.k_prime;
  rep.t = t;
  rep.ell = ell;
  rep.tolerance = is_norm_check(check) ? tol.norm : tol.exact;

  Outcome o;
  switch (check) {
    case CheckId::PSI_COEFFS:
      o = check_psi_coeffs(ctx, sched, phis, adversary::assemble_adversary(sched, ctx.transporters()), ell);
      break;
    case CheckId::DELTA_GEN: {
      const auto closed = adversary::norm_delta_state_gen(sched, inst);
      const auto brute = state_gen_norms(ctx, adversary::assemble_adversary(sched, ctx.transporters()));
      o.closed = std::max(closed.first, closed.second);
      o.brute = std::max(brute.first, brute.second);
      o.discrepancy = std::max(std::abs(closed.first - brute.first), std::abs(closed.second - brute.second));
      break;
    }
    case CheckId::DELTA_REFL:
      o.closed = adversary::norm_delta_reflection(sched, inst);
      o.brute = reflection_norm(ctx, adversary::assemble_adversary(sched, ctx.transporters()));
      o.discrepancy = std::abs(o.closed - o.brute);
      break;
    case CheckId::DELTA_MEMB: {
      o.closed = adversary::norm_delta_membership(sched, inst);
      const auto norms = membership_norms(ctx, adversary::assemble_adversary(sched, ctx.transporters()));
      const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
      o.brute = *hi;
      o.spread = *hi - *lo;
      for (double v : norms) o.discrepancy = std::max(o.discrepancy, std::abs(v - o.closed));
      break;
    }
    case CheckId::V_DECOMP:
      o = check_v_decomp(ctx);
      break;
    case CheckId::PHI_COMMUTE:
      o = check_phi_commute(ctx);
      break;
    case CheckId::TABLES:
      o = check_tables(inst);
      break;
    case CheckId::PROJECTORS:
      o = check_projectors(ctx);
      break;
    case CheckId::NORM_GAMMA:
      o.closed = 0;
      for (double g : sched.gammas) o.closed = std::max(o.closed, std::abs(g));
      o.brute = linalg::spectral_norm(adversary::assemble_adversary(sched, ctx.transporters()));
      o.discrepancy = std::abs(o.closed - o.brute);
      break;
    case CheckId::PSI_POWER: {
      o.closed = adversary::psi_power_lower_bound(inst, t, ell);
      const MatrixXd gamma = adversary::assemble_adversary(sched, ctx.transporters());
      const MatrixXd psi = psi_gram(inst);
      o.brute = linalg::spectral_norm(gamma.cwiseProduct(psi.array().pow(ell).matrix()));
      // One-sided: only a shortfall below the bound counts.
      o.discrepancy = std::max(0.0, o.closed - o.brute);
      break;
    }
  }
  rep.closed_form = o.closed;
  rep.brute_force = o.brute;
  rep.discrepancy = o.discrepancy;
  rep.spread = o.spread;
  rep.pass = std::isfinite(o.discrepancy) && o.discrepancy <= rep.tolerance;
  rep.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

DiscrepancyReport verify(CheckId check, const ProblemInstance& inst, double t, int ell, const Tolerances& tol) {
  return verify(check, InstanceContext(inst), t, ell, tol);
}

}  // namespace countbench::bruteforce
