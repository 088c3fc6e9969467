#include "countbench/johnson.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace countbench::johnson {

namespace {

double sq(double x) { return std::sqrt(x); }

}  // namespace

std::int64_t binomial(int n, int r) {
  if (r < 0 || n < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::int64_t out = 1;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

Subset singleton(int element) {
  if (element < 1 || element > 32) throw UsageError("singleton: element out of range");
  return Subset{1} << (element - 1);
}

Subset subset_of(std::initializer_list<int> elements) {
  Subset s = 0;
  for (int e : elements) s |= singleton(e);
  return s;
}

Subset prefix_set(int m) {
  if (m <= 0) return 0;
  if (m >= 32) return ~Subset{0};
  return (Subset{1} << m) - 1;
}

int subset_size(Subset s) { return std::popcount(s); }

bool contains(Subset s, int element) { return element >= 1 && element <= 32 && ((s >> (element - 1)) & 1u); }

std::vector<int> elements_of(Subset s) {
  std::vector<int> out;
  for (int e = 1; s != 0; ++e, s >>= 1)
    if (s & 1u) out.push_back(e);
  return out;
}

SubsetBasis::SubsetBasis(int n, int k) : n_(n), k_(k) {
  if (n < 0 || k < 0 || k > n) throw UsageError("subset_basis: need 0 <= k <= n");
  if (n > kMaxGroundSet) throw UsageError("subset_basis: n exceeds " + std::to_string(kMaxGroundSet));
  order_.reserve(static_cast<std::size_t>(binomial(n, k)));
  // Lexicographic enumeration of increasing tuples c[0] < ... < c[k-1].
  std::vector<int> c(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i + 1;
  while (true) {
    Subset s = 0;
    for (int e : c) s |= Subset{1} << (e - 1);
    order_.push_back(s);
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i + 1) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (int p = i + 1; p < k; ++p) c[static_cast<std::size_t>(p)] = c[static_cast<std::size_t>(p - 1)] + 1;
  }
  lookup_.assign(std::size_t{1} << n, -1);
  for (std::size_t i = 0; i < order_.size(); ++i) lookup_[order_[i]] = static_cast<std::int32_t>(i);
}

Eigen::Index SubsetBasis::find(Subset s) const {
  if (n_ < 32 && (s >> n_) != 0) return -1;
  return lookup_[s];
}

Eigen::Index SubsetBasis::index(Subset s) const {
  const Eigen::Index idx = find(s);
  if (idx < 0) throw UsageError("SubsetBasis::index: not a " + std::to_string(k_) + "-subset of [" +
                                std::to_string(n_) + "]");
  return idx;
}

SubsetBasis subset_basis(int n, int k) { return SubsetBasis(n, k); }

MatrixXd inclusion_matrix(int n, int k, int j) {
  if (j < 0 || j > k || k > n) throw UsageError("inclusion_matrix: need 0 <= j <= k <= n");
  const SubsetBasis rows(n, k);
  const SubsetBasis cols(n, j);
  MatrixXd w = MatrixXd::Zero(rows.size(), cols.size());
  for (Eigen::Index c = 0; c < cols.size(); ++c) {
    const Subset s = cols.at(c);
    for (Eigen::Index r = 0; r < rows.size(); ++r)
      if ((rows.at(r) & s) == s) w(r, c) = 1.0;
  }
  return w;
}

int ProjectorFamily::rank(int j) const {
  if (j < 0 || j >= static_cast<int>(projectors.size())) throw UsageError("ProjectorFamily::rank: j out of range");
  return static_cast<int>(std::lround(projectors[static_cast<std::size_t>(j)].trace()));
}

ProjectorFamily irrep_projectors(int n, int k) {
  if (k < 0 || n < 2 * k) throw UsageError("irrep_projectors: need n >= 2k");
  ProjectorFamily fam;
  fam.n = n;
  fam.k = k;
  MatrixXd previous;  // orthonormal basis of the range of P_{j-1}
  for (int j = 0; j <= k; ++j) {
    const MatrixXd p = linalg::orthonormal_column_basis(inclusion_matrix(n, k, j));
    MatrixXd q;
    if (j == 0) {
      q = p;
    } else {
      const MatrixXd residual = p - previous * (previous.transpose() * p);
      q = linalg::orthonormal_column_basis(residual);
      // Re-orthogonalise against the lower levels; the residual route loses a
      // few digits when P_{j-1} is large.
      q -= previous * (previous.transpose() * q);
      q = linalg::orthonormal_column_basis(q);
    }
    fam.projectors.push_back(q * q.transpose());
    fam.bases.push_back(q);
    previous = p;
  }
  return fam;
}

VectorXd expand(const Combination& c, const SubsetBasis& basis) {
  VectorXd out = VectorXd::Zero(basis.size());
  for (const auto& [s, coeff] : c) out[basis.index(s)] += coeff;
  return out;
}

Combination subset_sum(Subset a, int l) {
  Combination out;
  const std::vector<int> elems = elements_of(a);
  const int m = static_cast<int>(elems.size());
  if (l < 0 || l > m) return out;
  const SubsetBasis local(m, l);
  out.reserve(static_cast<std::size_t>(local.size()));
  for (Subset pick : local.order()) {
    Subset s = 0;
    for (int e : elements_of(pick)) s |= singleton(elems[static_cast<std::size_t>(e - 1)]);
    out.emplace_back(s, 1.0);
  }
  return out;
}

Combination boxtimes(const Combination& a, const Combination& b) {
  Combination out;
  out.reserve(a.size() * b.size());
  for (const auto& [sa, ca] : a)
    for (const auto& [sb, cb] : b) {
      if (sa & sb) throw UsageError("boxtimes: ground sets overlap");
      out.emplace_back(sa | sb, ca * cb);
    }
  return out;
}

Combination operator+(Combination a, const Combination& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Combination operator-(Combination a, const Combination& b) {
  for (const auto& [s, c] : b) a.emplace_back(s, -c);
  return a;
}

Combination operator*(double s, Combination a) {
  for (auto& term : a) term.second *= s;
  return a;
}

Combination alternating_pairs(int n, int j) {
  Combination r{{0, 1.0}};
  for (int i = 1; i <= j; ++i) {
    const Combination pair{{singleton(n - 2 * i + 2), 1.0}, {singleton(n - 2 * i + 1), -1.0}};
    r = boxtimes(r, pair);
  }
  return r;
}

namespace {

Combination single(int e) { return {{singleton(e), 1.0}}; }
Combination diff(int a, int b) { return {{singleton(a), 1.0}, {singleton(b), -1.0}}; }
Subset strip(Subset a, std::initializer_list<int> drop) {
  for (int e : drop) a &= ~singleton(e);
  return a;
}

}  // namespace

VectorXd reference_v(int n, int k, int j) {
  if (j < 0 || j > k || n < 2 * k) throw UsageError("reference_v: need 0 <= j <= k and n >= 2k");
  const SubsetBasis basis(n, k);
  const double beta2 = sq(std::ldexp(static_cast<double>(binomial(n - 2 * j, k - j)), j));
  return expand(boxtimes(alternating_pairs(n, j), subset_sum(prefix_set(n - 2 * j), k - j)), basis) / beta2;
}

ReferenceVectors reference_vectors(int n, int k, int j) {
  if (j < 0 || k < 0 || j > k || n < 2 * k + 1) throw UsageError("reference_vectors: need 0 <= j <= k and n >= 2k+1");
  if (n > kMaxGroundSet) throw UsageError("reference_vectors: n too large");
  const SubsetBasis basis(n, k);
  ReferenceVectors out;
  out.n = n;
  out.k = k;
  out.j = j;

  const double N = n;
  const double K = k;
  const double J = j;

  // One element fixed.
  {
    const int b = n - 2 * j;
    const Combination rj = alternating_pairs(n, j);
    const double beta2 = sq(std::ldexp(static_cast<double>(binomial(n - 2 * j, k - j)), j));
    out.v = expand(boxtimes(rj, subset_sum(prefix_set(n - 2 * j), k - j)), basis) / beta2;
    out.w_circ = expand(boxtimes(rj, subset_sum(prefix_set(n - 2 * j - 1), k - j)), basis) /
                 (beta2 * sq((N - K - J) / (N - 2 * J)));
    if (j < k) {
      Combination acc;
      for (int a = 1; a <= n - 2 * j - 1; ++a)
        acc = acc + boxtimes(diff(a, b), subset_sum(strip(prefix_set(n - 2 * j - 1), {a}), k - j - 1));
      out.v_tilde = expand(boxtimes(rj, acc), basis) / (beta2 * sq((K - J) * (N - K - J)));
      out.w_bullet = expand(boxtimes(boxtimes(rj, single(b)), subset_sum(prefix_set(n - 2 * j - 1), k - j - 1)),
                            basis) /
                     (beta2 * sq((K - J) / (N - 2 * J)));
    }
  }

  // Two elements fixed.
  if (j >= 1) {
    out.has_two_fixed = true;
    const int c = n - 2 * j + 2;
    const int d = n - 2 * j + 1;
    const Combination r = alternating_pairs(n, j - 1);
    const double beta4 = sq(std::ldexp(static_cast<double>(binomial(n - 2 * j, k - j)), j - 1));
    const Subset low = prefix_set(n - 2 * j);
    const Subset wide = prefix_set(n - 2 * j + 2);

    out.v_minus = expand(boxtimes(r, subset_sum(wide, k - j + 1)), basis) /
                  (beta4 * sq((N - 2 * J + 2) * (N - 2 * J + 1) / ((K - J + 1) * (N - K - J + 1))));

    Combination acc0;
    for (int a = 1; a <= n - 2 * j; ++a) {
      acc0 = acc0 + boxtimes(diff(a, c), subset_sum(strip(wide, {a, c}), k - j));
      acc0 = acc0 + boxtimes(diff(a, d), subset_sum(strip(wide, {a, d}), k - j));
    }
    out.v_zero = expand(boxtimes(r, acc0), basis) / (beta4 * sq(2 * (N - 2 * J + 2) * (N - 2 * J)));

    if (j < k) {
      Combination accp;
      for (int a = 1; a <= n - 2 * j; ++a)
        for (int a2 = 1; a2 <= n - 2 * j; ++a2) {
          if (a == a2) continue;
          accp = accp + boxtimes(boxtimes(diff(a, c), diff(a2, d)), subset_sum(strip(low, {a, a2}), k - j - 1));
        }
      // Squared norm of the sum is C(n-2j, k-j) (k-j)(n-k-j)(n-2j)(n-2j+1); the
      // factor is (n-k-j), not (n-k-j+1).
      out.v_plus = expand(boxtimes(r, accp), basis) /
                   (beta4 * sq((N - 2 * J + 1) * (N - 2 * J) * (N - K - J) * (K - J)));
    }

    out.w_empty = expand(boxtimes(r, subset_sum(low, k - j + 1)), basis) / (beta4 * sq((N - K - J) / (K - J + 1)));
    out.w_c = expand(boxtimes(boxtimes(r, single(c)), subset_sum(low, k - j)), basis) / beta4;
    out.w_d = expand(boxtimes(boxtimes(r, single(d)), subset_sum(low, k - j)), basis) / beta4;
    if (j < k) {
      out.w_cd = expand(boxtimes(boxtimes(r, Combination{{singleton(c) | singleton(d), 1.0}}),
                                 subset_sum(low, k - j - 1)),
                        basis) /
                 (beta4 * sq((K - J) / (N - K - J + 1)));
    }
  }
  return out;
}

std::pair<MatrixXd, MatrixXd> basis_change_tables(int n, int k, int j) {
  if (j < 0 || k < 0 || j > k || n < 2 * k + 1) throw UsageError("basis_change_tables: need 0 <= j <= k and n >= 2k+1");
  const double N = n;
  const double K = k;
  const double J = j;

  MatrixXd t1(2, 2);
  const double out_frac = sq((N - K - J) / (N - 2 * J));
  const double in_frac = sq((K - J) / (N - 2 * J));
  t1 << out_frac, in_frac, in_frac, -out_frac;

  MatrixXd t2;
  if (j >= 1) {
    const double a = N - 2 * J + 2;
    const double b = N - 2 * J + 1;
    const double c = N - 2 * J;
    const double m0 = sq((N - K - J + 1) * (N - K - J) / (a * b));
    const double m1 = sq((K - J + 1) * (N - K - J + 1) / (a * b));
    const double m3 = sq((K - J + 1) * (K - J) / (a * b));
    const double z0 = sq(2 * (K - J + 1) * (N - K - J) / (a * c));
    const double z1 = -(N - 2 * K) / sq(2 * a * c);
    const double z3 = -sq(2 * (K - J) * (N - K - J + 1) / (a * c));
    const double p0 = sq((K - J + 1) * (K - J) / (b * c));
    const double p1 = -sq((K - J) * (N - K - J) / (b * c));
    const double p3 = sq((N - K - J + 1) * (N - K - J) / (b * c));
    const double h = 1 / std::sqrt(2.0);
    t2.resize(4, 4);
    t2 << m0, 0, z0, p0,
          m1, h, z1, p1,
          m1, -h, z1, p1,
          m3, 0, z3, p3;
  }
  return {t1, t2};
}

Transporter transporter(const ProjectorFamily& small, const ProjectorFamily& large, int j) {
  const int n = small.n;
  const int k = small.k;
  const int kp = large.k;
  if (large.n != n) throw UsageError("transporter: projector families disagree on n");
  if (j < 0 || j > k || k > kp || kp > n - kp) throw UsageError("transporter: need j <= k <= k' <= n - k'");

  const MatrixXd& q = small.bases[static_cast<std::size_t>(j)];
  const MatrixXd& qh = large.bases[static_cast<std::size_t>(j)];
  // W[x,y] = 1 iff x ⊆ y, x a k-subset and y a k'-subset.
  const MatrixXd w = inclusion_matrix(n, kp, k).transpose();
  const MatrixXd inner = q.transpose() * w * qh;
  const double scale = linalg::spectral_norm(inner);
  if (scale < 1e-8)
    throw DegenerateError("transporter: E_j W E'_j vanishes at (n,k,k',j) = (" + std::to_string(n) + "," +
                          std::to_string(k) + "," + std::to_string(kp) + "," + std::to_string(j) + ")");

  Transporter out;
  out.j = j;
  out.scale = scale;
  out.compact = inner / scale;
  out.matrix = q * out.compact * qh.transpose();

  const VectorXd v = reference_v(n, k, j);
  const VectorXd vh = reference_v(n, kp, j);
  const double sign_probe = v.dot(out.matrix * vh);
  if (std::abs(sign_probe) < 1e-8)
    throw DegenerateError("transporter: reference vectors give no sign information");
  if (sign_probe < 0) {
    out.compact = -out.compact;
    out.matrix = -out.matrix;
  }
  return out;
}

Transporter transporter(int n, int k, int k_prime, int j) {
  if (j < 0 || j > k || k > k_prime || k_prime > n - k_prime)
    throw UsageError("transporter: need j <= k <= k' <= n - k'");
  return transporter(irrep_projectors(n, k), irrep_projectors(n, k_prime), j);
}

Subset permute(Subset s, const std::vector<int>& perm) {
  Subset out = 0;
  for (int e : elements_of(s)) {
    if (e > static_cast<int>(perm.size())) throw UsageError("permute: permutation too short");
    out |= singleton(perm[static_cast<std::size_t>(e - 1)] + 1);
  }
  return out;
}

}  // namespace countbench::johnson
