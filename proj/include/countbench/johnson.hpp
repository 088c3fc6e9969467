#pragma once

// Johnson-scheme combinatorics: k-subsets of [n], inclusion operators, the
// isotypic projectors E_j onto the copies of S^(n-j,j), transporters Phi_j
// between the k'- and k-levels, and the reference vectors with their
// closed-form basis-change tables.
//
// Elements of [n] are 1-based in every public signature. A Subset stores
// element e in bit e-1.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "countbench/linalg.hpp"

namespace countbench::johnson {

using linalg::MatrixXd;
using linalg::VectorXd;

using Subset = std::uint32_t;

inline constexpr int kMaxGroundSet = 20;

/// C(n, r); zero when r < 0 or r > n.
std::int64_t binomial(int n, int r);

Subset singleton(int element);
Subset subset_of(std::initializer_list<int> elements);
/// {1, ..., m} as a bitmask.
Subset prefix_set(int m);
int subset_size(Subset s);
bool contains(Subset s, int element);
/// Sorted 1-based elements.
std::vector<int> elements_of(Subset s);

/// All k-subsets of [n] in lexicographic order of their sorted element lists.
class SubsetBasis {
 public:
  SubsetBasis(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(order_.size()); }
  Subset at(Eigen::Index idx) const { return order_[static_cast<std::size_t>(idx)]; }
  const std::vector<Subset>& order() const { return order_; }

  /// Position of s; throws UsageError if s is not a k-subset of [n].
  Eigen::Index index(Subset s) const;
  /// Same as index(), -1 instead of throwing.
  Eigen::Index find(Subset s) const;

 private:
  int n_;
  int k_;
  std::vector<Subset> order_;
  std::vector<std::int32_t> lookup_;  // 2^n table, -1 where not a k-subset
};

SubsetBasis subset_basis(int n, int k);

/// C(n,k) x C(n,j) matrix, W[x,s] = 1 iff s ⊆ x.
MatrixXd inclusion_matrix(int n, int k, int j);

struct ProjectorFamily {
  int n = 0;
  int k = 0;
  std::vector<MatrixXd> projectors;  // E_0 .. E_k
  std::vector<MatrixXd> bases;       // orthonormal Q_j with E_j = Q_j Q_j^T

  /// Trace of E_j rounded to the nearest integer.
  int rank(int j) const;
};

ProjectorFamily irrep_projectors(int n, int k);

struct Transporter {
  int j = 0;
  MatrixXd matrix;   // C(n,k) x C(n,k')
  MatrixXd compact;  // Q_j^T Phi_j Q'_j, a square orthogonal matrix
  double scale = 0;  // the singular value of E_j W E'_j that was divided out
};

/// Phi_j from projector families built for k (rows) and k' (columns).
Transporter transporter(const ProjectorFamily& small, const ProjectorFamily& large, int j);
Transporter transporter(int n, int k, int k_prime, int j);

/// Sparse linear combination of subsets.
using Combination = std::vector<std::pair<Subset, double>>;

/// T^A_l: the sum of all l-subsets of A.
Combination subset_sum(Subset a, int l);
/// R_j: the ⊠-product of ({n-2i+2} - {n-2i+1}) for i = 1..j.
Combination alternating_pairs(int n, int j);
/// a ⊠ b for combinations over disjoint ground sets.
Combination boxtimes(const Combination& a, const Combination& b);
Combination operator+(Combination a, const Combination& b);
Combination operator-(Combination a, const Combination& b);
Combination operator*(double s, Combination a);
/// Expand in the basis ordering; every subset must have size basis.k().
VectorXd expand(const Combination& c, const SubsetBasis& basis);

/// The unit reference vector v of level (n, k, j); needs only n >= 2k.
VectorXd reference_v(int n, int k, int j);

struct ReferenceVectors {
  int n = 0;
  int k = 0;
  int j = 0;
  VectorXd v;
  // One element fixed (b = n-2j). v_tilde and w_bullet vanish at j = k.
  std::optional<VectorXd> v_tilde;
  VectorXd w_circ;
  std::optional<VectorXd> w_bullet;
  // Two elements fixed (c = n-2j+2, d = n-2j+1); present iff 1 <= j <= k.
  // v_plus and w_cd vanish at j = k.
  bool has_two_fixed = false;
  VectorXd v_minus;
  VectorXd v_zero;
  std::optional<VectorXd> v_plus;
  VectorXd w_empty;
  VectorXd w_c;
  VectorXd w_d;
  std::optional<VectorXd> w_cd;
};

ReferenceVectors reference_vectors(int n, int k, int j);

/// Inner products between the two reference families, in closed form: the
/// one-fixed 2x2 table (rows w_circ, w_bullet; columns v, v_tilde) and the
/// two-fixed 4x4 table (rows w_empty, w_c, w_d, w_cd; columns v_minus, v,
/// v_zero, v_plus). The 4x4 table is only meaningful for 1 <= j <= k and is
/// returned as an empty matrix for j = 0.
std::pair<MatrixXd, MatrixXd> basis_change_tables(int n, int k, int j);

/// Image of a subset under a permutation of [n] given as a 0-based array.
Subset permute(Subset s, const std::vector<int>& perm);

}  // namespace countbench::johnson
