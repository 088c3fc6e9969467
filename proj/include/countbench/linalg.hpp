#pragma once

/**
 *  Dense real linear-algebra kernel.
 *
 *  Everything downstream needs three things from here: spectral norms,
 *  symmetric eigendecompositions and orthonormal bases of column spaces.
 *  All routines take Eigen expressions and are templated on the scalar type;
 *  the rest of the project instantiates them with double.
 *
 *  Symmetric eigenproblems are solved with cyclic Jacobi rotations up to
 *  kJacobiMaxDim; larger problems go through Householder tridiagonalisation
 *  followed by implicit QL (Eigen::SelfAdjointEigenSolver). Column bases come
 *  from column-pivoted Householder QR.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "countbench/errors.hpp"

namespace countbench::linalg {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kSymmetryTol = 1e-12;
inline constexpr Eigen::Index kJacobiMaxDim = 128;

template <typename Scalar>
struct SymmetricEigen {
  Vector<Scalar> values;   // descending
  Matrix<Scalar> vectors;  // columns match `values`; empty if not requested
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

namespace detail {

template <typename Scalar>
void sort_descending(SymmetricEigen<Scalar>& eig) {
  const Eigen::Index n = eig.values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return eig.values[a] > eig.values[b];
  });
  Vector<Scalar> values(n);
  Matrix<Scalar> vectors(eig.vectors.rows(), eig.vectors.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    values[i] = eig.values[order[static_cast<std::size_t>(i)]];
    if (eig.vectors.size() != 0) vectors.col(i) = eig.vectors.col(order[static_cast<std::size_t>(i)]);
  }
  eig.values = std::move(values);
  eig.vectors = std::move(vectors);
}

// Cyclic-by-row Jacobi on a symmetric matrix held in full storage. Rotations
// update columns p and q (contiguous) and mirror them into rows p and q.
template <typename Scalar>
SymmetricEigen<Scalar> jacobi_eig(Matrix<Scalar> a, bool compute_vectors) {
  using std::abs;
  using std::sqrt;
  const Eigen::Index n = a.rows();
  Matrix<Scalar> v;
  if (compute_vectors) v = Matrix<Scalar>::Identity(n, n);

  const Scalar total = a.squaredNorm();
  const Scalar eps = Eigen::NumTraits<Scalar>::epsilon();
  for (int sweep = 0; sweep < 100; ++sweep) {
    Scalar off = 0;
    for (Eigen::Index q = 0; q < n; ++q)
      for (Eigen::Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (off <= eps * eps * total || off == Scalar(0)) break;

    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (abs(apq) <= eps * eps * sqrt(total)) continue;
        const Scalar app = a(p, p);
        const Scalar aqq = a(q, q);
        const Scalar theta = (aqq - app) / (2 * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) / (abs(theta) + sqrt(1 + theta * theta));
        const Scalar c = 1 / sqrt(1 + t * t);
        const Scalar s = t * c;

        Scalar* cp = a.col(p).data();
        Scalar* cq = a.col(q).data();
        for (Eigen::Index i = 0; i < n; ++i) {
          const Scalar xp = cp[i];
          const Scalar xq = cq[i];
          cp[i] = c * xp - s * xq;
          cq[i] = s * xp + c * xq;
        }
        cp[p] = app - t * apq;
        cq[q] = aqq + t * apq;
        cp[q] = 0;
        cq[p] = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          a(p, i) = cp[i];
          a(q, i) = cq[i];
        }
        if (compute_vectors) {
          Scalar* vp = v.col(p).data();
          Scalar* vq = v.col(q).data();
          for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar xp = vp[i];
            const Scalar xq = vq[i];
            vp[i] = c * xp - s * xq;
            vq[i] = s * xp + c * xq;
          }
        }
      }
    }
  }
  SymmetricEigen<Scalar> out{a.diagonal(), std::move(v)};
  sort_descending(out);
  return out;
}

template <typename Scalar>
SymmetricEigen<Scalar> tridiagonal_eig(const Matrix<Scalar>& a, bool compute_vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(
      a, compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  SymmetricEigen<Scalar> out{solver.eigenvalues(), Matrix<Scalar>()};
  if (compute_vectors) out.vectors = solver.eigenvectors();
  sort_descending(out);
  return out;
}

// No symmetry check; `a` is symmetrised first.
template <typename Scalar>
SymmetricEigen<Scalar> symmetric_eig_unchecked(const Matrix<Scalar>& a, bool compute_vectors) {
  Matrix<Scalar> sym = (a + a.transpose()) / Scalar(2);
  if (sym.rows() <= kJacobiMaxDim) return jacobi_eig<Scalar>(std::move(sym), compute_vectors);
  return tridiagonal_eig<Scalar>(sym, compute_vectors);
}

template <typename Derived>
Matrix<typename Derived::Scalar> smaller_gram(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() <= m.cols()) return Matrix<Scalar>(m * m.transpose());
  return Matrix<Scalar>(m.transpose() * m);
}

}  // namespace detail

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
/// Throws UsageError if `m` is not square or not symmetric to within
/// kSymmetryTol (relative to its largest entry).
template <typename Derived>
SymmetricEigen<typename Derived::Scalar> symmetric_eig(const Eigen::MatrixBase<Derived>& m,
                                                        bool compute_vectors = true) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw UsageError("symmetric_eig: matrix is not square");
  if (m.size() == 0) throw UsageError("symmetric_eig: empty matrix");
  const Matrix<Scalar> a = m;
  if (!all_finite(a)) throw UsageError("symmetric_eig: non-finite entry");
  const Scalar scale = std::max<Scalar>(Scalar(1), a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > Scalar(kSymmetryTol) * scale)
    throw UsageError("symmetric_eig: matrix is not symmetric");
  return detail::symmetric_eig_unchecked<Scalar>(a, compute_vectors);
}

/// Largest singular value, from the eigenvalues of the smaller Gram matrix.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) throw UsageError("spectral_norm: empty matrix");
  const Matrix<Scalar> gram = detail::smaller_gram(m);
  const Scalar top = detail::symmetric_eig_unchecked<Scalar>(gram, false).values[0];
  return std::sqrt(std::max(top, Scalar(0)));
}

/// Spectral norm of the product l * r without forming it: ||l r|| equals
/// ||(l^T l)^{1/2} r||, so only inner-dimension-sized eigenproblems are solved.
template <typename DerivedL, typename DerivedR>
typename DerivedL::Scalar product_spectral_norm(const Eigen::MatrixBase<DerivedL>& l,
                                                const Eigen::MatrixBase<DerivedR>& r) {
  using Scalar = typename DerivedL::Scalar;
  if (l.size() == 0 || r.size() == 0) throw UsageError("product_spectral_norm: empty factor");
  if (l.cols() != r.rows()) throw UsageError("product_spectral_norm: inner dimensions differ");
  const Matrix<Scalar> gl = l.transpose() * l;
  const auto eig = detail::symmetric_eig_unchecked<Scalar>(gl, true);
  const Vector<Scalar> roots = eig.values.cwiseMax(Scalar(0)).cwiseSqrt();
  const Matrix<Scalar> half = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
  const Matrix<Scalar> rr = r * r.transpose();
  const Matrix<Scalar> sandwich = half * rr * half;
  const Scalar top = detail::symmetric_eig_unchecked<Scalar>(sandwich, false).values[0];
  return std::sqrt(std::max(top, Scalar(0)));
}

/// Orthonormal basis of the column space of `m`. A direction counts toward
/// the rank iff its QR pivot exceeds rank_tol times the largest pivot; the
/// pivots track the singular values closely whenever the spectrum has a clear
/// gap, as all scheme matrices here do. A zero matrix yields a rows x 0 result.
///
/// Rank is read off a QR factorisation of m itself rather than the Gram
/// matrix: eigenvalues of m^T m only resolve singular values down to about
/// sqrt(machine eps) * sigma_max, too coarse for a 1e-10 rank cut.
template <typename Derived>
Matrix<typename Derived::Scalar> orthonormal_column_basis(
    const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) throw UsageError("orthonormal_column_basis: empty matrix");
  if (!(rank_tol > 0)) throw UsageError("orthonormal_column_basis: rank_tol must be positive");
  const Matrix<Scalar> a = m;
  // Column-pivoted QR: |R_ii| decreases, so the rank is the count above
  // rank_tol * |R_00|. (Eigen 3.4's BDCSVD yields NaN on some of the
  // rank-deficient residuals built by the projector construction.)
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(a);
  qr.setThreshold(rank_tol);
  const Eigen::Index rank = qr.rank();
  if (rank == 0) return Matrix<Scalar>(a.rows(), 0);
  Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(a.rows(), rank);
  // One modified Gram-Schmidt pass to bring orthonormality to working precision.
  for (Eigen::Index i = 0; i < rank; ++i) {
    for (Eigen::Index p = 0; p < i; ++p) q.col(i) -= q.col(p).dot(q.col(i)) * q.col(p);
    q.col(i).normalize();
  }
  return q;
}

/// Block-diagonal a ⊕ b.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> direct_sum(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Matrix<Scalar> out = Matrix<Scalar>::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

/// (a ⊗ b) w for row index (x, i) ordered x-major, without forming the
/// Kronecker product. `b` must be square; `a` may be rectangular.
template <typename DerivedA, typename DerivedB, typename DerivedW>
Matrix<typename DerivedW::Scalar> kron_apply(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b,
                                             const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedW::Scalar;
  const Eigen::Index inner = b.cols();
  if (b.rows() != b.cols()) throw UsageError("kron_apply: right factor must be square");
  if (w.rows() != a.cols() * inner) throw UsageError("kron_apply: dimension mismatch");
  const Matrix<Scalar> ma = a;
  const Matrix<Scalar> mb = b;
  const Matrix<Scalar> mw = w;
  Matrix<Scalar> out(a.rows() * inner, w.cols());
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    Eigen::Map<const Matrix<Scalar>> block(mw.col(c).data(), inner, a.cols());
    Eigen::Map<Matrix<Scalar>> dst(out.col(c).data(), inner, a.rows());
    dst.noalias() = mb * block * ma.transpose();
  }
  return out;
}

}  // namespace countbench::linalg
