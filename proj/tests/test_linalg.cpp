#include <gtest/gtest.h>

#include <random>

#include "countbench/errors.hpp"
#include "countbench/linalg.hpp"

using namespace countbench;
using linalg::MatrixXd;
using linalg::VectorXd;

namespace {

MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

MatrixXd random_symmetric(int dim, std::uint64_t seed) {
  const MatrixXd a = random_matrix(dim, dim, seed);
  return (a + a.transpose()) / 2;
}

// Power iteration on m^T m; an oracle that shares no code with the eigensolvers.
double power_iteration_norm(const MatrixXd& m) {
  VectorXd v = VectorXd::Ones(m.cols()).normalized();
  double lambda = 0;
  for (int it = 0; it < 20000; ++it) {
    VectorXd w = m.transpose() * (m * v);
    const double next = w.norm();
    v = w / next;
    if (std::abs(next - lambda) < 1e-15 * next) break;
    lambda = next;
  }
  return std::sqrt(lambda);
}

}  // namespace

TEST(SpectralNorm, IdentityIsOne) { EXPECT_NEAR(linalg::spectral_norm(MatrixXd::Identity(3, 3)), 1.0, 1e-14); }

TEST(SpectralNorm, NilpotentTwoByTwo) {
  MatrixXd m(2, 2);
  m << 0, 1, 0, 0;
  EXPECT_NEAR(linalg::spectral_norm(m), 1.0, 1e-14);
}

TEST(SpectralNorm, RandomMatrixAgainstPowerIterationAndSampling) {
  const MatrixXd m = random_matrix(20, 30, 11);
  const double norm = linalg::spectral_norm(m);
  EXPECT_NEAR(norm, power_iteration_norm(m), 1e-10 * norm);

  // Random unit vectors only ever reach the norm from below.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  double best = 0;
  for (int s = 0; s < 10000; ++s) {
    VectorXd u(30);
    for (int i = 0; i < 30; ++i) u[i] = g(rng);
    best = std::max(best, (m * u.normalized()).norm());
  }
  EXPECT_LE(best, norm + 1e-12);
  EXPECT_GT(best, 0.5 * norm);
}

TEST(SpectralNorm, EmptyMatrixIsUsageError) {
  EXPECT_THROW(linalg::spectral_norm(MatrixXd(0, 3)), UsageError);
}

TEST(SpectralNorm, TransposeInvariant) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const MatrixXd m = random_matrix(7 + static_cast<int>(seed), 13, seed);
    EXPECT_NEAR(linalg::spectral_norm(m), linalg::spectral_norm(MatrixXd(m.transpose())), 1e-10);
  }
}

TEST(SpectralNorm, DirectSumTakesTheMax) {
  const MatrixXd a = random_matrix(4, 6, 21);
  const MatrixXd b = 3 * random_matrix(5, 3, 22);
  const double expected = std::max(linalg::spectral_norm(a), linalg::spectral_norm(b));
  EXPECT_NEAR(linalg::spectral_norm(linalg::direct_sum(a, b)), expected, 1e-10);
}

TEST(SpectralNorm, OrthonormalColumnsHaveNormOne) {
  const MatrixXd q = linalg::orthonormal_column_basis(random_matrix(40, 9, 8));
  EXPECT_NEAR(linalg::spectral_norm(q), 1.0, 1e-10);
}

TEST(SpectralNorm, LargeMatrixTakesTheTridiagonalPath) {
  const MatrixXd m = random_matrix(300, 310, 4);
  EXPECT_NEAR(linalg::spectral_norm(m), power_iteration_norm(m), 1e-9 * power_iteration_norm(m));
}

TEST(SpectralNorm, FloatInstantiation) {
  Eigen::MatrixXf m = Eigen::MatrixXf::Identity(4, 4) * 2.5f;
  EXPECT_NEAR(linalg::spectral_norm(m), 2.5f, 1e-5f);
}

TEST(ProductSpectralNorm, MatchesExplicitProduct) {
  const MatrixXd l = random_matrix(30, 8, 31);
  const MatrixXd r = random_matrix(8, 25, 32);
  EXPECT_NEAR(linalg::product_spectral_norm(l, r), linalg::spectral_norm(MatrixXd(l * r)), 1e-9);
  EXPECT_THROW(linalg::product_spectral_norm(l, MatrixXd(3, 3)), UsageError);
}

TEST(OrthonormalColumnBasis, RankOneDiagonal) {
  MatrixXd m(2, 2);
  m << 2, 0, 0, 0;
  const MatrixXd q = linalg::orthonormal_column_basis(m, 1e-12);
  ASSERT_EQ(q.cols(), 1);
  EXPECT_NEAR(std::abs(q(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(q(1, 0), 0.0, 1e-14);
}

TEST(OrthonormalColumnBasis, AllOnes) {
  const MatrixXd q = linalg::orthonormal_column_basis(MatrixXd::Ones(2, 2));
  ASSERT_EQ(q.cols(), 1);
  EXPECT_NEAR(std::abs(q(0, 0)), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(q(0, 0), q(1, 0), 1e-14);
}

TEST(OrthonormalColumnBasis, TwoIndependentColumns) {
  const MatrixXd q = linalg::orthonormal_column_basis(random_matrix(12, 2, 9));
  ASSERT_EQ(q.cols(), 2);
  EXPECT_LE((q.transpose() * q - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OrthonormalColumnBasis, SpansTheColumnSpace) {
  // Rank 3 by construction.
  const MatrixXd m = random_matrix(10, 3, 1) * random_matrix(3, 7, 2);
  const MatrixXd q = linalg::orthonormal_column_basis(m);
  ASSERT_EQ(q.cols(), 3);
  EXPECT_LE((m - q * (q.transpose() * m)).norm(), 1e-10 * m.norm());
}

TEST(OrthonormalColumnBasis, ResolvesSmallButNonzeroSingularValues) {
  // A Gram-matrix route cannot see sigma = 1e-9 next to sigma = 1.
  MatrixXd m = MatrixXd::Zero(5, 3);
  m(0, 0) = 1;
  m(1, 1) = 1e-9;
  EXPECT_EQ(linalg::orthonormal_column_basis(m, 1e-10).cols(), 2);
  EXPECT_EQ(linalg::orthonormal_column_basis(m, 1e-8).cols(), 1);
}

TEST(OrthonormalColumnBasis, ZeroMatrixGivesNoColumns) {
  const MatrixXd q = linalg::orthonormal_column_basis(MatrixXd::Zero(4, 3));
  EXPECT_EQ(q.rows(), 4);
  EXPECT_EQ(q.cols(), 0);
}

TEST(OrthonormalColumnBasis, BadArgumentsAreUsageErrors) {
  EXPECT_THROW(linalg::orthonormal_column_basis(MatrixXd(0, 0)), UsageError);
  EXPECT_THROW(linalg::orthonormal_column_basis(MatrixXd::Ones(2, 2), 0.0), UsageError);
}

TEST(SymmetricEig, Diagonal) {
  const MatrixXd m = VectorXd::Map(std::vector<double>{3, 1, 2}.data(), 3).asDiagonal();
  const auto eig = linalg::symmetric_eig(m);
  EXPECT_NEAR(eig.values[0], 3, 1e-14);
  EXPECT_NEAR(eig.values[1], 2, 1e-14);
  EXPECT_NEAR(eig.values[2], 1, 1e-14);
}

TEST(SymmetricEig, Swap) {
  MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  const auto eig = linalg::symmetric_eig(m);
  EXPECT_NEAR(eig.values[0], 1, 1e-14);
  EXPECT_NEAR(eig.values[1], -1, 1e-14);
}

TEST(SymmetricEig, RandomReconstruction) {
  for (int dim : {15, 200}) {
    const MatrixXd m = random_symmetric(dim, 77);
    const auto eig = linalg::symmetric_eig(m);
    const MatrixXd back = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    EXPECT_LT((back - m).norm() / m.norm(), 1e-9) << "dim " << dim;
    for (Eigen::Index i = 1; i < eig.values.size(); ++i) EXPECT_GE(eig.values[i - 1], eig.values[i]);
  }
}

TEST(SymmetricEig, JacobiAndTridiagonalAgree) {
  const MatrixXd m = random_symmetric(60, 3);
  const auto jac = linalg::detail::jacobi_eig<double>(m, false);
  const auto tri = linalg::detail::tridiagonal_eig<double>(m, false);
  EXPECT_LE((jac.values - tri.values).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(SymmetricEig, RejectsBadInput) {
  MatrixXd asym(2, 2);
  asym << 0, 1, 0, 0;
  EXPECT_THROW(linalg::symmetric_eig(asym), UsageError);
  EXPECT_THROW(linalg::symmetric_eig(MatrixXd(2, 3)), UsageError);
  MatrixXd nan = MatrixXd::Identity(2, 2);
  nan(0, 0) = std::nan("");
  EXPECT_THROW(linalg::symmetric_eig(nan), UsageError);
}

TEST(KronApply, MatchesExplicitKronecker) {
  const MatrixXd a = random_matrix(3, 4, 41);
  const MatrixXd b = random_matrix(5, 5, 42);
  const MatrixXd w = random_matrix(20, 2, 43);
  MatrixXd kron(15, 20);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) kron.block(i * 5, j * 5, 5, 5) = a(i, j) * b;
  EXPECT_LE((linalg::kron_apply(a, b, w) - kron * w).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(linalg::kron_apply(a, MatrixXd(5, 4), w), UsageError);
}
