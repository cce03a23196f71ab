#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "bolax/krylov.hpp"
#include "bolax/toeplitz.hpp"

using namespace bolax;

namespace {

Eigen::MatrixXcd random_hermitian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd A(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) A(j, k) = cplx(nd(rng), nd(rng));
  return 0.5 * (A + A.adjoint());
}

LinearOperator dense_op(const Eigen::MatrixXcd& A) {
  return [A](std::span<const cplx> x, std::span<cplx> y) {
    Eigen::Map<const Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    yv = A * xv;
  };
}

}  // namespace

TEST(Toeplitz, FftMatvecMatchesDense) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<cplx> col(37), x(37);
  for (auto& c : col) c = cplx(nd(rng), nd(rng));
  for (auto& v : x) v = cplx(nd(rng), nd(rng));
  const HermitianToeplitz T(col);
  std::vector<cplx> y(37);
  T.apply(x, y);
  const Eigen::MatrixXcd D = T.dense();
  EXPECT_LE((D - D.adjoint()).norm(), 1e-15);
  const Eigen::VectorXcd ref = D * Eigen::Map<const Eigen::VectorXcd>(x.data(), 37);
  for (std::size_t j = 0; j < 37; ++j) EXPECT_LE(std::abs(y[j] - ref(static_cast<Eigen::Index>(j))), 1e-12);
}

TEST(Lanczos, SmallestEndMatchesDense) {
  const std::size_t n = 120;
  const Eigen::MatrixXcd A = random_hermitian(n, 11);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  LanczosOptions opt;
  opt.threshold = es.eigenvalues()(3) + 1e-6;
  opt.min_count = 2;
  opt.tol = 1e-12;
  const LanczosResult r = lanczos(dense_op(A), n, opt);
  ASSERT_GE(r.values.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(r.values[k], es.eigenvalues()(static_cast<Eigen::Index>(k)), 1e-9);
  for (double res : r.residuals) EXPECT_LE(res, 1e-8);
}

TEST(Lanczos, LargestEndOrderedInward) {
  const std::size_t n = 80;
  const Eigen::MatrixXcd A = random_hermitian(n, 5);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  LanczosOptions opt;
  opt.end = SpectrumEnd::largest;
  opt.threshold = es.eigenvalues()(n - 3) - 1e-6;
  opt.min_count = 1;
  opt.tol = 1e-12;
  const LanczosResult r = lanczos(dense_op(A), n, opt);
  ASSERT_GE(r.values.size(), 3u);
  EXPECT_NEAR(r.values[0], es.eigenvalues()(n - 1), 1e-9);
  EXPECT_NEAR(r.values[1], es.eigenvalues()(n - 2), 1e-9);
  EXPECT_NEAR(r.values[2], es.eigenvalues()(n - 3), 1e-9);
}

TEST(Lanczos, DeterministicForSeed) {
  const Eigen::MatrixXcd A = random_hermitian(50, 9);
  LanczosOptions opt;
  opt.min_count = 3;
  const LanczosResult a = lanczos(dense_op(A), 50, opt), b = lanczos(dense_op(A), 50, opt);
  EXPECT_EQ(a.values, b.values);
}

TEST(ConjugateGradient, SolvesSpdSystem) {
  const std::size_t n = 60;
  Eigen::MatrixXcd B = random_hermitian(n, 21);
  const Eigen::MatrixXcd A = B * B + Eigen::MatrixXcd::Identity(n, n);
  std::vector<cplx> b(n);
  for (std::size_t j = 0; j < n; ++j) b[j] = cplx(std::sin(static_cast<double>(j)), 1.0);
  const SolveResult r = conjugate_gradient(dense_op(A), b, 1e-13);
  ASSERT_TRUE(r.converged);
  const Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(r.x.data(), n);
  const Eigen::VectorXcd bv = Eigen::Map<const Eigen::VectorXcd>(b.data(), n);
  EXPECT_LE((A * x - bv).norm() / bv.norm(), 1e-11);
}

TEST(ConjugateGradient, DeflatedSemidefinite) {
  // A = diag(0, 1, ..., n-1) is singular along e_0; deflating e_0 makes it solvable.
  const std::size_t n = 40;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) A(j, j) = static_cast<double>(j);
  Deflation d;
  CVector e0(n, cplx{});
  e0[0] = 1.0;
  d.basis.push_back(e0);
  std::vector<cplx> b(n, cplx{1.0, 0.0});
  const SolveResult r = conjugate_gradient(dense_op(A), b, 1e-13, 500, &d);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(std::abs(r.x[0]), 1e-14);
  for (std::size_t j = 1; j < n; ++j) EXPECT_NEAR(std::abs(r.x[j] - 1.0 / static_cast<double>(j)), 0.0, 1e-10);
}

TEST(Gmres, SolvesNonHermitianSystem) {
  const std::size_t n = 70;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd A = 8.0 * Eigen::MatrixXcd::Identity(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) A(j, k) += 0.3 * cplx(nd(rng), nd(rng));
  std::vector<cplx> b(n);
  for (auto& v : b) v = cplx(nd(rng), nd(rng));
  const SolveResult r = gmres(dense_op(A), b, 1e-12, 30, 2000);
  ASSERT_TRUE(r.converged);
  const Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(r.x.data(), n);
  const Eigen::VectorXcd bv = Eigen::Map<const Eigen::VectorXcd>(b.data(), n);
  EXPECT_LE((A * x - bv).norm() / bv.norm(), 1e-11);
}

TEST(Gmres, ZeroRhs) {
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(5, 5);
  const SolveResult r = gmres(dense_op(A), std::vector<cplx>(5, cplx{}));
  EXPECT_TRUE(r.converged);
  for (const auto& z : r.x) EXPECT_EQ(z, cplx{});
}
