#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "torus/linalg.hpp"

using namespace torus;

namespace {

Eigen::MatrixXcd random_hermitian(Eigen::Index n, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXcd A(n, n);
  for (Eigen::Index j = 0; j < n; ++j) A.col(j) = oracle::gaussian_vector(rng, n);
  Eigen::MatrixXcd H = A + A.adjoint();
  for (Eigen::Index i = 0; i < n; ++i) H(i, i) += spread * static_cast<double>(i);
  return H;
}

}  // namespace

TEST_CASE("hermitian eigensolver residual and orthogonality at large size") {
  // Sizes past the blocked divide-and-conquer threshold exercise the BLAS-3 path.
  for (Eigen::Index n : {50, 420, 841}) {
    const Eigen::MatrixXcd H = random_hermitian(n, 11 + n, 100.0);
    const HermitianEigen e = hermitian_eigen(H);
    const double resid = (H * e.vectors - e.vectors * e.values.asDiagonal()).norm() / H.norm();
    const double orth = (e.vectors.adjoint() * e.vectors - Eigen::MatrixXcd::Identity(n, n)).norm();
    CHECK(resid < 1e-13);
    CHECK(orth < 1e-11);
    for (Eigen::Index i = 1; i < n; ++i) CHECK(e.values[i] >= e.values[i - 1]);
  }
}

TEST_CASE("eigenvalues agree with an independent solver") {
  const Eigen::MatrixXcd H = random_hermitian(300, 5, 3.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd v = hermitian_eigenvalues(H);
  CHECK((v - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10 * H.norm());
  CHECK((hermitian_eigen(H).values - v).cwiseAbs().maxCoeff() < 1e-10 * H.norm());
}

TEST_CASE("tridiagonal eigenvalues match the dense solve") {
  const int n = 200;
  Eigen::VectorXd d(n), e(n - 1);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < n; ++i) d[i] = g(rng);
  for (int i = 0; i < n - 1; ++i) e[i] = g(rng);
  Eigen::MatrixXd T = d.asDiagonal();
  for (int i = 0; i < n - 1; ++i) T(i, i + 1) = T(i + 1, i) = e[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
  CHECK((tridiagonal_eigenvalues(d, e) - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("conjugation-symmetric eigensolver") {
  for (Eigen::Index n : {1, 7, 301}) {
    Eigen::MatrixXcd H = random_hermitian(n, 40 + n, 2.0);
    // Symmetrise under reversal plus conjugation.
    const Eigen::MatrixXcd R = H.reverse().conjugate();
    H = 0.5 * (H + R);
    const HermitianEigen e = conjugation_symmetric_eigen(H);
    const double resid = (H * e.vectors - e.vectors * e.values.asDiagonal()).norm() / H.norm();
    CHECK(resid < 1e-13);
    CHECK((e.vectors.adjoint() * e.vectors - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-11);
    CHECK((e.values - hermitian_eigenvalues(H)).cwiseAbs().maxCoeff() < 1e-11 * H.norm());
    // Every eigenvector is fixed by the antiunitary symmetry.
    CHECK((e.vectors.colwise().reverse().conjugate() - e.vectors).norm() < 1e-12 * n);
  }
  CHECK_THROWS(conjugation_symmetric_eigen(Eigen::MatrixXcd::Identity(4, 4)));
}
