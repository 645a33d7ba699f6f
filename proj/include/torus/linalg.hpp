#pragma once

#include <Eigen/Dense>

namespace torus {

/// Process setup for the linked BLAS; call first in main.  When the build found that
/// OpenBLAS needs a forced core type, sets OPENBLAS_CORETYPE (unless already set) and
/// re-executes the program so the library loads with it.  Pins BLAS to one thread:
/// parallelism lives in the callers.
void prepare_blas(char** argv);

/// Backend selected at configure time: "openblas" or "reference".
const char* blas_backend() noexcept;

struct HermitianEigen {
  Eigen::VectorXd values;    ///< ascending
  Eigen::MatrixXcd vectors;  ///< orthonormal columns
};

/// Dense Hermitian eigendecomposition (divide and conquer).  Only the lower triangle
/// of H is read.
HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& H);

/// Eigendecomposition of a Hermitian H that commutes with index reversal plus complex
/// conjugation, H(n-1-i, n-1-j) = conj H(i, j), n odd.  Solved as a real symmetric problem
/// in the basis (e_i + e_{n-1-i}) / sqrt 2, i (e_i - e_{n-1-i}) / sqrt 2, e_{(n-1)/2}.
HermitianEigen conjugation_symmetric_eigen(const Eigen::MatrixXcd& H);

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& H);

/// Real symmetric tridiagonal eigenvalues (diagonal d, off-diagonal e), ascending.
Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::VectorXd& d, const Eigen::VectorXd& e);

}  // namespace torus
