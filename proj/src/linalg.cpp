#include "torus/linalg.hpp"

#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "torus/errors.hpp"

#ifdef TORUS_USE_OPENBLAS
extern "C" void openblas_set_num_threads(int);
#endif

namespace torus {

using cplx = std::complex<double>;

namespace {

HermitianEigen run_zheevd(const Eigen::MatrixXcd& H, char jobz) {
  if (H.rows() != H.cols()) throw InvalidArgument("eigensolve needs a square matrix");
  const lapack_int n = static_cast<lapack_int>(H.rows());
  HermitianEigen out;
  out.vectors = H;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n, out.vectors.data(), n,
                                         out.values.data());
  if (info != 0) throw NumericalError("zheevd failed, info = " + std::to_string(info));
  if (jobz == 'N') out.vectors.resize(0, 0);
  return out;
}

}  // namespace

void prepare_blas(char** argv) {
#ifdef TORUS_OPENBLAS_CORETYPE
  if (std::getenv("OPENBLAS_CORETYPE") == nullptr) {
    ::setenv("OPENBLAS_CORETYPE", TORUS_OPENBLAS_CORETYPE, 1);
    if (argv != nullptr) ::execv("/proc/self/exe", argv);
    std::fprintf(stderr, "cannot re-execute with OPENBLAS_CORETYPE=%s; set it and rerun\n",
                 TORUS_OPENBLAS_CORETYPE);
    std::exit(2);
  }
#else
  (void)argv;
#endif
#ifdef TORUS_USE_OPENBLAS
  openblas_set_num_threads(1);
#endif
}

const char* blas_backend() noexcept {
#ifdef TORUS_USE_OPENBLAS
  return "openblas";
#else
  return "reference";
#endif
}

HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& H) { return run_zheevd(H, 'V'); }

HermitianEigen conjugation_symmetric_eigen(const Eigen::MatrixXcd& H) {
  if (H.rows() != H.cols() || H.rows() % 2 == 0)
    throw InvalidArgument("conjugation-symmetric eigensolve needs a square matrix of odd size");
  const Eigen::Index n = H.rows(), m = n / 2;
  const double r = 1.0 / std::sqrt(2.0);
  const cplx I(0.0, 1.0);
  Eigen::MatrixXcd M(n, n);
  {
    const Eigen::MatrixXcd P = H.rightCols(m).rowwise().reverse();
    M.leftCols(m) = r * (H.leftCols(m) + P);
    M.middleCols(m, m) = (I * r) * (H.leftCols(m) - P);
    M.col(2 * m) = H.col(m);
  }
  Eigen::MatrixXd S(n, n);
  {
    const Eigen::MatrixXcd P = M.bottomRows(m).colwise().reverse();
    S.topRows(m) = (r * (M.topRows(m) + P)).real();
    S.middleRows(m, m) = ((-I * r) * (M.topRows(m) - P)).real();
    S.row(2 * m) = M.row(m).real();
  }
  M.resize(0, 0);
  HermitianEigen out;
  out.values.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), S.data(),
                                         static_cast<lapack_int>(n), out.values.data());
  if (info != 0) throw NumericalError("dsyevd failed, info = " + std::to_string(info));
  out.vectors.resize(n, n);
  out.vectors.topRows(m) = r * (S.topRows(m).cast<cplx>() + I * S.middleRows(m, m).cast<cplx>());
  out.vectors.bottomRows(m) =
      (r * (S.topRows(m).cast<cplx>() - I * S.middleRows(m, m).cast<cplx>())).colwise().reverse();
  out.vectors.row(m) = S.row(2 * m).cast<cplx>();
  return out;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& H) {
  return run_zheevd(H, 'N').values;
}

Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
  const lapack_int n = static_cast<lapack_int>(d.size());
  if (n == 0) return d;
  if (e.size() + 1 != d.size()) throw InvalidArgument("tridiagonal sizes mismatch");
  Eigen::VectorXd dd = d, ee = e;
  const lapack_int info = LAPACKE_dsterf(n, dd.data(), ee.data());
  if (info != 0) throw NumericalError("dsterf failed, info = " + std::to_string(info));
  return dd;
}

}  // namespace torus
