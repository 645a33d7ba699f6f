#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <variant>

#include "torus/lattice.hpp"

namespace torus {

using cplx = std::complex<double>;

/// Truncated double Fourier series u(x, y) = sum u_{k l} e^{2 pi i (k x / A + l y / B)},
/// |k|, |l| <= N.  Coefficients are stored row-major in k:
/// index(k, l) = (k + N) (2N + 1) + (l + N).  The L^2 measure is dx dy, so
/// ||u||^2 = A B sum |u_{k l}|^2.
class FourierField {
 public:
  FourierField(const TorusLattice& lattice, int N);
  FourierField(const TorusLattice& lattice, int N, Eigen::VectorXcd coeffs);

  static FourierField mode(const TorusLattice& lattice, int N, int k, int l, cplx value = 1.0);

  const TorusLattice& lattice() const noexcept { return lattice_; }
  int truncation() const noexcept { return N_; }
  int side() const noexcept { return 2 * N_ + 1; }
  Eigen::Index size() const noexcept { return coeffs_.size(); }
  Eigen::Index index(int k, int l) const noexcept {
    return static_cast<Eigen::Index>(k + N_) * side() + (l + N_);
  }

  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }
  /// Zero outside the truncation.
  cplx coeff(int k, int l) const noexcept;

  cplx operator()(double x, double y) const;

  /// Values at (i A / M, j B / M); row index i runs along x.
  Eigen::MatrixXcd on_grid(int M) const;

  /// Rectangle-rule Fourier coefficients of grid samples (the band-N projection).
  static FourierField from_grid(const TorusLattice& lattice, int N, const Eigen::MatrixXcd& values);

  /// Same function with truncation N2: zero-padded, or cut when N2 < N.
  FourierField resized(int N2) const;

  /// Largest |k| or |l| carrying a coefficient above tol; -1 for the zero field.
  int band(double tol = 0.0) const;

  /// Max |u_{-k,-l} - conj(u_{k l})|.
  double reality_defect() const;

  FourierField conj_symmetric_part() const;

  FourierField& operator+=(const FourierField& other);
  FourierField& operator-=(const FourierField& other);
  FourierField& operator*=(cplx s);
  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(FourierField a, cplx s) { return a *= s; }
  friend FourierField operator*(cplx s, FourierField a) { return a *= s; }

 private:
  void check_compatible(const FourierField& other) const;

  TorusLattice lattice_;
  int N_;
  Eigen::VectorXcd coeffs_;
};

/// <u, v> = integral of u conj(v) over the torus.
cplx inner(const FourierField& u, const FourierField& v);

double norm_l2(const FourierField& u);

/// (A B sum (1 + |xi|^2)^s |u_{k l}|^2)^{1/2} with flat-Laplacian weights.
double norm_sobolev(const FourierField& u, double s);

struct FlatProfile {};
struct SobolevProfile {
  double s;
};
using RandomProfile = std::variant<FlatProfile, SobolevProfile>;

/// Complex Gaussian coefficients, variance (1 + |xi|^2)^s for the Sobolev profile,
/// normalised to unit L^2 norm.  Deterministic in the seed.
FourierField random_field(const TorusLattice& lattice, int N, std::uint64_t seed,
                          RandomProfile profile = FlatProfile{});

/// Unnormalised coefficient draw (the statistics oracle in the tests samples these).
FourierField random_coefficients(const TorusLattice& lattice, int N, std::uint64_t seed,
                                 RandomProfile profile = FlatProfile{});

/// Real trigonometric polynomial with modes of band <= N; coefficients scaled so that
/// sum |V_{k l}| = amplitude.  Deterministic in the seed.
FourierField random_real_field(const TorusLattice& lattice, int N, std::uint64_t seed,
                               double amplitude = 1.0);

/// Periodised Gaussian of width sqrt(h) centred at z0 with frequency xi0 / h,
/// band-limited to N and normalised in L^2.
FourierField coherent_state(const TorusLattice& lattice, int N, const Vec2& z0, const Vec2& xi0,
                            double h);

/// Table of exp(2 pi i j / M), j = 0..M-1.
Eigen::VectorXcd roots_of_unity(int M);

/// M x (2N+1) synthesis matrix E(i, k + N) = exp(2 pi i i k / M).  Grid values are
/// E C E^T with C(k + N, l + N) the coefficient array.
Eigen::MatrixXcd synthesis_matrix(int M, int N);

/// Coefficient array C(k + N, l + N) viewed as a square matrix, and back.
Eigen::MatrixXcd coefficient_matrix(const FourierField& u);
Eigen::VectorXcd flatten_coefficients(const Eigen::MatrixXcd& C);

}  // namespace torus
