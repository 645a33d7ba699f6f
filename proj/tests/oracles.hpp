#pragma once

// Independent reference computations shared by the test suites.  Nothing here calls
// the routine it is used to check.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "torus/field.hpp"
#include "torus/lattice.hpp"

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

/// Direct summation of the Fourier series at a point.
inline cplx eval(const torus::FourierField& u, double x, double y) {
  const int N = u.truncation();
  const double A = u.lattice().A(), B = u.lattice().B();
  cplx s = 0.0;
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l)
      s += u.coeffs()[u.index(k, l)] * std::polar(1.0, 2.0 * kPi * (k * x / A + l * y / B));
  return s;
}

/// Rectangle rule for the integral of |u|^2 w over the M x M grid, w = indicator(i, j).
template <class W>
double grid_mass(const torus::FourierField& u, int M, W&& weight) {
  const double A = u.lattice().A(), B = u.lattice().B();
  double s = 0.0;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const double w = weight(i, j);
      if (w != 0.0) s += w * std::norm(eval(u, A * i / M, B * j / M));
    }
  return s * A * B / (static_cast<double>(M) * M);
}

inline std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Exhaustive search for n q - m p = 1 ordered by (|p|, p, |q|, q).
inline std::pair<std::int64_t, std::int64_t> bezout(std::int64_t n, std::int64_t m) {
  const std::int64_t R = 2 * (std::abs(n) + std::abs(m)) + 2;
  bool found = false;
  std::int64_t bp = 0, bq = 0;
  auto better = [](std::int64_t p, std::int64_t q, std::int64_t bp, std::int64_t bq) {
    if (std::abs(p) != std::abs(bp)) return std::abs(p) < std::abs(bp);
    if (p != bp) return p < bp;
    if (std::abs(q) != std::abs(bq)) return std::abs(q) < std::abs(bq);
    return q < bq;
  };
  for (std::int64_t p = -R; p <= R; ++p)
    for (std::int64_t q = -R; q <= R; ++q)
      if (n * q - m * p == 1 && (!found || better(p, q, bp, bq))) {
        found = true;
        bp = p;
        bq = q;
      }
  return {bp, bq};
}

/// Random coprime pair with |n|, |m| <= bound.
inline std::pair<std::int64_t, std::int64_t> coprime_pair(std::mt19937_64& rng, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  for (;;) {
    const std::int64_t n = d(rng), m = d(rng);
    if ((n != 0 || m != 0) && gcd(n, m) == 1) return {n, m};
  }
}

/// Random complex vector with standard normal parts.
inline Eigen::VectorXcd gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

inline torus::FourierField gaussian_field(const torus::TorusLattice& lat, int N,
                                          std::mt19937_64& rng) {
  torus::FourierField u(lat, N, gaussian_vector(rng, (2 * N + 1) * (2 * N + 1)));
  return u * cplx(1.0 / torus::norm_l2(u));
}

/// Eigenvalues, by a dense Eigen solve, of the 1-D operator
/// (2 pi k / a + beta)^2 + sum_j w_j e^{2 pi i j x / a} on |k| <= N.
inline Eigen::VectorXd circle_spectrum(double a, double beta,
                                       const std::vector<std::pair<int, cplx>>& w, int N) {
  const int D = 2 * N + 1;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(D, D);
  for (int k = -N; k <= N; ++k) {
    const double f = 2.0 * kPi * k / a + beta;
    H(k + N, k + N) += f * f;
    for (const auto& [j, c] : w) {
      const int kk = k - j;
      if (kk >= -N && kk <= N) H(k + N, kk + N) += c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace oracle
