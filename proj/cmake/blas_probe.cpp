// Configure-time check that the BLAS/LAPACK pair computes correct products and
// eigenvectors.  Exit status 0 on success.
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

extern "C" void dgemm_(const char*, const char*, const int*, const int*, const int*, const double*,
                       const double*, const int*, const double*, const int*, const double*, double*,
                       const int*);

int main() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const int n = 400;
  std::vector<double> a(n * n), b(n * n), c(n * n, 0.0);
  for (auto& x : a) x = g(rng);
  for (auto& x : b) x = g(rng);
  const double one = 1.0, zero = 0.0;
  dgemm_("N", "N", &n, &n, &n, &one, a.data(), &n, b.data(), &n, &zero, c.data(), &n);
  double err = 0.0, ref = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += a[i + k * n] * b[k + j * n];
      err = std::fmax(err, std::fabs(s - c[i + j * n]));
      ref = std::fmax(ref, std::fabs(s));
    }
  if (!(err <= 1e-12 * ref)) {
    std::printf("dgemm error %g\n", err / ref);
    return 1;
  }
  const int m = 300;
  std::vector<std::complex<double>> h(m * m), v;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i <= j; ++i) {
      const std::complex<double> z(g(rng), i == j ? 0.0 : g(rng));
      h[i + j * m] = z;
      h[j + i * m] = std::conj(z);
    }
  v = h;
  std::vector<double> w(m);
  if (LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', m, v.data(), m, w.data()) != 0) return 1;
  double res = 0.0, hn = 0.0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      std::complex<double> s = 0.0;
      for (int k = 0; k < m; ++k) s += h[i + k * m] * v[k + j * m];
      res = std::fmax(res, std::abs(s - w[j] * v[i + j * m]));
      hn = std::fmax(hn, std::abs(h[i + j * m]));
    }
  if (!(res <= 1e-10 * hn * m)) {
    std::printf("zheevd residual %g\n", res / hn);
    return 1;
  }
  return 0;
}
