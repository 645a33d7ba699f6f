#pragma once

#include <Eigen/Dense>
#include <complex>

namespace torus {

/// Truncated Fourier series v(x) = sum v_k e^{2 pi i k x / a}, |k| <= N, on the circle
/// R / a Z.  ||v||^2 = a sum |v_k|^2.
class CircleField {
 public:
  CircleField(double length, int N);
  CircleField(double length, int N, Eigen::VectorXcd coeffs);

  static CircleField mode(double length, int N, int k, std::complex<double> value = 1.0);

  double length() const noexcept { return length_; }
  int truncation() const noexcept { return N_; }
  Eigen::Index size() const noexcept { return coeffs_.size(); }
  Eigen::Index index(int k) const noexcept { return k + N_; }
  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }
  std::complex<double> coeff(int k) const noexcept;

  std::complex<double> operator()(double x) const;
  CircleField resized(int N2) const;
  double reality_defect() const;

 private:
  double length_;
  int N_;
  Eigen::VectorXcd coeffs_;
};

double norm_l2(const CircleField& v);

/// (a sum (1 + (2 pi k / a)^2)^s |v_k|^2)^{1/2}.
double norm_sobolev(const CircleField& v, double s);

/// Periodic arc [lo, hi) on the circle; 0 < hi - lo <= length.
struct Interval {
  double lo;
  double hi;
  double width() const noexcept { return hi - lo; }
};

/// G(j, k) = integral over the arc of e^{2 pi i (k - j) x / a}, so that the mass
/// of v on the arc is v^* G v.  Exact.
Eigen::MatrixXcd interval_gram(double length, int N, const Interval& arc);

double interval_mass(const CircleField& v, const Interval& arc);

}  // namespace torus
