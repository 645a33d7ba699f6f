#include "torus/circle_field.hpp"

#include <cmath>

#include "torus/errors.hpp"

namespace torus {

CircleField::CircleField(double length, int N)
    : length_(length), N_(N), coeffs_(Eigen::VectorXcd::Zero(2 * N + 1)) {
  if (!(length > 0.0)) throw InvalidArgument("circle length must be positive");
  if (N < 1) throw InvalidArgument("truncation N must be >= 1");
}

CircleField::CircleField(double length, int N, Eigen::VectorXcd coeffs)
    : length_(length), N_(N), coeffs_(std::move(coeffs)) {
  if (!(length > 0.0)) throw InvalidArgument("circle length must be positive");
  if (N < 1) throw InvalidArgument("truncation N must be >= 1");
  if (coeffs_.size() != 2 * N + 1) throw InvalidArgument("coefficient vector has the wrong length");
}

CircleField CircleField::mode(double length, int N, int k, std::complex<double> value) {
  if (std::abs(k) > N) throw InvalidArgument("mode outside the truncation");
  CircleField v(length, N);
  v.coeffs_[v.index(k)] = value;
  return v;
}

std::complex<double> CircleField::coeff(int k) const noexcept {
  return std::abs(k) > N_ ? 0.0 : coeffs_[index(k)];
}

std::complex<double> CircleField::operator()(double x) const {
  const double xr = std::fmod(x, length_) / length_;
  std::complex<double> s = 0.0;
  for (int k = -N_; k <= N_; ++k) s += coeffs_[index(k)] * std::polar(1.0, 2.0 * M_PI * k * xr);
  return s;
}

CircleField CircleField::resized(int N2) const {
  CircleField out(length_, N2);
  const int n = std::min(N_, N2);
  for (int k = -n; k <= n; ++k) out.coeffs_[out.index(k)] = coeffs_[index(k)];
  return out;
}

double CircleField::reality_defect() const {
  double d = 0.0;
  for (int k = -N_; k <= N_; ++k)
    d = std::max(d, std::abs(coeffs_[index(-k)] - std::conj(coeffs_[index(k)])));
  return d;
}

double norm_l2(const CircleField& v) { return std::sqrt(v.length()) * v.coeffs().norm(); }

double norm_sobolev(const CircleField& v, double s) {
  const int N = v.truncation();
  double acc = 0.0;
  for (int k = -N; k <= N; ++k) {
    const double xi = 2.0 * M_PI * k / v.length();
    acc += std::pow(1.0 + xi * xi, s) * std::norm(v.coeffs()[v.index(k)]);
  }
  return std::sqrt(v.length() * acc);
}

Eigen::MatrixXcd interval_gram(double length, int N, const Interval& arc) {
  const double w = arc.width();
  if (!(w > 0.0) || w > length * (1.0 + 1e-14))
    throw InvalidArgument("arc width must lie in (0, length]");
  const int S = 2 * N + 1;
  // g[d] = integral of e^{2 pi i d x / a} over the arc, d = k - j in [-2N, 2N].
  Eigen::VectorXcd g(2 * S - 1);
  for (int d = -2 * N; d <= 2 * N; ++d) {
    if (d == 0) {
      g[d + 2 * N] = w;
      continue;
    }
    const double om = 2.0 * M_PI * d / length;
    g[d + 2 * N] = (std::polar(1.0, om * arc.hi) - std::polar(1.0, om * arc.lo)) /
                   std::complex<double>(0.0, om);
  }
  Eigen::MatrixXcd G(S, S);
  for (int j = 0; j < S; ++j)
    for (int k = 0; k < S; ++k) G(j, k) = g[k - j + 2 * N];
  return G;
}

double interval_mass(const CircleField& v, const Interval& arc) {
  const Eigen::MatrixXcd G = interval_gram(v.length(), v.truncation(), arc);
  return std::real(v.coeffs().dot(G * v.coeffs()));
}

}  // namespace torus
