#include "torus/field.hpp"

#include <cmath>
#include <random>

#include "torus/errors.hpp"

namespace torus {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

double weight(const TorusLattice& lat, int k, int l, const RandomProfile& profile) {
  if (const auto* s = std::get_if<SobolevProfile>(&profile)) {
    const Vec2 xi = lat.frequency(k, l);
    return std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], s->s);
  }
  return 1.0;
}
}  // namespace

FourierField::FourierField(const TorusLattice& lattice, int N)
    : lattice_(lattice), N_(N), coeffs_(Eigen::VectorXcd::Zero((2 * N + 1) * (2 * N + 1))) {
  if (N < 1) throw InvalidArgument("truncation N must be >= 1");
}

FourierField::FourierField(const TorusLattice& lattice, int N, Eigen::VectorXcd coeffs)
    : lattice_(lattice), N_(N), coeffs_(std::move(coeffs)) {
  if (N < 1) throw InvalidArgument("truncation N must be >= 1");
  if (coeffs_.size() != static_cast<Eigen::Index>(side()) * side())
    throw InvalidArgument("coefficient vector has the wrong length for truncation N");
}

FourierField FourierField::mode(const TorusLattice& lattice, int N, int k, int l, cplx value) {
  if (std::abs(k) > N || std::abs(l) > N) throw InvalidArgument("mode outside the truncation");
  FourierField u(lattice, N);
  u.coeffs_[u.index(k, l)] = value;
  return u;
}

cplx FourierField::coeff(int k, int l) const noexcept {
  if (std::abs(k) > N_ || std::abs(l) > N_) return 0.0;
  return coeffs_[index(k, l)];
}

cplx FourierField::operator()(double x, double y) const {
  // Reduce first so the phases keep full relative precision far from the origin.
  const double xr = std::fmod(x, lattice_.A()) / lattice_.A();
  const double yr = std::fmod(y, lattice_.B()) / lattice_.B();
  const int S = side();
  Eigen::VectorXcd ex(S), ey(S);
  for (int k = -N_; k <= N_; ++k) {
    ex[k + N_] = std::polar(1.0, kTwoPi * k * xr);
    ey[k + N_] = std::polar(1.0, kTwoPi * k * yr);
  }
  cplx sum = 0.0;
  for (int k = 0; k < S; ++k) {
    cplx row = 0.0;
    for (int l = 0; l < S; ++l) row += coeffs_[static_cast<Eigen::Index>(k) * S + l] * ey[l];
    sum += row * ex[k];
  }
  return sum;
}

Eigen::MatrixXcd FourierField::on_grid(int M) const {
  if (M < 1) throw InvalidArgument("grid size must be positive");
  const Eigen::MatrixXcd E = synthesis_matrix(M, N_);
  return E * coefficient_matrix(*this) * E.transpose();
}

FourierField FourierField::from_grid(const TorusLattice& lattice, int N,
                                     const Eigen::MatrixXcd& values) {
  const auto M = values.rows();
  if (values.cols() != M) throw InvalidArgument("grid samples must be square");
  if (M < 2 * N + 1) throw InvalidArgument("grid too coarse for the truncation");
  const Eigen::MatrixXcd E = synthesis_matrix(static_cast<int>(M), N);
  const Eigen::MatrixXcd C = E.adjoint() * values * E.conjugate() / static_cast<double>(M * M);
  return FourierField(lattice, N, flatten_coefficients(C));
}

FourierField FourierField::resized(int N2) const {
  FourierField out(lattice_, N2);
  const int n = std::min(N_, N2);
  for (int k = -n; k <= n; ++k)
    for (int l = -n; l <= n; ++l) out.coeffs_[out.index(k, l)] = coeffs_[index(k, l)];
  return out;
}

int FourierField::band(double tol) const {
  int b = -1;
  for (int k = -N_; k <= N_; ++k)
    for (int l = -N_; l <= N_; ++l)
      if (std::abs(coeffs_[index(k, l)]) > tol) b = std::max({b, std::abs(k), std::abs(l)});
  return b;
}

double FourierField::reality_defect() const {
  double d = 0.0;
  for (int k = -N_; k <= N_; ++k)
    for (int l = -N_; l <= N_; ++l)
      d = std::max(d, std::abs(coeffs_[index(-k, -l)] - std::conj(coeffs_[index(k, l)])));
  return d;
}

FourierField FourierField::conj_symmetric_part() const {
  FourierField out(lattice_, N_);
  for (int k = -N_; k <= N_; ++k)
    for (int l = -N_; l <= N_; ++l)
      out.coeffs_[index(k, l)] = 0.5 * (coeffs_[index(k, l)] + std::conj(coeffs_[index(-k, -l)]));
  return out;
}

void FourierField::check_compatible(const FourierField& other) const {
  if (!(lattice_ == other.lattice_) || N_ != other.N_)
    throw InvalidArgument("fields live on different lattices or truncations");
}

FourierField& FourierField::operator+=(const FourierField& other) {
  check_compatible(other);
  coeffs_ += other.coeffs_;
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& other) {
  check_compatible(other);
  coeffs_ -= other.coeffs_;
  return *this;
}

FourierField& FourierField::operator*=(cplx s) {
  coeffs_ *= s;
  return *this;
}

cplx inner(const FourierField& u, const FourierField& v) {
  if (!(u.lattice() == v.lattice()) || u.truncation() != v.truncation())
    throw InvalidArgument("inner product of incompatible fields");
  // Eigen's dot conjugates the first argument.
  return u.lattice().area() * v.coeffs().dot(u.coeffs());
}

double norm_l2(const FourierField& u) {
  return std::sqrt(u.lattice().area()) * u.coeffs().norm();
}

double norm_sobolev(const FourierField& u, double s) {
  const int N = u.truncation();
  double acc = 0.0;
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l)
      acc += weight(u.lattice(), k, l, SobolevProfile{s}) * std::norm(u.coeffs()[u.index(k, l)]);
  return std::sqrt(u.lattice().area() * acc);
}

FourierField random_coefficients(const TorusLattice& lattice, int N, std::uint64_t seed,
                                 RandomProfile profile) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  FourierField u(lattice, N);
  Eigen::VectorXcd c(u.size());
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l) {
      const double re = g(rng), im = g(rng);
      c[u.index(k, l)] = std::sqrt(weight(lattice, k, l, profile)) * cplx(re, im);
    }
  return FourierField(lattice, N, std::move(c));
}

FourierField random_field(const TorusLattice& lattice, int N, std::uint64_t seed,
                          RandomProfile profile) {
  FourierField u = random_coefficients(lattice, N, seed, profile);
  return u * cplx(1.0 / norm_l2(u));
}

FourierField random_real_field(const TorusLattice& lattice, int N, std::uint64_t seed,
                               double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  FourierField u(lattice, N);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(u.size());
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l) {
      if (k < 0 || (k == 0 && l < 0)) continue;
      const double re = g(rng), im = g(rng);
      if (k == 0 && l == 0) {
        c[u.index(0, 0)] = re;
      } else {
        c[u.index(k, l)] = cplx(re, im);
        c[u.index(-k, -l)] = cplx(re, -im);
      }
    }
  const double l1 = c.cwiseAbs().sum();
  if (l1 > 0.0) c *= amplitude / l1;
  return FourierField(lattice, N, std::move(c));
}

FourierField coherent_state(const TorusLattice& lattice, int N, const Vec2& z0, const Vec2& xi0,
                            double h) {
  if (!(h > 0.0)) throw InvalidArgument("semiclassical parameter h must be positive");
  FourierField u(lattice, N);
  Eigen::VectorXcd c(u.size());
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l) {
      const Vec2 xi = lattice.frequency(k, l);
      const double d0 = xi[0] - xi0[0] / h, d1 = xi[1] - xi0[1] / h;
      const double amp = std::exp(-0.5 * h * (d0 * d0 + d1 * d1));
      c[u.index(k, l)] = std::polar(amp, -(xi[0] * z0[0] + xi[1] * z0[1]));
    }
  const double nrm = std::sqrt(lattice.area()) * c.norm();
  if (!(nrm > 0.0)) throw NumericalError("coherent state underflows in the truncation");
  c /= nrm;
  return FourierField(lattice, N, std::move(c));
}

Eigen::VectorXcd roots_of_unity(int M) {
  Eigen::VectorXcd w(M);
  for (int j = 0; j < M; ++j) w[j] = std::polar(1.0, kTwoPi * j / M);
  return w;
}

Eigen::MatrixXcd synthesis_matrix(int M, int N) {
  const Eigen::VectorXcd w = roots_of_unity(M);
  Eigen::MatrixXcd E(M, 2 * N + 1);
  for (int i = 0; i < M; ++i)
    for (int k = -N; k <= N; ++k) {
      const long long e = (static_cast<long long>(i) * k) % M;
      E(i, k + N) = w[static_cast<int>(e < 0 ? e + M : e)];
    }
  return E;
}

Eigen::MatrixXcd coefficient_matrix(const FourierField& u) {
  const int S = u.side();
  Eigen::MatrixXcd C(S, S);
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b) C(a, b) = u.coeffs()[static_cast<Eigen::Index>(a) * S + b];
  return C;
}

Eigen::VectorXcd flatten_coefficients(const Eigen::MatrixXcd& C) {
  const auto S = C.rows();
  Eigen::VectorXcd c(S * S);
  for (Eigen::Index a = 0; a < S; ++a)
    for (Eigen::Index b = 0; b < S; ++b) c[a * S + b] = C(a, b);
  return c;
}

}  // namespace torus
