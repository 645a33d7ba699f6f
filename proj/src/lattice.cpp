#include "torus/lattice.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "torus/errors.hpp"
#include "torus/field.hpp"

namespace torus {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Returns (g, x, y) with a x + b y = g = gcd(a, b) >= 0.
void extended_gcd(std::int64_t a, std::int64_t b, std::int64_t& g, std::int64_t& x,
                  std::int64_t& y) {
  std::int64_t r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t qt = r0 / r1;
    std::int64_t tmp = r0 - qt * r1;
    r0 = r1;
    r1 = tmp;
    tmp = s0 - qt * s1;
    s0 = s1;
    s1 = tmp;
    tmp = t0 - qt * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (r0 < 0) {
    r0 = -r0;
    s0 = -s0;
    t0 = -t0;
  }
  g = r0;
  x = s0;
  y = t0;
}

bool better(std::int64_t p, std::int64_t best) {
  const auto ap = p < 0 ? -p : p;
  const auto ab = best < 0 ? -best : best;
  return ap < ab || (ap == ab && p < best);
}

}  // namespace

TorusLattice::TorusLattice(double A, double B) : A_(A), B_(B) {
  if (!(A > 0.0) || !(B > 0.0) || !std::isfinite(A) || !std::isfinite(B))
    throw InvalidArgument("torus side lengths must be positive and finite");
}

Vec2 TorusLattice::frequency(int k, int l) const noexcept {
  return {kTwoPi * k / A_, kTwoPi * l / B_};
}

Vec2 RationalDirection::to_torus(double x, double y) const noexcept {
  return {x * xi0_perp[0] + y * xi0[0], x * xi0_perp[1] + y * xi0[1]};
}

Vec2 RationalDirection::from_torus(const Vec2& z) const noexcept {
  return {z[0] * xi0_perp[0] + z[1] * xi0_perp[1], z[0] * xi0[0] + z[1] * xi0[1]};
}

RationalDirection make_direction(const TorusLattice& lattice, std::int64_t n, std::int64_t m) {
  if (n == 0 && m == 0) throw InvalidDirection("direction (0, 0) is not a direction");
  if (std::abs(n) > kMaxDirectionComponent || std::abs(m) > kMaxDirectionComponent)
    throw InvalidDirection("direction components exceed " + std::to_string(kMaxDirectionComponent));
  if (std::gcd(n, m) != 1)
    throw InvalidDirection("direction (" + std::to_string(n) + ", " + std::to_string(m) +
                           ") is not coprime");

  // n q - m p = 1.  Solutions are (p0 + t n, q0 + t m).
  std::int64_t p = 0, q = 0;
  if (n == 0) {
    p = -m;  // m = +-1, q free: smallest |q| is 0
    q = 0;
  } else {
    std::int64_t g, x, y;
    extended_gcd(n, -m, g, x, y);  // n x - m y = 1
    const std::int64_t an = std::abs(n);
    std::int64_t base = ((y % an) + an) % an;  // representative in [0, |n|)
    std::int64_t best = base;
    for (std::int64_t cand : {base - an, base, base + an})
      if (better(cand, best)) best = cand;
    p = best;
    q = (1 + m * p) / n;
  }
  if (n * q - m * p != 1) throw InvalidDirection("Bezout normalisation failed");

  const double A = lattice.A(), B = lattice.B();
  const double nA = static_cast<double>(n) * A;
  const double mB = static_cast<double>(m) * B;
  const double b = std::hypot(nA, mB);

  RationalDirection d{lattice, n, m, p, q, {nA / b, mB / b}, {-mB / b, nA / b}, 0.0, b, 0.0};
  d.a = static_cast<double>(q * n - p * m) * A * B / b;
  d.gamma = -(static_cast<double>(p) * static_cast<double>(n) * A * A +
              static_cast<double>(q) * static_cast<double>(m) * B * B) /
            b;
  return d;
}

std::complex<double> pullback(const FourierField& u, const RationalDirection& d, double x,
                              double y) {
  const Vec2 z = d.to_torus(x, y);
  return u(z[0], z[1]);
}

double check_twisted_periodicity(const FourierField& u, const RationalDirection& d, int trials,
                                 std::uint64_t seed, TwistConvention convention) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 4.0 * d.a), uy(0.0, d.b);
  std::uniform_int_distribution<int> uk(-3, 3);
  const double sign = convention == TwistConvention::plus_gamma ? 1.0 : -1.0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double x = ux(rng), y = uy(rng);
    const int k = uk(rng), l = uk(rng);
    const auto lhs = pullback(u, d, x + k * d.a, y + l * d.b);
    const auto rhs = pullback(u, d, x, y + sign * k * d.gamma);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double rational_period(const RationalDirection& d, std::int64_t r, std::int64_t s) {
  if (r <= 0 || s <= 0) throw InvalidArgument("rational aspect ratio needs r, s > 0");
  const double w = static_cast<double>(d.n * d.n * s * s + d.m * d.m * r * r);
  return w * d.a;
}

double check_rational_periodicity(const FourierField& u, const RationalDirection& d,
                                  std::int64_t r, std::int64_t s, int trials,
                                  std::uint64_t seed) {
  const double at = rational_period(d, r, s);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, at), uy(0.0, d.b);
  std::uniform_int_distribution<int> uk(-3, 3);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double x = ux(rng), y = uy(rng);
    const int k = uk(rng), l = uk(rng);
    const auto lhs = pullback(u, d, x + k * at, y + l * d.b);
    worst = std::max(worst, std::abs(lhs - pullback(u, d, x, y)));
  }
  return worst;
}

}  // namespace torus
