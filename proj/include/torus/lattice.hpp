#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace torus {

using Vec2 = std::array<double, 2>;

/// The torus R^2 / (A Z x B Z), identified with [0, A) x [0, B).
class TorusLattice {
 public:
  TorusLattice(double A, double B);

  double A() const noexcept { return A_; }
  double B() const noexcept { return B_; }
  double area() const noexcept { return A_ * B_; }

  /// Angular frequency (2 pi k / A, 2 pi l / B) of the mode e^{2 pi i (k x / A + l y / B)}.
  Vec2 frequency(int k, int l) const noexcept;

  friend bool operator==(const TorusLattice&, const TorusLattice&) = default;

 private:
  double A_;
  double B_;
};

/// Which form of the twisted periodicity the check compares against.
enum class TwistConvention {
  /// F*u(x + k a, y + l b) = F*u(x, y + k gamma): holds for every coprime direction
  /// with gamma = -(p n A^2 + q m B^2) / b.
  plus_gamma,
  /// F*u(x + k a, y + l b) = F*u(x, y - k gamma); holds only
  /// when 2 gamma / b is an integer, e.g. the diagonal of a square torus.
  minus_gamma,
};

/// A closed geodesic direction Xi0 ~ (n A, m B) together with the strip constants
/// of the covering change of coordinates F(x, y) = x Xi0_perp + y Xi0.
struct RationalDirection {
  TorusLattice lattice;
  std::int64_t n;
  std::int64_t m;
  std::int64_t p;  ///< Bezout partner: n q - m p = 1.
  std::int64_t q;
  Vec2 xi0;
  Vec2 xi0_perp;
  double a;      ///< transverse (strip) width
  double b;      ///< orbit length
  double gamma;  ///< twist

  /// F(x, y) = x Xi0_perp + y Xi0.
  Vec2 to_torus(double x, double y) const noexcept;
  /// Inverse of F (F is orthogonal).
  Vec2 from_torus(const Vec2& z) const noexcept;
};

inline constexpr std::int64_t kMaxDirectionComponent = 1'000'000;

/// Builds the direction for coprime (n, m) != (0, 0).  The Bezout pair minimises |p|,
/// then p, then |q|, then q.  Throws InvalidDirection otherwise.
RationalDirection make_direction(const TorusLattice& lattice, std::int64_t n, std::int64_t m);

class FourierField;

/// u(x Xi0_perp + y Xi0), evaluated exactly from the Fourier coefficients.
std::complex<double> pullback(const FourierField& u, const RationalDirection& d, double x,
                              double y);

/// Max over random (x, y, k, l), |k|, |l| <= 3, of the twisted-periodicity defect.
double check_twisted_periodicity(const FourierField& u, const RationalDirection& d, int trials,
                                 std::uint64_t seed,
                                 TwistConvention convention = TwistConvention::plus_gamma);

/// Period (n^2 s^2 + m^2 r^2) a of F*u in x on a torus with B / A = r / s.
double rational_period(const RationalDirection& d, std::int64_t r, std::int64_t s);

/// Max over random (x, y, k, l) of |F*u(x + k a~, y + l b) - F*u(x, y)| with a~ as above.
double check_rational_periodicity(const FourierField& u, const RationalDirection& d,
                                  std::int64_t r, std::int64_t s, int trials,
                                  std::uint64_t seed);

}  // namespace torus
