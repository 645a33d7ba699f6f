#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "torus/field.hpp"
#include "torus/lattice.hpp"

namespace torus {

/// Profile in the semiclassical frequency zeta.  `radius` bounds |zeta| on the support
/// (infinity for the constant profile).
struct ZetaProfile {
  std::string name;
  std::function<double(const Vec2&)> f;
  double radius;
};

ZetaProfile profile_one();
/// plateau(|zeta - center| / r): 1 on the disc of radius r/2, supported in radius r.
ZetaProfile profile_disc(const Vec2& center, double r);
/// plateau((|zeta| - rho) / w): 1 for ||zeta| - rho| <= w/2.
ZetaProfile profile_annulus(double rho, double w);

/// (k, l, c): the z-harmonic c exp(2 pi i (k x / A + l y / B)).
struct Harmonic {
  int k;
  int l;
  cplx c;
};

struct SymbolTerm {
  std::vector<Harmonic> harmonics;
  ZetaProfile profile;
};

/// a(z, zeta) = sum over terms of (finite Fourier series in z) * profile(zeta).
struct TestSymbol {
  std::string name;
  std::vector<SymbolTerm> terms;

  cplx operator()(const TorusLattice& lattice, const Vec2& z, const Vec2& zeta) const;
  /// Symbol a(z, zeta) = profile(zeta), independent of z.
  static TestSymbol multiplier(std::string name, ZetaProfile p);
};

/// <Op_h(a) u, u> with left quantization: each harmonic multiplies after the
/// Fourier multiplier profile(h D_z).
cplx matrix_element(const TestSymbol& a, const FourierField& u, double h);

struct MeasureScan {
  std::vector<double> h;              ///< strictly decreasing
  std::vector<std::string> symbols;
  Eigen::MatrixXcd values;            ///< symbols x h
  std::vector<cplx> limit;            ///< first-order Richardson on the two smallest h
  std::vector<double> error_bar;      ///< |limit - value at the smallest h|
};

MeasureScan measure_scan(const std::vector<std::pair<double, FourierField>>& sequence,
                         const std::vector<TestSymbol>& symbols);

/// Mass symbol (1 near |zeta| = 1) and two symbols supported off the unit circle.
TestSymbol mass_symbol();
std::vector<TestSymbol> off_circle_symbols();

struct MeasureSignatures {
  MeasureScan scan;           ///< rows: mass symbol, then the off-circle symbols
  cplx mass_limit;
  double mass_error;          ///< |mass_limit - 1|
  bool mass_ok;
  double off_circle_max;      ///< max |element| at the smallest h over off-circle symbols
  bool off_circle_ok;
};

MeasureSignatures measure_signatures(const std::vector<std::pair<double, FourierField>>& sequence,
                                     double mass_tol = 1e-2, double off_tol = 1e-3);

struct CoherentConvergence {
  std::vector<double> h;
  std::vector<cplx> values;
  cplx target;                 ///< a(z0, xi0)
  std::vector<double> error;
  std::vector<double> ratio;   ///< error(h_{i+1}) / error(h_i)
  double max_ratio;
  double constant;             ///< max error / sqrt(h)
};

CoherentConvergence coherent_convergence(const TestSymbol& a, const TorusLattice& lattice, int N,
                                         const Vec2& z0, const Vec2& xi0,
                                         const std::vector<double>& hs);

/// z-marginal of a coherent state launched along a closed orbit, time-averaged over
/// `passes` traversals in semiclassical time (t in [0, passes * h * b / 2], free flow),
/// compared with the uniform measure on the orbit through z0 computed by quadrature.
struct OrbitUniformity {
  std::vector<double> h;
  std::vector<double> deviation;   ///< max over harmonics 0 < max(|k|,|l|) <= K
  bool decreasing;
};

OrbitUniformity orbit_uniformity(const RationalDirection& d, const Vec2& z0,
                                 const std::vector<double>& hs, int N, int K = 1, int passes = 1);

/// Time average (1/T) int_0^T <exp(i kappa z) u(t), u(t)> dt under the free flow, exact.
cplx time_averaged_harmonic(const FourierField& u0, int k, int l, double T);

/// Coprime (n, m) with |n|, |m| <= bound, one per +-pair (n > 0, or (0, 1)), sorted by
/// orbit length, ties by n then m descending.
std::vector<RationalDirection> direction_census(const TorusLattice& lattice, int bound);

}  // namespace torus
