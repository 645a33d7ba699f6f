#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torus/circle_field.hpp"
#include "torus/field.hpp"
#include "torus/lattice.hpp"

namespace torus {

/// Coordinates (x, y) in which the averaging runs: y along the closed orbits, x across.
/// The axis frame is the torus itself (orbits along y, period B).  A direction frame
/// uses the strip coordinates of F(x, y) = x Xi0_perp + y Xi0.
class StripFrame {
 public:
  static StripFrame axis(const TorusLattice& lattice);
  static StripFrame along(const RationalDirection& d);

  bool is_axis() const noexcept { return !direction_.has_value(); }
  const TorusLattice& lattice() const noexcept { return lattice_; }
  const std::optional<RationalDirection>& direction() const noexcept { return direction_; }

  /// Frequencies (xi, eta) of the torus mode (k, l) in frame coordinates.
  Vec2 frequency(int k, int l) const noexcept;
  /// Frame point to torus point.
  Vec2 to_torus(double x, double y) const noexcept;
  /// Transverse period: A for the axis frame, a for a direction.
  double transverse_period() const noexcept;
  /// True when the mode is constant along the orbits (eta = 0).
  bool on_orbit_average(int k, int l) const noexcept;

 private:
  StripFrame(const TorusLattice& lattice, std::optional<RationalDirection> d)
      : lattice_(lattice), direction_(std::move(d)) {}
  TorusLattice lattice_;
  std::optional<RationalDirection> direction_;
};

/// chi2(xi, eta) = plateau((xi - xc) / wx) plateau((eta - ec) / we); the wider
/// chi2_tilde doubles both widths, so chi2_tilde = 1 on supp chi2.
struct FrequencyWindow {
  double xi_c = 0.0;
  double eta_c = 1.0;
  double w_xi = 0.25;
  double w_eta = 0.25;

  void validate() const;
  /// Distance of supp chi2 to {eta = 0}.
  double eta_min() const noexcept;
  double chi2(double xi, double eta) const;
  double chi2_tilde(double xi, double eta) const;
  /// zeta = 1 on the eta-projection of supp chi2, zero for |eta| <= eta_min / 2.
  double zeta(double eta) const;
  /// zeta(eta) / (2 eta).
  double profile(double eta) const;
};

enum class CorrectorVariant { basepoint, zero_mean };
std::string to_string(CorrectorVariant v);
CorrectorVariant parse_corrector_variant(const std::string& name);

/// q(x, y, eta) = c(x, y) zeta(eta) / (2 eta) with c = i times the y-primitive of V - V0.
/// Stored as torus Fourier data for c (zero-mean variant) plus the analytic profile.
class CorrectorSymbol {
 public:
  CorrectorSymbol(StripFrame frame, FrequencyWindow window, CorrectorVariant variant,
                  FourierField c_zero_mean);

  const StripFrame& frame() const noexcept { return frame_; }
  const FrequencyWindow& window() const noexcept { return window_; }
  CorrectorVariant variant() const noexcept { return variant_; }
  /// Zero-mean amplitude c as a torus field.
  const FourierField& amplitude() const noexcept { return c_; }

  /// c(x, y) in frame coordinates for the stored variant.
  cplx amplitude_at(double x, double y) const;
  cplx operator()(double x, double y, double eta) const;
  /// d/dy of the amplitude, exact from the Fourier data.
  cplx amplitude_dy(double x, double y) const;
  /// d/dx of the amplitude (transverse derivative), zero-mean variant.
  FourierField amplitude_dx() const;

  /// Torus amplitude of the basepoint variant; only exists in the axis frame.
  FourierField basepoint_amplitude() const;

 private:
  StripFrame frame_;
  FrequencyWindow window_;
  CorrectorVariant variant_;
  FourierField c_;
};

/// Orbit average V0 as a function of the transverse coordinate, period A (axis) or a.
CircleField average_potential(const FourierField& V, const StripFrame& frame);

/// V0 pulled back to the torus: the eta = 0 modes of V.
FourierField average_potential_torus(const FourierField& V, const StripFrame& frame);

CorrectorSymbol build_corrector(const FourierField& V, const StripFrame& frame,
                                const FrequencyWindow& window, CorrectorVariant variant);

/// Max over an nx x ny x neta grid of |-(2/i) eta d_y q + V - V0| with (x, y) covering one
/// transverse period by one orbit and eta inside the window.
double transport_residual(const CorrectorSymbol& q, const FourierField& V, int nx = 64,
                          int ny = 64, int neta = 16);

/// Which formula is used for the W symbol.
enum class WCandidate {
  commutator,       ///< 2 i xi d_x q chi_tilde, from h [Q, D_x^2]
  stated,           ///< 2 xi (1/i) d_x q chi_tilde
  literal_inverse,  ///< (2 / xi) i d_x q chi_tilde
};
std::string to_string(WCandidate w);

/// The operators of the conjugation identities on a finite mode box: supp chi2 / h
/// dilated by the total band, so every product below is exact.
struct NormalFormMatrices {
  std::vector<std::pair<int, int>> modes;
  Eigen::MatrixXcd Dx2, Dy2, Chi, V, V0, Q, W;
};

NormalFormMatrices assemble_normal_form(const FourierField& V, const CorrectorSymbol& q, double h,
                                        WCandidate candidate = WCandidate::commutator);

/// Largest singular value by power iteration on A^* A from a seeded random start.
double operator_norm_estimate(const Eigen::MatrixXcd& A, int iterations = 30,
                              std::uint64_t seed = 7);

/// ||(I + hQ)(D_y^2 + V) chi - (D_y^2 + V0)(I + hQ) chi|| / h.
double conjugation_residual(const FourierField& V, const StripFrame& frame,
                            const FrequencyWindow& window, double h,
                            CorrectorVariant variant = CorrectorVariant::zero_mean);

struct WCheck {
  WCandidate candidate;
  std::vector<double> h;
  std::vector<double> residual;  ///< residual of the full identity divided by h, per h
  double ratio;                  ///< max / min residual over h
  double xi0_slice;              ///< max |W(x, y, 0, eta)| on a test grid
  bool bounded;
  bool vanishes_at_xi0;
};

struct WReport {
  std::vector<WCheck> candidates;
  WCandidate selected;
  double bound_ratio;
};

/// Tries every candidate W; the first listed candidate whose residual/h stays within
/// bound_ratio across h and whose symbol vanishes at xi = 0 is selected.  Throws
/// NormalFormInconsistency when none passes.
WReport build_w_and_check(const FourierField& V, const StripFrame& frame,
                          const FrequencyWindow& window, const std::vector<double>& hs,
                          CorrectorVariant variant = CorrectorVariant::zero_mean,
                          double bound_ratio = 2.0);

/// Evaluates the chosen W symbol at a frame point.
cplx w_symbol(const CorrectorSymbol& q, WCandidate candidate, double x, double y, double xi,
              double eta);

}  // namespace torus
