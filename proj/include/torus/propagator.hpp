#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "torus/field.hpp"
#include "torus/operator.hpp"
#include "torus/region.hpp"

namespace torus {

/// e^{-i t P_V} u0 through the cached eigenbasis.
FourierField evolve(const SchrodingerOperator& op, const FourierField& u0, double t);

/// e^{i t Delta} u0, exact per-mode phases (no eigensolve).
FourierField evolve_free(const FourierField& u0, double t);

/// Grid points of Omega at resolution M, with their indicator weights.
class ControlSupport {
 public:
  ControlSupport(const TorusLattice& lattice, const Region& omega, int M);

  const TorusLattice& lattice() const noexcept { return lattice_; }
  int grid() const noexcept { return M_; }
  Eigen::Index points() const noexcept { return weights_.size(); }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  int row(Eigen::Index p) const noexcept { return rows_[p]; }
  int col(Eigen::Index p) const noexcept { return cols_[p]; }
  double cell_area() const noexcept { return lattice_.area() / (static_cast<double>(M_) * M_); }

  /// Values at the support points of the fields whose band-N coefficients are the columns.
  Eigen::MatrixXcd sample(const Eigen::MatrixXcd& coeffs, int N) const;

  /// Band-N coefficients of w * f (zero off the support), one column per input column.
  Eigen::MatrixXcd project(const Eigen::MatrixXcd& values, int N) const;

 private:
  TorusLattice lattice_;
  int M_;
  std::vector<int> rows_;
  std::vector<int> cols_;
  Eigen::VectorXd weights_;
};

/// Trapezoid weights on nt + 1 uniform nodes of [0, T].
Eigen::VectorXd trapezoid_weights(double T, int nt);

/// A control sampled on the support at t_n = n T / nt, n = 0..nt.
struct ControlSamples {
  std::shared_ptr<const ControlSupport> support;
  double T = 0.0;
  int nt = 0;
  Eigen::MatrixXcd values;  ///< points x (nt + 1)

  double time(int n) const noexcept { return T * n / nt; }
  static ControlSamples zero(std::shared_ptr<const ControlSupport> support, double T, int nt);
};

/// Discrete L^2((0,T) x Omega) norm: trapezoid in time, rectangle rule in space.
double control_norm(const ControlSamples& f);
std::complex<double> control_inner(const ControlSamples& f, const ControlSamples& g);

struct ControlledResult {
  FourierField state;
  double error_estimate;  ///< Richardson estimate of the time-integration error
  int nt;
};

/// u(T) for i u_t = P_V u + P_N(w f) with the exponential trapezoid rule
/// u(T) = S(T) u0 - i sum_n w_n S(T - t_n) P_N(w f_n).  The error estimate compares
/// against the rule on every other node; it is NaN when nt is odd.
ControlledResult evolve_controlled(const SchrodingerOperator& op, const FourierField& u0,
                                   const ControlSamples& f);

/// Same rule for a source given as a function of time, restricted to Omega on the
/// M x M grid.  The estimate compares nt against 2 nt.
ControlledResult evolve_controlled(const SchrodingerOperator& op, const FourierField& u0,
                                   const std::function<FourierField(double)>& f,
                                   const Region& omega, double T, int nt, int M);

}  // namespace torus
