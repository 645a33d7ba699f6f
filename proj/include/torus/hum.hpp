#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "torus/field.hpp"
#include "torus/observability.hpp"
#include "torus/propagator.hpp"

namespace torus {

/// Discrete HUM data for a control problem.  Controls live on the nt + 1 trapezoid nodes
/// of [0, T] at the grid points of Omega.  With L f = -i sum_n w_n S(T - t_n) P_N(w f_n)
/// the Gramian is L L^* = sum_n w_n S(T - t_n) P_N(w^2 S(t_n - T) .), a Hermitian PSD
/// matrix on the band-N space.
class HumOperator {
 public:
  explicit HumOperator(const ControlProblem& cp);

  const ControlProblem& problem() const noexcept { return cp_; }
  const std::shared_ptr<const ControlSupport>& support() const noexcept { return support_; }

  /// Matrix-free Gramian action: time-node loop with the grid restriction.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& phi) const;

  /// The Gramian in eigen coordinates from the closed-form trapezoid kernel.
  const Eigen::MatrixXcd& dense_eigen() const;

  /// Control-to-state map L (u0 = 0).
  Eigen::VectorXcd control_to_state(const ControlSamples& f) const;
  /// L^* psi.
  ControlSamples adjoint(const Eigen::VectorXcd& psi) const;
  /// The HUM control w S(t_n - T) phi_T, i.e. the adjoint trajectory sampled on Omega.
  ControlSamples control_from_adjoint(const Eigen::VectorXcd& phiT) const;

 private:
  Eigen::MatrixXcd node_phases(double sign) const;  // D x (nt + 1): e^{sign i l (T - t_n)}

  ControlProblem cp_;
  std::shared_ptr<const ControlSupport> support_;
  Eigen::VectorXd weights_;  // trapezoid weights
  Eigen::MatrixXcd pi2_;     // coefficient-space restriction with squared weights
  struct Cache {
    std::once_flag once;
    Eigen::MatrixXcd dense;
  };
  std::shared_ptr<Cache> cache_;
};

FourierField gramian_apply(const ControlProblem& cp, const FourierField& phiT);

/// G[i, j] = <Lambda e_i, e_j> for the first J L^2-normalised eigenfunctions.
Eigen::MatrixXcd gramian_dense(const ControlProblem& cp, Eigen::Index J);

struct HumOptions {
  double tol = 1e-8;
  int maxit = 500;
  /// Pivot threshold relative to the largest Gramian scale seen in CG.
  double singular_tol = 1e-14;
};

struct HumSolution {
  ControlSamples control;
  FourierField phiT;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history = {};      ///< ||r_k|| / ||b||
  std::vector<double> energy_error_history = {};  ///< ||x_K - x_k||_Lambda^2 / ||x_K||_Lambda^2
  double final_miss = 0.0;                   ///< ||u(T)|| / ||u0|| from evolve_controlled
  double integrator_error = 0.0;             ///< Richardson estimate, relative to ||u0||
  double condition_estimate = 1.0;           ///< Lanczos estimate from the CG coefficients
  double control_norm = 0.0;
};

/// Matrix-free CG on Lambda phi_T = -i S(T) u0.  Throws IllPosedControl when Lambda is
/// numerically singular on the Krylov space.
HumSolution hum_solve(const ControlProblem& cp, const FourierField& u0,
                      const HumOptions& options = {});
HumSolution hum_solve(const HumOperator& hum, const FourierField& u0,
                      const HumOptions& options = {});

struct DenseHumSolution {
  FourierField phiT;
  ControlSamples control;
  double final_miss;
};

/// Direct Cholesky solve of the same truncated problem (the cross-check oracle).
DenseHumSolution hum_dense_solve(const HumOperator& hum, const FourierField& u0);

struct MinNormCheck {
  int trials = 0;
  double min_norm_ratio = 0.0;      ///< min ||f + delta|| / ||f||
  double max_state_residual = 0.0;  ///< max ||L delta|| / ||L delta_raw||
  double max_cosine = 0.0;          ///< max |<f, delta>| / (||f|| ||delta||)
  bool passed = false;
};

/// Perturbs the control by random admissible directions delta = d - L^*(Lambda^-1 L d)
/// and checks that the HUM control has the smallest norm.
MinNormCheck min_norm_signature(const HumOperator& hum, const HumSolution& sol, int trials,
                                std::uint64_t seed, double tol = 1e-8);

}  // namespace torus
