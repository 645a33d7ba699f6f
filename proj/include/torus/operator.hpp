#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "torus/field.hpp"
#include "torus/linalg.hpp"

namespace torus {

inline constexpr double kDefaultMemoryBudget = 4.0 * 1024 * 1024 * 1024;  // bytes

/// P_V = -Delta + V on the band-N plane-wave space.  Eigenvectors are orthonormal in
/// the plain coefficient metric, so functional calculus is g(H) c = E g(L) E^* c.
class SchrodingerOperator {
 public:
  /// V must be real.  Coefficients of V beyond band N are dropped and reported in warnings().
  SchrodingerOperator(const FourierField& V, int N, double memory_budget = kDefaultMemoryBudget);

  const TorusLattice& lattice() const noexcept { return potential_.lattice(); }
  int truncation() const noexcept { return N_; }
  Eigen::Index dimension() const noexcept { return matrix_.rows(); }
  /// The retained potential, resized to truncation N.
  const FourierField& potential() const noexcept { return potential_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Computed on first use, then shared by all copies.  Thread-safe.
  const HermitianEigen& eig() const;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& c) const { return matrix_ * c; }

 private:
  struct Cache {
    std::once_flag once;
    HermitianEigen eig;
  };

  FourierField potential_;
  int N_;
  Eigen::MatrixXcd matrix_;
  std::vector<std::string> warnings_;
  std::shared_ptr<Cache> cache_;
};

SchrodingerOperator assemble(const FourierField& V, int N);

/// <P_V u, u> = A B c^* H c.
double energy(const SchrodingerOperator& op, const FourierField& u);

/// Sum_j g(lambda_j) <u, e_j> e_j.
FourierField apply_function(const SchrodingerOperator& op, const std::function<cplx(double)>& g,
                            const FourierField& u);

/// (A B sum_j (1 + |lambda_j|)^s |<u, e_j>|^2)^{1/2}, the spectral Sobolev norm.
double spectral_sobolev_norm(const SchrodingerOperator& op, const FourierField& u, double s);

/// chi((h^2 lambda - 1) / rho) with chi the plateau bump.
struct SpectralCutoff {
  double h;
  double rho;
  SpectralCutoff(double h, double rho);
  double chi(double t) const;
  double operator()(double lambda) const;
};

FourierField spectral_cutoff_apply(const SchrodingerOperator& op, const SpectralCutoff& cut,
                                   const FourierField& u);

/// theta(r) = 1 - step((r - 1) / (R - 1)): 1 on [0, 1], 0 beyond R.
/// phi_0 = theta(|r|), phi_j = sqrt(theta(R^-j |r|)^2 - theta(R^-j+1 |r|)^2), so
/// phi_0^2 + ... + phi_J^2 = theta(R^-J |r|)^2 telescopes to 1 once R^J >= |r|.
class DyadicPartition {
 public:
  explicit DyadicPartition(double R);
  double ratio() const noexcept { return R_; }
  double theta(double r) const;
  double phi(int j, double r) const;
  /// Smallest J with R^J >= r.
  int pieces_needed(double r) const;

 private:
  double R_;
};

/// u_j = phi_j(P_V) u for j = 0..J with J covering the spectrum.
std::vector<FourierField> dyadic_partition(const SchrodingerOperator& op, double R,
                                           const FourierField& u);

/// Half-open index ranges of (near-)degenerate eigenvalues: consecutive values within
/// rel_tol (1 + |lambda|) are grouped.
std::vector<std::pair<Eigen::Index, Eigen::Index>> eigen_clusters(const Eigen::VectorXd& values,
                                                                  double rel_tol = 1e-8);

}  // namespace torus
