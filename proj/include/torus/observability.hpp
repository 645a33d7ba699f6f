#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "torus/circle_field.hpp"
#include "torus/field.hpp"
#include "torus/operator.hpp"
#include "torus/region.hpp"
#include "torus/time_rules.hpp"

namespace torus {

inline int default_grid(int N) { return std::max(256, 4 * N); }

/// Observation data: operator, region, horizon and discretisation.  Copies share the
/// lazily built restriction matrices.
class ControlProblem {
 public:
  ControlProblem(SchrodingerOperator op, Region omega, double T, int M, int nt,
                 TimeRule rule = TimeRule::gauss_legendre);

  const SchrodingerOperator& op() const noexcept { return op_; }
  const Region& omega() const noexcept { return omega_; }
  double T() const noexcept { return T_; }
  int grid() const noexcept { return M_; }
  int time_steps() const noexcept { return nt_; }
  TimeRule rule() const noexcept { return rule_; }

  const RestrictionOperator& restriction() const;
  /// Pi in the eigenbasis: E^* Pi E.
  const Eigen::MatrixXcd& eigen_restriction() const;

  /// F with observed energy over (t0, t1) equal to c^* F c, c the eigen coordinates
  /// of u0: F = A B (E^* Pi E) o K, K(j, j') = rule applied to e^{i (l_j - l_j') t}.
  Eigen::MatrixXcd energy_form(double t0, double t1) const;
  /// energy_form(0, T), cached.
  const Eigen::MatrixXcd& energy_form() const;

  /// Same problem with N, M or nt changed (the potential is kept).
  ControlProblem with_truncation(int N) const;
  ControlProblem with_grid(int M) const;
  ControlProblem with_time_steps(int nt) const;

 private:
  struct Cache {
    std::once_flag r_once, p_once, f_once;
    std::unique_ptr<RestrictionOperator> restriction;
    Eigen::MatrixXcd eigen_restriction;
    Eigen::MatrixXcd form;
  };

  SchrodingerOperator op_;
  Region omega_;
  double T_;
  int M_;
  int nt_;
  TimeRule rule_;
  std::shared_ptr<Cache> cache_;
};

/// Time integral of restricted_mass(u(t), Omega) over (0, T).
double observed_energy(const ControlProblem& cp, const FourierField& u0);
double observed_energy(const ControlProblem& cp, const FourierField& u0, double t0, double t1);

/// Eigenvector columns for every cluster meeting the first `count` eigenvalues, rotated
/// inside each cluster to diagonalise the Hermitian `form` (given in eigen coordinates).
/// The diagonal entries of the rotated form come back in `diag`, ascending per cluster.
Eigen::MatrixXcd canonical_eigenbasis(const Eigen::VectorXd& values, const Eigen::MatrixXcd& form,
                                      Eigen::Index count, Eigen::VectorXd& diag);

struct EigenfunctionFamily {
  int count;
};
struct RandomFamily {
  int count;
  std::uint64_t seed;
  RandomProfile profile = FlatProfile{};
  int band = -1;  ///< band limit of the draws; -1 means the full truncation
};
struct CoherentFamily {
  std::vector<double> h;
  std::vector<std::pair<std::int64_t, std::int64_t>> directions;
  Vec2 center{0.0, 0.0};
};
/// Random data passed through the spectral cutoff at each h.
struct ShellFamily {
  std::vector<double> h;
  double rho;
  int count;
  std::uint64_t seed;
};
using Family = std::variant<EigenfunctionFamily, RandomFamily, CoherentFamily, ShellFamily>;

std::string family_name(const Family& f);

struct ObservabilitySample {
  std::string family;
  int id;
  std::string label;
  double quotient;
};

struct RefinementDelta {
  std::string name;  ///< "N+4", "2M", "2nt"
  double min_quotient;
  double relative_delta;
};

struct ObservabilityReport {
  std::string family;
  std::vector<ObservabilitySample> samples;
  double min_quotient = 0.0;
  double mean_quotient = 0.0;
  double K_estimate = 0.0;
  std::vector<RefinementDelta> refinement;
  double max_refinement_delta() const;
};

/// Quotients observed_energy(u0) / ||u0||^2 over the families; with refine set, the
/// minimum is recomputed at N + 4, 2M and 2 nt.
ObservabilityReport estimate_obs_constant(const ControlProblem& cp,
                                          const std::vector<Family>& families,
                                          bool refine = false);

/// Per-eigenfunction quotients ||e_j||^2_Omega / ||e_j||^2 in the canonical cluster basis,
/// for every cluster meeting the first `count` eigenfunctions.
Eigen::VectorXd stationary_quotients(const SchrodingerOperator& op, const Region& omega, int M,
                                     Eigen::Index count);

double stationary_check(const SchrodingerOperator& op, Eigen::Index j, const Region& omega, int M);

struct HelmholtzCheck {
  CircleField u;
  double lhs;              ///< ||u||^2
  double f_hminus1;        ///< ||f||^2_{H^-1}
  double u_restricted;     ///< ||u||^2 on the arc
  double ratio;            ///< lhs / (f_hminus1 + u_restricted); 0 when both vanish
  double gap;              ///< distance from mu to the spectrum
};

inline constexpr double kResonanceTolerance = 1e-6;

/// Solves (D^2 + W - mu) u = f spectrally on the circle.
HelmholtzCheck helmholtz_control_check_1d(const CircleField& W, double mu, const CircleField& f,
                                          const Interval& omega_x);

struct FloquetSweepOptions {
  int N = 32;
  int eigen_count = 16;
  int random_count = 16;
  std::uint64_t seed = 1;
  int panels = 200;
  TimeRule rule = TimeRule::gauss_legendre;
};

struct FloquetSweepEntry {
  double beta;
  double min_quotient;
  double min_eigen_quotient;
  double min_random_quotient;
};

struct FloquetSweep {
  std::vector<FloquetSweepEntry> entries;
  double max_min_ratio;  ///< max over beta of the min quotient, divided by the min of it
};

FloquetSweep floquet_obs_sweep(const CircleField& W, const Interval& omega_x, double T,
                               const std::vector<double>& betas,
                               const FloquetSweepOptions& options = {});

/// Observed energy over (0, T) of e^{-it((D + beta)^2 + W)} v0 on the arc.
double floquet_observed_energy(const CircleField& W, double beta, int N, const Interval& omega_x,
                               double T, int panels, const CircleField& v0,
                               TimeRule rule = TimeRule::gauss_legendre);

}  // namespace torus
