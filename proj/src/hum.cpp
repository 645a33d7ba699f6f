#include "torus/hum.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "torus/errors.hpp"
#include "torus/linalg.hpp"

namespace torus {

namespace {
const cplx kI(0.0, 1.0);
}

HumOperator::HumOperator(const ControlProblem& cp)
    : cp_(cp), cache_(std::make_shared<Cache>()) {
  const TorusLattice& lat = cp.op().lattice();
  support_ = std::make_shared<ControlSupport>(lat, cp.omega(), cp.grid());
  weights_ = trapezoid_weights(cp.T(), cp.time_steps());
  const Eigen::MatrixXd mask = cp.omega().mask(lat, cp.grid());
  pi2_ = RestrictionOperator(lat, Eigen::MatrixXd(mask.cwiseAbs2()), cp.op().truncation()).dense();
}

Eigen::MatrixXcd HumOperator::node_phases(double sign) const {
  const Eigen::VectorXd& lambda = cp_.op().eig().values;
  const int nt = cp_.time_steps();
  Eigen::MatrixXcd ph(lambda.size(), nt + 1);
  for (int n = 0; n <= nt; ++n) {
    const double s = cp_.T() - cp_.T() * n / nt;
    for (Eigen::Index j = 0; j < lambda.size(); ++j) ph(j, n) = std::polar(1.0, sign * lambda[j] * s);
  }
  return ph;
}

Eigen::VectorXcd HumOperator::apply(const Eigen::VectorXcd& phi) const {
  const Eigen::MatrixXcd& E = cp_.op().eig().vectors;
  const Eigen::VectorXcd a = E.adjoint() * phi;
  // Columns: S(t_n - T) phi, restricted, then pulled back with S(T - t_n).
  const Eigen::MatrixXcd Phi = node_phases(+1.0).array().colwise() * a.array();
  const Eigen::MatrixXcd V = E.adjoint() * (pi2_ * (E * Phi));
  const Eigen::MatrixXcd back = node_phases(-1.0).cwiseProduct(V);
  return E * (back * weights_.cast<cplx>());
}

const Eigen::MatrixXcd& HumOperator::dense_eigen() const {
  std::call_once(cache_->once, [this] {
    const HermitianEigen& e = cp_.op().eig();
    Eigen::MatrixXcd P = e.vectors.adjoint() * (pi2_ * e.vectors);
    P = 0.5 * (P + P.adjoint()).eval();
    const TimeQuadrature q(0.0, cp_.T(), cp_.time_steps(), TimeRule::trapezoid);
    const Eigen::Index D = e.values.size();
    Eigen::MatrixXcd G(D, D);
    for (Eigen::Index jp = 0; jp < D; ++jp)
      for (Eigen::Index j = 0; j <= jp; ++j) {
        // sum_n w_n e^{-i (l_j - l_j') s_n} over the nodes s_n = T - t_n
        const cplx v = P(j, jp) * q.kernel(e.values[jp] - e.values[j]);
        G(j, jp) = v;
        G(jp, j) = std::conj(v);
      }
    for (Eigen::Index j = 0; j < D; ++j) G(j, j) = G(j, j).real();
    cache_->dense = std::move(G);
  });
  return cache_->dense;
}

Eigen::VectorXcd HumOperator::control_to_state(const ControlSamples& f) const {
  const FourierField zero(cp_.op().lattice(), cp_.op().truncation());
  return evolve_controlled(cp_.op(), zero, f).state.coeffs();
}

ControlSamples HumOperator::adjoint(const Eigen::VectorXcd& psi) const {
  const Eigen::MatrixXcd& E = cp_.op().eig().vectors;
  const Eigen::VectorXcd a = E.adjoint() * psi;
  const Eigen::MatrixXcd traj = E * (node_phases(+1.0).array().colwise() * a.array()).matrix();
  ControlSamples f;
  f.support = support_;
  f.T = cp_.T();
  f.nt = cp_.time_steps();
  f.values = support_->sample(traj, cp_.op().truncation());
  f.values = (kI * (f.values.array().colwise() * support_->weights().cast<cplx>().array())).matrix();
  return f;
}

ControlSamples HumOperator::control_from_adjoint(const Eigen::VectorXcd& phiT) const {
  ControlSamples f = adjoint(phiT);
  f.values *= -kI;
  return f;
}

FourierField gramian_apply(const ControlProblem& cp, const FourierField& phiT) {
  const HumOperator hum(cp);
  return FourierField(phiT.lattice(), phiT.truncation(), hum.apply(phiT.coeffs()));
}

Eigen::MatrixXcd gramian_dense(const ControlProblem& cp, Eigen::Index J) {
  if (J < 1 || J > cp.op().dimension())
    throw InvalidArgument("gramian_dense needs 1 <= J <= spectrum size");
  const HumOperator hum(cp);
  return hum.dense_eigen().topLeftCorner(J, J).transpose();
}

HumSolution hum_solve(const ControlProblem& cp, const FourierField& u0, const HumOptions& opt) {
  return hum_solve(HumOperator(cp), u0, opt);
}

HumSolution hum_solve(const HumOperator& hum, const FourierField& u0, const HumOptions& opt) {
  if (!(opt.tol > 0.0)) throw InvalidArgument("HUM tolerance must be positive");
  if (opt.maxit < 1) throw InvalidArgument("HUM maxit must be >= 1");
  const ControlProblem& cp = hum.problem();
  const SchrodingerOperator& op = cp.op();
  if (u0.truncation() != op.truncation()) throw InvalidArgument("u0 truncation mismatch");

  const Eigen::VectorXcd b = -kI * evolve(op, u0, cp.T()).coeffs();
  const double bnorm = b.norm();
  const Eigen::Index D = b.size();

  HumSolution sol{.control = ControlSamples::zero(hum.support(), cp.T(), cp.time_steps()),
                  .phiT = FourierField(u0.lattice(), op.truncation())};
  if (bnorm == 0.0) {
    sol.converged = true;
    sol.residual_history = {0.0};
    sol.energy_error_history = {0.0};
    return sol;
  }

  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(D), r = b, p = r;
  double rr = r.squaredNorm(), scale = 0.0;
  std::vector<double> alphas, betas, rrs;
  sol.residual_history.push_back(1.0);
  for (int k = 0; k < opt.maxit; ++k) {
    const Eigen::VectorXcd Ap = hum.apply(p);
    const double pAp = std::real(p.dot(Ap));
    const double pp = p.squaredNorm();
    scale = std::max(scale, pAp / pp);
    if (!(pAp > opt.singular_tol * scale * pp)) {
      std::ostringstream os;
      os << "Gramian is numerically singular on the Krylov space at iteration " << k
         << " (Rayleigh quotient " << pAp / pp << ", scale " << scale << ")";
      throw IllPosedControl(os.str(), scale * pp / std::max(pAp, 1e-300));
    }
    const double alpha = rr / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    const double beta = rr_new / rr;
    alphas.push_back(alpha);
    betas.push_back(beta);
    rrs.push_back(rr);
    rr = rr_new;
    sol.iterations = k + 1;
    sol.residual_history.push_back(std::sqrt(rr) / bnorm);
    if (std::sqrt(rr) <= opt.tol * bnorm) {
      sol.converged = true;
      break;
    }
    p = r + beta * p;
  }

  // Energy-norm error against the final iterate: sum of alpha_i ||r_i||^2 tails.
  const std::size_t K = alphas.size();
  std::vector<double> tail(K + 1, 0.0);
  for (std::size_t i = K; i-- > 0;) tail[i] = tail[i + 1] + alphas[i] * rrs[i];
  for (std::size_t i = 0; i <= K; ++i)
    sol.energy_error_history.push_back(tail[0] > 0.0 ? tail[i] / tail[0] : 0.0);

  // Lanczos tridiagonal from the CG coefficients.
  Eigen::VectorXd d(static_cast<Eigen::Index>(K)), e(static_cast<Eigen::Index>(K ? K - 1 : 0));
  for (std::size_t i = 0; i < K; ++i) {
    d[static_cast<Eigen::Index>(i)] = 1.0 / alphas[i] + (i ? betas[i - 1] / alphas[i - 1] : 0.0);
    if (i + 1 < K) e[static_cast<Eigen::Index>(i)] = std::sqrt(betas[i]) / alphas[i];
  }
  const Eigen::VectorXd ritz = tridiagonal_eigenvalues(d, e);
  sol.condition_estimate = ritz[0] > 0.0 ? ritz[ritz.size() - 1] / ritz[0]
                                         : std::numeric_limits<double>::infinity();
  if (sol.condition_estimate > 1.0 / opt.singular_tol)
    throw IllPosedControl("Gramian condition estimate exceeds the singular threshold",
                          sol.condition_estimate);

  sol.phiT = FourierField(u0.lattice(), op.truncation(), x);
  sol.control = hum.control_from_adjoint(x);
  sol.control_norm = control_norm(sol.control);
  const ControlledResult check = evolve_controlled(op, u0, sol.control);
  const double u0n = norm_l2(u0);
  sol.final_miss = norm_l2(check.state) / u0n;
  sol.integrator_error = check.error_estimate / u0n;
  return sol;
}

DenseHumSolution hum_dense_solve(const HumOperator& hum, const FourierField& u0) {
  const ControlProblem& cp = hum.problem();
  const SchrodingerOperator& op = cp.op();
  const Eigen::MatrixXcd& E = op.eig().vectors;
  const Eigen::VectorXcd b = -kI * (E.adjoint() * evolve(op, u0, cp.T()).coeffs());
  const Eigen::MatrixXcd& G = hum.dense_eigen();
  Eigen::VectorXcd xe;
  Eigen::LLT<Eigen::MatrixXcd> llt(G);
  if (llt.info() == Eigen::Success) {
    xe = llt.solve(b);
  } else {
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(G);
    if (ldlt.info() != Eigen::Success) throw IllPosedControl("dense Gramian factorisation failed", 0.0);
    xe = ldlt.solve(b);
  }
  const Eigen::VectorXcd x = E * xe;
  DenseHumSolution out{FourierField(u0.lattice(), op.truncation(), x),
                       hum.control_from_adjoint(x), 0.0};
  const double u0n = norm_l2(u0);
  out.final_miss = u0n > 0.0 ? norm_l2(evolve_controlled(op, u0, out.control).state) / u0n : 0.0;
  return out;
}

MinNormCheck min_norm_signature(const HumOperator& hum, const HumSolution& sol, int trials,
                                std::uint64_t seed, double tol) {
  const ControlProblem& cp = hum.problem();
  const Eigen::MatrixXcd& E = cp.op().eig().vectors;
  Eigen::LLT<Eigen::MatrixXcd> llt(hum.dense_eigen());
  if (llt.info() != Eigen::Success) throw IllPosedControl("dense Gramian is not positive definite", 0.0);

  MinNormCheck out;
  out.trials = trials;
  out.min_norm_ratio = std::numeric_limits<double>::infinity();
  const double fnorm = control_norm(sol.control);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    ControlSamples d = ControlSamples::zero(hum.support(), cp.T(), cp.time_steps());
    for (Eigen::Index j = 0; j < d.values.cols(); ++j)
      for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
        const double re = g(rng), im = g(rng);
        d.values(i, j) = cplx(re, im);
      }
    const Eigen::VectorXcd y = hum.control_to_state(d);
    const Eigen::VectorXcd z = E * llt.solve(E.adjoint() * y);
    d.values -= hum.adjoint(z).values;
    const double dn = control_norm(d);
    const double target = fnorm > 0.0 ? 0.1 * fnorm : 1.0;
    d.values *= target / dn;
    const double residual = hum.control_to_state(d).norm() * (dn / target) / y.norm();
    ControlSamples fd = sol.control;
    fd.values += d.values;
    const double ratio = fnorm > 0.0 ? control_norm(fd) / fnorm : 1.0;
    const double cosine =
        fnorm > 0.0 ? std::abs(control_inner(sol.control, d)) / (fnorm * target) : 0.0;
    out.min_norm_ratio = std::min(out.min_norm_ratio, ratio);
    out.max_state_residual = std::max(out.max_state_residual, residual);
    out.max_cosine = std::max(out.max_cosine, cosine);
  }
  out.passed = out.min_norm_ratio >= 1.0 - tol && out.max_cosine <= std::sqrt(tol) &&
               out.max_state_residual <= std::sqrt(tol);
  return out;
}

}  // namespace torus
