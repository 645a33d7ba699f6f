#include "torus/operator.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include "torus/errors.hpp"
#include "torus/smooth.hpp"

namespace torus {

SchrodingerOperator::SchrodingerOperator(const FourierField& V, int N, double memory_budget)
    : potential_(V.resized(N)), N_(N), cache_(std::make_shared<Cache>()) {
  const double scale = std::max(1.0, V.coeffs().cwiseAbs().maxCoeff());
  if (V.reality_defect() > 1e-12 * scale)
    throw InvalidArgument("potential is not real: coefficients are not conjugate-symmetric");
  const double D = std::pow(2.0 * N + 1.0, 2);
  // matrix, eigenvectors and the LAPACK workspace
  const double bytes = 3.0 * D * D * sizeof(cplx);
  if (bytes > memory_budget) {
    std::ostringstream os;
    os << "truncation N = " << N << " needs about " << bytes / 1e9 << " GB, over the budget";
    throw ResourceError(os.str());
  }
  const int band = V.band(0.0);
  if (band > N) {
    std::ostringstream os;
    os << "potential band " << band << " exceeds truncation " << N << "; higher modes dropped";
    warnings_.push_back(os.str());
  }
  potential_ = potential_.conj_symmetric_part();

  const int S = 2 * N + 1;
  const TorusLattice& lat = potential_.lattice();
  matrix_.resize(S * S, S * S);
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l) {
      const Eigen::Index r = potential_.index(k, l);
      for (int kp = -N; kp <= N; ++kp)
        for (int lp = -N; lp <= N; ++lp)
          matrix_(r, potential_.index(kp, lp)) = potential_.coeff(k - kp, l - lp);
      const Vec2 xi = lat.frequency(k, l);
      matrix_(r, r) += xi[0] * xi[0] + xi[1] * xi[1];
    }
}

const HermitianEigen& SchrodingerOperator::eig() const {
  std::call_once(cache_->once, [this] { cache_->eig = conjugation_symmetric_eigen(matrix_); });
  return cache_->eig;
}

SchrodingerOperator assemble(const FourierField& V, int N) { return SchrodingerOperator(V, N); }

double energy(const SchrodingerOperator& op, const FourierField& u) {
  if (u.truncation() != op.truncation()) throw InvalidArgument("field truncation mismatch");
  return op.lattice().area() * std::real(u.coeffs().dot(op.apply(u.coeffs())));
}

FourierField apply_function(const SchrodingerOperator& op, const std::function<cplx(double)>& g,
                            const FourierField& u) {
  if (u.truncation() != op.truncation()) throw InvalidArgument("field truncation mismatch");
  const HermitianEigen& e = op.eig();
  Eigen::VectorXcd c = e.vectors.adjoint() * u.coeffs();
  for (Eigen::Index j = 0; j < c.size(); ++j) c[j] *= g(e.values[j]);
  return FourierField(u.lattice(), u.truncation(), e.vectors * c);
}

double spectral_sobolev_norm(const SchrodingerOperator& op, const FourierField& u, double s) {
  const HermitianEigen& e = op.eig();
  const Eigen::VectorXcd c = e.vectors.adjoint() * u.coeffs();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j)
    acc += std::pow(1.0 + std::abs(e.values[j]), s) * std::norm(c[j]);
  return std::sqrt(op.lattice().area() * acc);
}

SpectralCutoff::SpectralCutoff(double h_, double rho_) : h(h_), rho(rho_) {
  if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("cutoff needs 0 < h < 1");
  if (!(rho > 0.0 && rho <= 1.0)) throw InvalidArgument("cutoff needs 0 < rho <= 1");
}

double SpectralCutoff::chi(double t) const { return smooth::plateau(t); }

double SpectralCutoff::operator()(double lambda) const {
  return chi((h * h * lambda - 1.0) / rho);
}

FourierField spectral_cutoff_apply(const SchrodingerOperator& op, const SpectralCutoff& cut,
                                   const FourierField& u) {
  return apply_function(op, [&cut](double l) { return cplx(cut(l)); }, u);
}

DyadicPartition::DyadicPartition(double R) : R_(R) {
  if (!(R > 1.0)) throw InvalidArgument("dyadic ratio must exceed 1");
}

double DyadicPartition::theta(double r) const {
  return 1.0 - smooth::step((std::abs(r) - 1.0) / (R_ - 1.0));
}

double DyadicPartition::phi(int j, double r) const {
  if (j < 0) return 0.0;
  const double a = std::abs(r);
  if (j == 0) return theta(a);
  const double hi = theta(a * std::pow(R_, -j));
  const double lo = theta(a * std::pow(R_, -j + 1));
  return std::sqrt(std::max(0.0, hi * hi - lo * lo));
}

int DyadicPartition::pieces_needed(double r) const {
  int J = 0;
  double p = 1.0;
  while (p < std::abs(r)) {
    p *= R_;
    ++J;
  }
  return J;
}

std::vector<FourierField> dyadic_partition(const SchrodingerOperator& op, double R,
                                           const FourierField& u) {
  const DyadicPartition part(R);
  const HermitianEigen& e = op.eig();
  const double top = std::max(std::abs(e.values[0]), std::abs(e.values[e.values.size() - 1]));
  const int J = part.pieces_needed(top);
  const Eigen::VectorXcd c = e.vectors.adjoint() * u.coeffs();
  std::vector<FourierField> pieces;
  for (int j = 0; j <= J; ++j) {
    Eigen::VectorXcd cj = c;
    for (Eigen::Index i = 0; i < c.size(); ++i) cj[i] *= part.phi(j, e.values[i]);
    pieces.emplace_back(u.lattice(), u.truncation(), e.vectors * cj);
  }
  return pieces;
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> eigen_clusters(const Eigen::VectorXd& values,
                                                                  double rel_tol) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= values.size(); ++i) {
    if (i == values.size() ||
        values[i] - values[i - 1] > rel_tol * (1.0 + std::abs(values[i]))) {
      out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

}  // namespace torus
