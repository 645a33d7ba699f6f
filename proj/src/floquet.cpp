#include "torus/floquet.hpp"

#include <cmath>

#include "torus/errors.hpp"

namespace torus {

FloquetOperator1D::FloquetOperator1D(const CircleField& W, double beta, int N)
    : length_(W.length()), beta_(beta), N_(N), W_(W.resized(N)) {
  if (N < 1) throw InvalidArgument("truncation N must be >= 1");
  const double scale = std::max(1.0, W.coeffs().cwiseAbs().maxCoeff());
  if (W.reality_defect() > 1e-12 * scale) throw InvalidArgument("Floquet potential is not real");
  const int S = 2 * N + 1;
  matrix_.resize(S, S);
  for (int k = -N; k <= N; ++k) {
    for (int kp = -N; kp <= N; ++kp) matrix_(k + N, kp + N) = W_.coeff(k - kp);
    const double xi = 2.0 * M_PI * k / length_ + beta_;
    matrix_(k + N, k + N) += xi * xi;
  }
  eig_ = hermitian_eigen(matrix_);
}

CircleField evolve_floquet(const FloquetOperator1D& fop, const CircleField& v0, double t) {
  if (v0.truncation() != fop.truncation() || v0.length() != fop.length())
    throw InvalidArgument("circle field does not match the Floquet operator");
  const HermitianEigen& e = fop.eig();
  Eigen::VectorXcd c = e.vectors.adjoint() * v0.coeffs();
  for (Eigen::Index j = 0; j < c.size(); ++j) c[j] *= std::polar(1.0, -e.values[j] * t);
  return CircleField(v0.length(), v0.truncation(), e.vectors * c);
}

}  // namespace torus
