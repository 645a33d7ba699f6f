#pragma once

#include <Eigen/Dense>

#include "torus/circle_field.hpp"
#include "torus/linalg.hpp"

namespace torus {

/// (D + beta)^2 + W on the circle of length a, D = -i d/dx, in the band-N basis:
/// diagonal (2 pi k / a + beta)^2 plus convolution by the coefficients of W.
class FloquetOperator1D {
 public:
  FloquetOperator1D(const CircleField& W, double beta, int N);

  double length() const noexcept { return length_; }
  double beta() const noexcept { return beta_; }
  int truncation() const noexcept { return N_; }
  const CircleField& potential() const noexcept { return W_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  const HermitianEigen& eig() const noexcept { return eig_; }

 private:
  double length_;
  double beta_;
  int N_;
  CircleField W_;
  Eigen::MatrixXcd matrix_;
  HermitianEigen eig_;
};

CircleField evolve_floquet(const FloquetOperator1D& fop, const CircleField& v0, double t);

}  // namespace torus
