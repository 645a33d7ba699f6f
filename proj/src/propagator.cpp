#include "torus/propagator.hpp"

#include <cmath>
#include <limits>

#include "torus/errors.hpp"

namespace torus {

namespace {

const cplx kI(0.0, 1.0);

Eigen::VectorXcd phases(const Eigen::VectorXd& lambda, double t) {
  Eigen::VectorXcd p(lambda.size());
  for (Eigen::Index j = 0; j < lambda.size(); ++j) p[j] = std::polar(1.0, -lambda[j] * t);
  return p;
}

// Eigen coordinates of sum_n w_n S(T - t_n) g_n for the columns g_n of G, using the
// nodes n = 0, stride, 2 stride, ...
Eigen::VectorXcd duhamel_sum(const HermitianEigen& e, const Eigen::MatrixXcd& Bcols, double T,
                             int nt, int stride) {
  const int n_used = nt / stride;
  const Eigen::VectorXd w = trapezoid_weights(T, n_used);
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(e.values.size());
  for (int m = 0; m <= n_used; ++m) {
    const double tn = T * m / n_used;
    acc += (w[m] * phases(e.values, T - tn)).cwiseProduct(Bcols.col(m * stride));
  }
  return acc;
}

}  // namespace

FourierField evolve(const SchrodingerOperator& op, const FourierField& u0, double t) {
  if (u0.truncation() != op.truncation()) throw InvalidArgument("field truncation mismatch");
  if (t == 0.0) return u0;
  const HermitianEigen& e = op.eig();
  const Eigen::VectorXcd c = phases(e.values, t).cwiseProduct(e.vectors.adjoint() * u0.coeffs());
  return FourierField(u0.lattice(), u0.truncation(), e.vectors * c);
}

FourierField evolve_free(const FourierField& u0, double t) {
  const int N = u0.truncation();
  Eigen::VectorXcd c = u0.coeffs();
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l) {
      const Vec2 xi = u0.lattice().frequency(k, l);
      c[u0.index(k, l)] *= std::polar(1.0, -(xi[0] * xi[0] + xi[1] * xi[1]) * t);
    }
  return FourierField(u0.lattice(), N, std::move(c));
}

ControlSupport::ControlSupport(const TorusLattice& lattice, const Region& omega, int M)
    : lattice_(lattice), M_(M) {
  const Eigen::MatrixXd mask = omega.mask(lattice, M);
  std::vector<double> w;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      if (mask(i, j) > 0.0) {
        rows_.push_back(i);
        cols_.push_back(j);
        w.push_back(mask(i, j));
      }
  if (w.empty()) throw EmptyRegion("control region " + omega.describe() + " is empty on the grid");
  weights_ = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

Eigen::MatrixXcd ControlSupport::sample(const Eigen::MatrixXcd& coeffs, int N) const {
  const int S = 2 * N + 1;
  if (coeffs.rows() != static_cast<Eigen::Index>(S) * S)
    throw InvalidArgument("coefficient block has the wrong length");
  const Eigen::MatrixXcd E = synthesis_matrix(M_, N);
  Eigen::MatrixXcd out(points(), coeffs.cols());
  Eigen::MatrixXcd C(S, S);
  for (Eigen::Index c = 0; c < coeffs.cols(); ++c) {
    for (int a = 0; a < S; ++a)
      for (int b = 0; b < S; ++b) C(a, b) = coeffs(static_cast<Eigen::Index>(a) * S + b, c);
    const Eigen::MatrixXcd half = C * E.transpose();  // S x M
    for (Eigen::Index p = 0; p < points(); ++p)
      out(p, c) = (E.row(rows_[p]) * half.col(cols_[p])).value();
  }
  return out;
}

Eigen::MatrixXcd ControlSupport::project(const Eigen::MatrixXcd& values, int N) const {
  if (values.rows() != points()) throw InvalidArgument("sample block has the wrong length");
  const int S = 2 * N + 1;
  const Eigen::MatrixXcd Eh = synthesis_matrix(M_, N).adjoint();  // S x M
  const double norm = 1.0 / (static_cast<double>(M_) * M_);
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(S) * S, values.cols());
  Eigen::MatrixXcd U(M_, M_);
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    U.setZero();
    for (Eigen::Index p = 0; p < points(); ++p)
      U(rows_[p], cols_[p]) = weights_[p] * values(p, c);
    const Eigen::MatrixXcd R = Eh * U * Eh.transpose() * norm;
    for (int a = 0; a < S; ++a)
      for (int b = 0; b < S; ++b) out(static_cast<Eigen::Index>(a) * S + b, c) = R(a, b);
  }
  return out;
}

Eigen::VectorXd trapezoid_weights(double T, int nt) {
  if (nt < 1) throw InvalidArgument("need at least one time step");
  Eigen::VectorXd w = Eigen::VectorXd::Constant(nt + 1, T / nt);
  w[0] *= 0.5;
  w[nt] *= 0.5;
  return w;
}

ControlSamples ControlSamples::zero(std::shared_ptr<const ControlSupport> support, double T,
                                    int nt) {
  ControlSamples f;
  f.T = T;
  f.nt = nt;
  f.values = Eigen::MatrixXcd::Zero(support->points(), nt + 1);
  f.support = std::move(support);
  return f;
}

cplx control_inner(const ControlSamples& f, const ControlSamples& g) {
  if (f.support != g.support || f.nt != g.nt || f.T != g.T)
    throw InvalidArgument("controls are sampled differently");
  const Eigen::VectorXd w = trapezoid_weights(f.T, f.nt);
  cplx acc = 0.0;
  for (int n = 0; n <= f.nt; ++n) acc += w[n] * g.values.col(n).dot(f.values.col(n));
  return acc * f.support->cell_area();
}

double control_norm(const ControlSamples& f) {
  return std::sqrt(std::max(0.0, std::real(control_inner(f, f))));
}

ControlledResult evolve_controlled(const SchrodingerOperator& op, const FourierField& u0,
                                   const ControlSamples& f) {
  if (f.nt < 2) throw InvalidArgument("evolve_controlled needs nt >= 2");
  if (!f.support || f.values.cols() != f.nt + 1)
    throw InvalidArgument("control samples do not match nt");
  if (!(f.support->lattice() == u0.lattice())) throw InvalidArgument("control lattice mismatch");
  const int N = op.truncation();
  const HermitianEigen& e = op.eig();
  const Eigen::MatrixXcd G = f.support->project(f.values, N);
  const Eigen::MatrixXcd B = e.vectors.adjoint() * G;
  const Eigen::VectorXcd a = phases(e.values, f.T).cwiseProduct(e.vectors.adjoint() * u0.coeffs());

  const Eigen::VectorXcd full = a - kI * duhamel_sum(e, B, f.T, f.nt, 1);
  double est = std::numeric_limits<double>::quiet_NaN();
  if (f.nt % 2 == 0) {
    const Eigen::VectorXcd half = a - kI * duhamel_sum(e, B, f.T, f.nt, 2);
    est = std::sqrt(op.lattice().area()) * (full - half).norm() / 3.0;
  }
  return {FourierField(u0.lattice(), N, e.vectors * full), est, f.nt};
}

ControlledResult evolve_controlled(const SchrodingerOperator& op, const FourierField& u0,
                                   const std::function<FourierField(double)>& f,
                                   const Region& omega, double T, int nt, int M) {
  if (nt < 2) throw InvalidArgument("evolve_controlled needs nt >= 2");
  const int N = op.truncation();
  const HermitianEigen& e = op.eig();
  const RestrictionOperator R(u0.lattice(), omega, N, M);
  const int fine = 2 * nt;
  Eigen::MatrixXcd G(e.values.size(), fine + 1);
  for (int n = 0; n <= fine; ++n) {
    const FourierField fn = f(T * n / fine);
    if (fn.truncation() != N) throw InvalidArgument("source truncation mismatch");
    G.col(n) = R.apply(fn.coeffs());
  }
  const Eigen::MatrixXcd B = e.vectors.adjoint() * G;
  const Eigen::VectorXcd a = phases(e.values, T).cwiseProduct(e.vectors.adjoint() * u0.coeffs());
  const Eigen::VectorXcd coarse = a - kI * duhamel_sum(e, B, T, fine, 2);
  const Eigen::VectorXcd refined = a - kI * duhamel_sum(e, B, T, fine, 1);
  // Second order: the nt result carries 4/3 of the nt-vs-2nt difference.
  const double est = std::sqrt(op.lattice().area()) * (refined - coarse).norm() * 4.0 / 3.0;
  return {FourierField(u0.lattice(), N, e.vectors * coarse), est, nt};
}

}  // namespace torus
