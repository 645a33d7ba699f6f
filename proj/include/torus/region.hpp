#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "torus/field.hpp"
#include "torus/lattice.hpp"

namespace torus {

/// Observation / control set on the torus.  All shapes are periodic.  The indicator
/// is sharp unless a taper width is set, in which case primitive shapes use a cosine
/// ramp of that width across their boundary.
class Region {
 public:
  enum class Kind { whole, disc, rectangle, strip, raster, union_of, complement };

  static Region whole();
  static Region disc(const Vec2& center, double radius);
  static Region rectangle(const Vec2& corner, const Vec2& widths);
  /// {z : <z, Xi0_perp> mod a in [lo, hi)} for the direction (n, m).
  static Region strip(std::int64_t n, std::int64_t m, double lo, double hi);
  /// Row i is x = (i + 1/2) A / rows, column j likewise in y.  Entries 0 or 1.
  static Region raster(Eigen::MatrixXi mask);
  static Region unite(std::vector<Region> parts);
  static Region complement(Region inner);

  Region tapered(double width) const;

  Kind kind() const noexcept { return node_->kind; }
  bool is_whole() const noexcept { return node_->kind == Kind::whole; }
  double taper_width() const noexcept { return node_->taper; }

  /// Indicator value in [0, 1] at a torus point.
  double indicator(const TorusLattice& lattice, double x, double y) const;

  /// Indicator sampled at (i A / M, j B / M).
  Eigen::MatrixXd mask(const TorusLattice& lattice, int M) const;

  /// (A B / M^2) sum of mask values: the grid measure |Omega|_M.
  double grid_measure(const TorusLattice& lattice, int M) const;

  std::string describe() const;

 private:
  struct Node {
    Kind kind = Kind::whole;
    Vec2 p{0.0, 0.0};
    Vec2 q{0.0, 0.0};
    std::int64_t n = 0;
    std::int64_t m = 0;
    double taper = 0.0;
    Eigen::MatrixXi raster;
    std::vector<Region> children;
  };
  explicit Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Rectangle-rule quadrature of |u|^2 over Omega on the M x M grid.  Requires M >= 4N.
double restricted_mass(const FourierField& u, const Region& omega, int M);

/// Grid restriction in coefficient space: Z(m1, m2) = M^-2 sum mask e^{-2 pi i (m1 i + m2 j) / M}
/// for |m1|, |m2| <= 2N.  The restricted mass equals A B u^* Pi u with
/// Pi[(k,l),(k',l')] = Z(k - k', l - l').
class RestrictionOperator {
 public:
  RestrictionOperator(const TorusLattice& lattice, const Region& omega, int N, int M);
  /// From explicit grid weights (M x M, values in [0, 1]).
  RestrictionOperator(const TorusLattice& lattice, const Eigen::MatrixXd& mask, int N);

  int truncation() const noexcept { return N_; }
  int grid() const noexcept { return M_; }
  double grid_measure() const noexcept { return measure_; }
  const Eigen::MatrixXcd& symbol() const noexcept { return Z_; }

  /// Dense (2N+1)^2 Hermitian matrix Pi.
  Eigen::MatrixXcd dense() const;

  /// Pi c for a coefficient vector, via the grid.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& c) const;

  /// A B c^* Pi c.
  double mass(const Eigen::VectorXcd& c) const;

 private:
  TorusLattice lattice_;
  int N_;
  int M_;
  double measure_;
  Eigen::MatrixXd mask_;
  Eigen::MatrixXcd E_;  // synthesis matrix M x (2N+1)
  Eigen::MatrixXcd Z_;  // (4N+1) x (4N+1)
};

}  // namespace torus
