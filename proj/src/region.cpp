#include "torus/region.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "torus/errors.hpp"
#include "torus/smooth.hpp"

namespace torus {

namespace {

// Signed periodic offset of t from c in (-L/2, L/2].
double wrap(double t, double L) {
  double r = std::fmod(t, L);
  if (r > 0.5 * L) r -= L;
  if (r <= -0.5 * L) r += L;
  return r;
}

double from_signed(double sd, double taper) {
  if (taper > 0.0) return smooth::cosine_ramp(sd, taper);
  return sd >= 0.0 ? 1.0 : 0.0;
}

}  // namespace

Region Region::whole() { return Region(std::make_shared<Node>()); }

Region Region::disc(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("disc radius must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::disc;
  n->p = center;
  n->q = {radius, 0.0};
  return Region(n);
}

Region Region::rectangle(const Vec2& corner, const Vec2& widths) {
  if (!(widths[0] > 0.0) || !(widths[1] > 0.0))
    throw InvalidArgument("rectangle widths must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::rectangle;
  n->p = corner;
  n->q = widths;
  return Region(n);
}

Region Region::strip(std::int64_t dn, std::int64_t dm, double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("strip interval must have hi > lo");
  auto n = std::make_shared<Node>();
  n->kind = Kind::strip;
  n->n = dn;
  n->m = dm;
  n->p = {lo, hi};
  return Region(n);
}

Region Region::raster(Eigen::MatrixXi mask) {
  if (mask.rows() == 0 || mask.cols() == 0) throw InvalidArgument("raster mask is empty");
  if ((mask.array() != 0 && mask.array() != 1).any())
    throw InvalidArgument("raster mask entries must be 0 or 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::raster;
  n->raster = std::move(mask);
  return Region(n);
}

Region Region::unite(std::vector<Region> parts) {
  if (parts.empty()) throw InvalidArgument("union of no regions");
  auto n = std::make_shared<Node>();
  n->kind = Kind::union_of;
  n->children = std::move(parts);
  return Region(n);
}

Region Region::complement(Region inner) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::complement;
  n->children.push_back(std::move(inner));
  return Region(n);
}

Region Region::tapered(double width) const {
  if (width < 0.0) throw InvalidArgument("taper width must be non-negative");
  auto n = std::make_shared<Node>(*node_);
  n->taper = width;
  for (auto& c : n->children) c = c.tapered(width);
  return Region(n);
}

double Region::indicator(const TorusLattice& lat, double x, double y) const {
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::whole:
      return 1.0;
    case Kind::disc: {
      const double dx = wrap(x - nd.p[0], lat.A()), dy = wrap(y - nd.p[1], lat.B());
      return from_signed(nd.q[0] - std::hypot(dx, dy), nd.taper);
    }
    case Kind::rectangle: {
      // Offsets measured from the rectangle centre.
      const double dx = wrap(x - nd.p[0] - 0.5 * nd.q[0], lat.A());
      const double dy = wrap(y - nd.p[1] - 0.5 * nd.q[1], lat.B());
      const double sx = nd.q[0] >= lat.A() ? std::numeric_limits<double>::infinity()
                                            : 0.5 * nd.q[0] - std::abs(dx);
      const double sy = nd.q[1] >= lat.B() ? std::numeric_limits<double>::infinity()
                                            : 0.5 * nd.q[1] - std::abs(dy);
      return from_signed(std::min(sx, sy), nd.taper);
    }
    case Kind::strip: {
      const RationalDirection d = make_direction(lat, nd.n, nd.m);
      const double s = x * d.xi0_perp[0] + y * d.xi0_perp[1];
      const double lo = nd.p[0], hi = nd.p[1];
      if (hi - lo >= d.a) return 1.0;
      const double c = 0.5 * (lo + hi);
      return from_signed(0.5 * (hi - lo) - std::abs(wrap(s - c, d.a)), nd.taper);
    }
    case Kind::raster: {
      const auto R = nd.raster.rows(), C = nd.raster.cols();
      double fx = std::fmod(x / lat.A(), 1.0), fy = std::fmod(y / lat.B(), 1.0);
      if (fx < 0) fx += 1.0;
      if (fy < 0) fy += 1.0;
      const auto i = std::min<Eigen::Index>(R - 1, static_cast<Eigen::Index>(std::floor(fx * R)));
      const auto j = std::min<Eigen::Index>(C - 1, static_cast<Eigen::Index>(std::floor(fy * C)));
      return nd.raster(i, j);
    }
    case Kind::union_of: {
      double v = 0.0;
      for (const auto& c : nd.children) v = std::max(v, c.indicator(lat, x, y));
      return v;
    }
    case Kind::complement:
      return 1.0 - nd.children.front().indicator(lat, x, y);
  }
  return 0.0;
}

Eigen::MatrixXd Region::mask(const TorusLattice& lat, int M) const {
  if (M < 1) throw InvalidArgument("grid size must be positive");
  Eigen::MatrixXd w(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      w(i, j) = indicator(lat, i * lat.A() / M, j * lat.B() / M);
  return w;
}

double Region::grid_measure(const TorusLattice& lat, int M) const {
  return lat.area() * mask(lat, M).sum() / (static_cast<double>(M) * M);
}

std::string Region::describe() const {
  const Node& nd = *node_;
  std::ostringstream os;
  switch (nd.kind) {
    case Kind::whole:
      os << "whole";
      break;
    case Kind::disc:
      os << "disc(" << nd.p[0] << "," << nd.p[1] << ";r=" << nd.q[0] << ")";
      break;
    case Kind::rectangle:
      os << "rectangle(" << nd.p[0] << "," << nd.p[1] << ";" << nd.q[0] << "x" << nd.q[1] << ")";
      break;
    case Kind::strip:
      os << "strip(" << nd.n << "," << nd.m << ";[" << nd.p[0] << "," << nd.p[1] << "))";
      break;
    case Kind::raster:
      os << "raster(" << nd.raster.rows() << "x" << nd.raster.cols() << ")";
      break;
    case Kind::union_of: {
      os << "union(";
      for (std::size_t i = 0; i < nd.children.size(); ++i)
        os << (i ? "," : "") << nd.children[i].describe();
      os << ")";
      break;
    }
    case Kind::complement:
      os << "complement(" << nd.children.front().describe() << ")";
      break;
  }
  if (nd.taper > 0.0) os << "~" << nd.taper;
  return os.str();
}

double restricted_mass(const FourierField& u, const Region& omega, int M) {
  if (M < 4 * u.truncation()) throw InvalidArgument("restricted_mass needs M >= 4N");
  const TorusLattice& lat = u.lattice();
  const Eigen::MatrixXd w = omega.mask(lat, M);
  if (w.sum() <= 0.0) throw EmptyRegion("region " + omega.describe() + " is empty on the grid");
  const Eigen::MatrixXcd g = u.on_grid(M);
  return lat.area() * (w.array() * g.array().abs2()).sum() / (static_cast<double>(M) * M);
}

RestrictionOperator::RestrictionOperator(const TorusLattice& lattice, const Region& omega, int N,
                                         int M)
    : RestrictionOperator(lattice, omega.mask(lattice, std::max(M, 1)), N) {}

RestrictionOperator::RestrictionOperator(const TorusLattice& lattice, const Eigen::MatrixXd& mask,
                                         int N)
    : lattice_(lattice), N_(N), M_(static_cast<int>(mask.rows())), mask_(mask) {
  const int M = M_;
  if (mask.cols() != mask.rows()) throw InvalidArgument("restriction mask must be square");
  if (M < 4 * N) throw InvalidArgument("restriction operator needs M >= 4N");
  if (mask_.sum() <= 0.0) throw EmptyRegion("restriction region is empty on the grid");
  measure_ = lattice.area() * mask_.sum() / (static_cast<double>(M) * M);
  E_ = synthesis_matrix(M, N);
  const Eigen::MatrixXcd E2 = synthesis_matrix(M, 2 * N);
  Z_ = E2.adjoint() * mask_.cast<cplx>() * E2.conjugate() / (static_cast<double>(M) * M);
}

Eigen::MatrixXcd RestrictionOperator::dense() const {
  const int S = 2 * N_ + 1;
  const Eigen::Index D = static_cast<Eigen::Index>(S) * S;
  Eigen::MatrixXcd P(D, D);
  for (int k = 0; k < S; ++k)
    for (int l = 0; l < S; ++l)
      for (int kp = 0; kp < S; ++kp)
        for (int lp = 0; lp < S; ++lp)
          P(static_cast<Eigen::Index>(k) * S + l, static_cast<Eigen::Index>(kp) * S + lp) =
              Z_(k - kp + 2 * N_, l - lp + 2 * N_);
  return P;
}

Eigen::VectorXcd RestrictionOperator::apply(const Eigen::VectorXcd& c) const {
  const int S = 2 * N_ + 1;
  Eigen::MatrixXcd C(S, S);
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b) C(a, b) = c[static_cast<Eigen::Index>(a) * S + b];
  const Eigen::MatrixXcd g = E_ * C * E_.transpose();
  const Eigen::MatrixXcd wg = mask_.cast<cplx>().cwiseProduct(g);
  const Eigen::MatrixXcd R = E_.adjoint() * wg * E_.conjugate() / (static_cast<double>(M_) * M_);
  return flatten_coefficients(R);
}

double RestrictionOperator::mass(const Eigen::VectorXcd& c) const {
  return lattice_.area() * std::real(c.dot(apply(c)));
}

}  // namespace torus
