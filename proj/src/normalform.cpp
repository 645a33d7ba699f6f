#include "torus/normalform.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "torus/errors.hpp"
#include "torus/smooth.hpp"

namespace torus {

namespace {

const cplx kI(0.0, 1.0);

// Torus field with coefficients f(k, l) * g(frequency) for a frame multiplier g.
template <class G>
FourierField multiplier(const FourierField& u, const StripFrame& frame, G g) {
  const int N = u.truncation();
  Eigen::VectorXcd c = u.coeffs();
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l) c[u.index(k, l)] *= g(frame.frequency(k, l));
  return FourierField(u.lattice(), N, std::move(c));
}

double orbit_length(const StripFrame& f) {
  return f.is_axis() ? f.lattice().B() : f.direction()->b;
}

}  // namespace

StripFrame StripFrame::axis(const TorusLattice& lattice) { return StripFrame(lattice, std::nullopt); }

StripFrame StripFrame::along(const RationalDirection& d) { return StripFrame(d.lattice, d); }

Vec2 StripFrame::frequency(int k, int l) const noexcept {
  const Vec2 xi = lattice_.frequency(k, l);
  if (!direction_) return xi;
  const auto& d = *direction_;
  return {xi[0] * d.xi0_perp[0] + xi[1] * d.xi0_perp[1], xi[0] * d.xi0[0] + xi[1] * d.xi0[1]};
}

Vec2 StripFrame::to_torus(double x, double y) const noexcept {
  if (!direction_) return {x, y};
  return direction_->to_torus(x, y);
}

double StripFrame::transverse_period() const noexcept {
  return direction_ ? direction_->a : lattice_.A();
}

bool StripFrame::on_orbit_average(int k, int l) const noexcept {
  if (!direction_) return l == 0;
  return static_cast<std::int64_t>(k) * direction_->n + static_cast<std::int64_t>(l) * direction_->m == 0;
}

void FrequencyWindow::validate() const {
  if (!(w_xi > 0.0) || !(w_eta > 0.0)) throw InvalidArgument("frequency window widths must be positive");
  if (!(eta_min() > 0.0))
    throw InvalidArgument("frequency window must stay away from eta = 0 (|eta_c| > w_eta)");
}

double FrequencyWindow::eta_min() const noexcept { return std::abs(eta_c) - w_eta; }

double FrequencyWindow::chi2(double xi, double eta) const {
  return smooth::plateau((xi - xi_c) / w_xi) * smooth::plateau((eta - eta_c) / w_eta);
}

double FrequencyWindow::chi2_tilde(double xi, double eta) const {
  return smooth::plateau((xi - xi_c) / (2.0 * w_xi)) * smooth::plateau((eta - eta_c) / (2.0 * w_eta));
}

double FrequencyWindow::zeta(double eta) const {
  const double e = eta_c >= 0.0 ? eta : -eta;
  const double g = 0.5 * eta_min();
  const double top = std::abs(eta_c) + w_eta;
  return smooth::step((e - g) / g) * (1.0 - smooth::step((e - top) / g));
}

double FrequencyWindow::profile(double eta) const {
  const double z = zeta(eta);
  return z == 0.0 ? 0.0 : z / (2.0 * eta);
}

std::string to_string(CorrectorVariant v) {
  return v == CorrectorVariant::basepoint ? "basepoint" : "zero_mean";
}

CorrectorVariant parse_corrector_variant(const std::string& name) {
  if (name == "basepoint") return CorrectorVariant::basepoint;
  if (name == "zero_mean") return CorrectorVariant::zero_mean;
  throw InvalidArgument("unknown corrector variant '" + name + "'");
}

std::string to_string(WCandidate w) {
  switch (w) {
    case WCandidate::commutator:
      return "2i*xi*dx_q";
    case WCandidate::stated:
      return "2*xi*(1/i)*dx_q";
    case WCandidate::literal_inverse:
      return "(2/xi)*i*dx_q";
  }
  return "?";
}

CorrectorSymbol::CorrectorSymbol(StripFrame frame, FrequencyWindow window,
                                 CorrectorVariant variant, FourierField c_zero_mean)
    : frame_(std::move(frame)), window_(window), variant_(variant), c_(std::move(c_zero_mean)) {}

cplx CorrectorSymbol::amplitude_at(double x, double y) const {
  const Vec2 z = frame_.to_torus(x, y);
  cplx v = c_(z[0], z[1]);
  if (variant_ == CorrectorVariant::basepoint) {
    const Vec2 z0 = frame_.to_torus(x, 0.0);
    v -= c_(z0[0], z0[1]);
  }
  return v;
}

cplx CorrectorSymbol::operator()(double x, double y, double eta) const {
  return amplitude_at(x, y) * window_.profile(eta);
}

cplx CorrectorSymbol::amplitude_dy(double x, double y) const {
  const FourierField dy = multiplier(c_, frame_, [](const Vec2& f) { return kI * f[1]; });
  const Vec2 z = frame_.to_torus(x, y);
  return dy(z[0], z[1]);
}

FourierField CorrectorSymbol::amplitude_dx() const {
  if (variant_ == CorrectorVariant::basepoint) return multiplier(basepoint_amplitude(), frame_, [](const Vec2& f) { return kI * f[0]; });
  return multiplier(c_, frame_, [](const Vec2& f) { return kI * f[0]; });
}

FourierField CorrectorSymbol::basepoint_amplitude() const {
  if (!frame_.is_axis())
    throw InvalidArgument(
        "the basepoint corrector is not periodic on the torus along a direction; use zero_mean");
  const int N = c_.truncation();
  FourierField out = c_;
  Eigen::VectorXcd c = out.coeffs();
  for (int k = -N; k <= N; ++k) {
    cplx s = 0.0;
    for (int l = -N; l <= N; ++l) s += c_.coeff(k, l);
    c[out.index(k, 0)] -= s;
  }
  return FourierField(c_.lattice(), N, std::move(c));
}

FourierField average_potential_torus(const FourierField& V, const StripFrame& frame) {
  const int N = V.truncation();
  FourierField out(V.lattice(), N);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(out.size());
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l)
      if (frame.on_orbit_average(k, l)) c[out.index(k, l)] = V.coeff(k, l);
  return FourierField(V.lattice(), N, std::move(c));
}

CircleField average_potential(const FourierField& V, const StripFrame& frame) {
  const double scale = std::max(1.0, V.coeffs().cwiseAbs().maxCoeff());
  if (V.reality_defect() > 1e-12 * scale) throw InvalidArgument("potential is not real");
  const int N = V.truncation();
  if (frame.is_axis()) {
    CircleField out(V.lattice().A(), N);
    Eigen::VectorXcd c(2 * N + 1);
    for (int k = -N; k <= N; ++k) c[k + N] = V.coeff(k, 0);
    return CircleField(V.lattice().A(), N, std::move(c));
  }
  const auto& d = *frame.direction();
  const std::int64_t span = std::max(std::abs(d.n), std::abs(d.m));
  const int J = static_cast<int>(N / span);
  const int Nc = std::max(1, J);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2 * Nc + 1);
  for (int j = -J; j <= J; ++j)
    c[j + Nc] = V.coeff(static_cast<int>(-j * d.m), static_cast<int>(j * d.n));
  return CircleField(d.a, Nc, std::move(c));
}

CorrectorSymbol build_corrector(const FourierField& V, const StripFrame& frame,
                                const FrequencyWindow& window, CorrectorVariant variant) {
  window.validate();
  const double scale = std::max(1.0, V.coeffs().cwiseAbs().maxCoeff());
  if (V.reality_defect() > 1e-12 * scale) throw InvalidArgument("potential is not real");
  if (!(V.lattice() == frame.lattice())) throw InvalidArgument("potential and frame lattices differ");
  const int N = V.truncation();
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(V.size());
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l) {
      if (frame.on_orbit_average(k, l)) continue;
      // d_y c = i (V - V0)  <=>  i eta c_kl = i V_kl
      c[V.index(k, l)] = V.coeff(k, l) / frame.frequency(k, l)[1];
    }
  return CorrectorSymbol(frame, window, variant, FourierField(V.lattice(), N, std::move(c)));
}

double transport_residual(const CorrectorSymbol& q, const FourierField& V, int nx, int ny,
                          int neta) {
  const StripFrame& frame = q.frame();
  const FrequencyWindow& w = q.window();
  const FourierField V0 = average_potential_torus(V, frame);
  const FourierField dy = multiplier(q.amplitude(), frame, [](const Vec2& f) { return kI * f[1]; });
  const double X = frame.transverse_period(), Y = orbit_length(frame);
  const double e_lo = w.eta_c - w.w_eta, e_hi = w.eta_c + w.w_eta;
  double worst = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double x = X * i / nx, y = Y * j / ny;
      const Vec2 z = frame.to_torus(x, y);
      const cplx vv = V(z[0], z[1]) - V0(z[0], z[1]);
      const cplx cy = dy(z[0], z[1]);
      for (int e = 0; e < neta; ++e) {
        const double eta = e_lo + (e_hi - e_lo) * (e + 0.5) / neta;
        const cplx dq = cy * w.profile(eta);
        worst = std::max(worst, std::abs(-(2.0 / kI) * eta * dq + vv));
      }
    }
  return worst;
}

NormalFormMatrices assemble_normal_form(const FourierField& V, const CorrectorSymbol& q, double h,
                                        WCandidate candidate) {
  if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("normal form needs 0 < h < 1");
  const StripFrame& frame = q.frame();
  const FrequencyWindow& w = q.window();
  const TorusLattice& lat = frame.lattice();
  const FourierField c =
      q.variant() == CorrectorVariant::basepoint ? q.basepoint_amplitude() : q.amplitude();
  const FourierField cx = multiplier(c, frame, [](const Vec2& f) { return kI * f[0]; });
  const FourierField V0 = average_potential_torus(V, frame);

  const int pad = std::max(0, V.band()) + std::max(0, c.band());
  const double R = std::hypot(std::abs(w.xi_c) + w.w_xi, std::abs(w.eta_c) + w.w_eta) / h;
  const int kmax = static_cast<int>(std::ceil(R * lat.A() / (2.0 * M_PI))) + 1;
  const int lmax = static_cast<int>(std::ceil(R * lat.B() / (2.0 * M_PI))) + 1;

  std::map<std::pair<int, int>, int> box;
  for (int k = -kmax; k <= kmax; ++k)
    for (int l = -lmax; l <= lmax; ++l) {
      const Vec2 f = frame.frequency(k, l);
      if (w.chi2(h * f[0], h * f[1]) <= 0.0) continue;
      for (int dk = -pad; dk <= pad; ++dk)
        for (int dl = -pad; dl <= pad; ++dl) box.emplace(std::make_pair(k + dk, l + dl), 0);
    }
  NormalFormMatrices m;
  int idx = 0;
  for (auto& [mode, i] : box) {
    i = idx++;
    m.modes.push_back(mode);
  }
  const Eigen::Index n = idx;
  const auto conv = [&](const FourierField& f) {
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        C(i, j) = f.coeff(m.modes[i].first - m.modes[j].first, m.modes[i].second - m.modes[j].second);
    return C;
  };
  Eigen::VectorXcd dx2(n), dy2(n), chi(n), prof(n), wdiag(n);
  const bool cx_zero = cx.band() < 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 f = frame.frequency(m.modes[i].first, m.modes[i].second);
    const double xs = h * f[0], es = h * f[1];
    dx2[i] = f[0] * f[0];
    dy2[i] = f[1] * f[1];
    chi[i] = w.chi2(xs, es);
    prof[i] = w.profile(es);
    const double base = w.profile(es) * w.chi2_tilde(xs, es);
    switch (candidate) {
      case WCandidate::commutator:
        wdiag[i] = 2.0 * kI * xs * base;
        break;
      case WCandidate::stated:
        wdiag[i] = 2.0 * xs / kI * base;
        break;
      case WCandidate::literal_inverse:
        wdiag[i] = base == 0.0 ? cplx(0.0)
                   : xs == 0.0 ? cplx(std::numeric_limits<double>::infinity())
                               : 2.0 / xs * kI * base;
        break;
    }
  }
  m.Dx2 = dx2.asDiagonal();
  m.Dy2 = dy2.asDiagonal();
  m.Chi = chi.asDiagonal();
  m.V = conv(V);
  m.V0 = conv(V0);
  m.Q = conv(c) * prof.asDiagonal();
  m.W = cx_zero ? Eigen::MatrixXcd::Zero(n, n) : Eigen::MatrixXcd(conv(cx) * wdiag.asDiagonal());
  return m;
}

double operator_norm_estimate(const Eigen::MatrixXcd& A, int iterations, std::uint64_t seed) {
  if (A.size() == 0) return 0.0;
  if (!A.allFinite()) return std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd x(A.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double re = g(rng), im = g(rng);
    x[i] = cplx(re, im);
  }
  x.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXcd y = A.adjoint() * (A * x);
    sigma2 = y.norm();
    if (sigma2 == 0.0) return 0.0;
    x = y / sigma2;
  }
  return std::sqrt(sigma2);
}

double conjugation_residual(const FourierField& V, const StripFrame& frame,
                            const FrequencyWindow& window, double h, CorrectorVariant variant) {
  const CorrectorSymbol q = build_corrector(V, frame, window, variant);
  const NormalFormMatrices m = assemble_normal_form(V, q, h);
  const Eigen::Index n = m.Q.rows();
  const Eigen::MatrixXcd IhQ = Eigen::MatrixXcd::Identity(n, n) + h * m.Q;
  const Eigen::MatrixXcd A = (IhQ * (m.Dy2 + m.V) - (m.Dy2 + m.V0) * IhQ) * m.Chi;
  return operator_norm_estimate(A) / h;
}

cplx w_symbol(const CorrectorSymbol& q, WCandidate candidate, double x, double y, double xi,
              double eta) {
  const FourierField cx = q.amplitude_dx();
  const Vec2 z = q.frame().to_torus(x, y);
  const cplx dq = cx(z[0], z[1]) * q.window().profile(eta);
  if (dq == 0.0) return 0.0;
  const double t = q.window().chi2_tilde(xi, eta);
  switch (candidate) {
    case WCandidate::commutator:
      return 2.0 * kI * xi * dq * t;
    case WCandidate::stated:
      return 2.0 * xi / kI * dq * t;
    case WCandidate::literal_inverse:
      return 2.0 / xi * kI * dq * t;
  }
  return 0.0;
}

WReport build_w_and_check(const FourierField& V, const StripFrame& frame,
                          const FrequencyWindow& window, const std::vector<double>& hs,
                          CorrectorVariant variant, double bound_ratio) {
  if (hs.size() < 2) throw InvalidArgument("W check needs at least two h values");
  const CorrectorSymbol q = build_corrector(V, frame, window, variant);
  WReport rep{{}, WCandidate::commutator, bound_ratio};
  bool found = false;
  const double X = frame.transverse_period(), Y = orbit_length(frame);
  for (WCandidate cand : {WCandidate::commutator, WCandidate::stated, WCandidate::literal_inverse}) {
    WCheck chk{cand, hs, {}, 0.0, 0.0, false, false};
    for (double h : hs) {
      const NormalFormMatrices m = assemble_normal_form(V, q, h, cand);
      const Eigen::Index n = m.Q.rows();
      const Eigen::MatrixXcd IhQ = Eigen::MatrixXcd::Identity(n, n) + h * m.Q;
      const Eigen::MatrixXcd L = m.Dx2 + m.Dy2;
      const Eigen::MatrixXcd A = (IhQ * (L + m.V) - ((L + m.V0) * IhQ + m.W)) * m.Chi;
      chk.residual.push_back(operator_norm_estimate(A) / h);
    }
    const auto [lo, hi] = std::minmax_element(chk.residual.begin(), chk.residual.end());
    if (!std::isfinite(*hi))
      chk.ratio = std::numeric_limits<double>::infinity();
    else
      chk.ratio = *lo > 0.0 ? *hi / *lo : (*hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    chk.bounded = std::isfinite(*hi) && chk.ratio <= bound_ratio;
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        for (int e = 0; e < 16; ++e) {
          const double eta = window.eta_c - 2.0 * window.w_eta + 4.0 * window.w_eta * e / 15.0;
          const cplx v = w_symbol(q, cand, X * i / 16, Y * j / 16, 0.0, eta);
          chk.xi0_slice = std::isfinite(std::abs(v)) ? std::max(chk.xi0_slice, std::abs(v))
                                                     : std::numeric_limits<double>::infinity();
        }
    chk.vanishes_at_xi0 = chk.xi0_slice == 0.0;
    if (!found && chk.bounded && chk.vanishes_at_xi0) {
      rep.selected = cand;
      found = true;
    }
    rep.candidates.push_back(chk);
  }
  if (!found)
    throw NormalFormInconsistency(
        "no W candidate keeps the conjugation residual bounded under h refinement");
  return rep;
}

}  // namespace torus
