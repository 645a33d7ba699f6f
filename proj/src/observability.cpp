#include "torus/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "torus/errors.hpp"
#include "torus/floquet.hpp"
#include "torus/parallel.hpp"

namespace torus {

namespace {

// F = scale * P o K with K(j, j') = q.kernel(l_j - l_j').
Eigen::MatrixXcd hadamard_kernel(const Eigen::MatrixXcd& P, const Eigen::VectorXd& lambda,
                                 const TimeQuadrature& q, double scale) {
  const Eigen::Index D = lambda.size();
  Eigen::MatrixXcd F(D, D);
  for (Eigen::Index jp = 0; jp < D; ++jp)
    for (Eigen::Index j = 0; j <= jp; ++j) {
      const cplx v = scale * P(j, jp) * q.kernel(lambda[j] - lambda[jp]);
      F(j, jp) = v;
      if (j != jp) F(jp, j) = std::conj(v);
    }
  for (Eigen::Index j = 0; j < D; ++j) F(j, j) = F(j, j).real();
  return F;
}

// Re(c_i^* F c_i) for the columns of C, in 32-column blocks.
Eigen::VectorXd quadratic_forms(const Eigen::MatrixXcd& F, const Eigen::MatrixXcd& C) {
  const Eigen::Index n = C.cols(), block = 32;
  const auto chunks = static_cast<std::size_t>((n + block - 1) / block);
  Eigen::VectorXd out(n);
  parallel_for(chunks, [&](std::size_t b) {
    const Eigen::Index lo = static_cast<Eigen::Index>(b) * block;
    const Eigen::Index w = std::min(block, n - lo);
    const Eigen::MatrixXcd FC = F * C.middleCols(lo, w);
    for (Eigen::Index i = 0; i < w; ++i) out[lo + i] = std::real(C.col(lo + i).dot(FC.col(i)));
  });
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct DataSample {
  std::string family;
  std::string label;
  FourierField u;
};

struct EigenRequest {
  std::string family;
  int count;
  int first_id;
};

}  // namespace

ControlProblem::ControlProblem(SchrodingerOperator op, Region omega, double T, int M, int nt,
                               TimeRule rule)
    : op_(std::move(op)),
      omega_(std::move(omega)),
      T_(T),
      M_(M),
      nt_(nt),
      rule_(rule),
      cache_(std::make_shared<Cache>()) {
  if (!(T > 0.0)) throw InvalidArgument("horizon T must be positive");
  if (nt < 1) throw InvalidArgument("need at least one time panel");
  if (M < 4 * op_.truncation()) throw InvalidArgument("grid M must be at least 4N");
  if (omega_.grid_measure(op_.lattice(), M) <= 0.0)
    throw EmptyRegion("region " + omega_.describe() + " is empty on the grid");
}

const RestrictionOperator& ControlProblem::restriction() const {
  std::call_once(cache_->r_once, [this] {
    cache_->restriction =
        std::make_unique<RestrictionOperator>(op_.lattice(), omega_, op_.truncation(), M_);
  });
  return *cache_->restriction;
}

const Eigen::MatrixXcd& ControlProblem::eigen_restriction() const {
  std::call_once(cache_->p_once, [this] {
    const HermitianEigen& e = op_.eig();
    const Eigen::MatrixXcd Pi = restriction().dense();
    Eigen::MatrixXcd P = e.vectors.adjoint() * (Pi * e.vectors);
    cache_->eigen_restriction = 0.5 * (P + P.adjoint());
  });
  return cache_->eigen_restriction;
}

Eigen::MatrixXcd ControlProblem::energy_form(double t0, double t1) const {
  const TimeQuadrature q(t0, t1, nt_, rule_);
  return hadamard_kernel(eigen_restriction(), op_.eig().values, q, op_.lattice().area());
}

const Eigen::MatrixXcd& ControlProblem::energy_form() const {
  std::call_once(cache_->f_once, [this] { cache_->form = energy_form(0.0, T_); });
  return cache_->form;
}

ControlProblem ControlProblem::with_truncation(int N) const {
  SchrodingerOperator op(op_.potential().resized(N), N);
  return ControlProblem(std::move(op), omega_, T_, std::max(M_, 4 * N), nt_, rule_);
}

ControlProblem ControlProblem::with_grid(int M) const {
  return ControlProblem(op_, omega_, T_, M, nt_, rule_);
}

ControlProblem ControlProblem::with_time_steps(int nt) const {
  return ControlProblem(op_, omega_, T_, M_, nt, rule_);
}

double observed_energy(const ControlProblem& cp, const FourierField& u0) {
  const Eigen::VectorXcd c = cp.op().eig().vectors.adjoint() * u0.coeffs();
  return std::real(c.dot(cp.energy_form() * c));
}

double observed_energy(const ControlProblem& cp, const FourierField& u0, double t0, double t1) {
  const Eigen::VectorXcd c = cp.op().eig().vectors.adjoint() * u0.coeffs();
  return std::real(c.dot(cp.energy_form(t0, t1) * c));
}

Eigen::MatrixXcd canonical_eigenbasis(const Eigen::VectorXd& values, const Eigen::MatrixXcd& form,
                                      Eigen::Index count, Eigen::VectorXd& diag) {
  const auto clusters = eigen_clusters(values);
  Eigen::Index end = 0;
  for (const auto& [b, e] : clusters) {
    if (b >= count) break;
    end = e;
  }
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(values.size(), end);
  diag.resize(end);
  for (const auto& [b, e] : clusters) {
    if (b >= end) break;
    const Eigen::Index w = e - b;
    if (w == 1) {
      basis(b, b) = 1.0;
      diag[b] = std::real(form(b, b));
      continue;
    }
    Eigen::MatrixXcd blk = form.block(b, b, w, w);
    blk = 0.5 * (blk + blk.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk);
    basis.block(b, b, w, w) = es.eigenvectors();
    diag.segment(b, w) = es.eigenvalues();
  }
  return basis;
}

std::string family_name(const Family& f) {
  struct {
    std::string operator()(const EigenfunctionFamily&) const { return "eigenfunctions"; }
    std::string operator()(const RandomFamily&) const { return "random"; }
    std::string operator()(const CoherentFamily&) const { return "coherent"; }
    std::string operator()(const ShellFamily&) const { return "shell"; }
  } v;
  return std::visit(v, f);
}

double ObservabilityReport::max_refinement_delta() const {
  double d = 0.0;
  for (const auto& r : refinement) d = std::max(d, r.relative_delta);
  return d;
}

namespace {

void collect(const ControlProblem& cp, const std::vector<Family>& families,
             std::vector<DataSample>& data, std::vector<EigenRequest>& eigen) {
  const TorusLattice& lat = cp.op().lattice();
  const int N = cp.op().truncation();
  for (const Family& fam : families) {
    const std::string name = family_name(fam);
    if (const auto* e = std::get_if<EigenfunctionFamily>(&fam)) {
      if (e->count < 1) throw InvalidArgument("eigenfunction family needs count >= 1");
      eigen.push_back({name, e->count, 0});
    } else if (const auto* r = std::get_if<RandomFamily>(&fam)) {
      if (r->count < 1) throw InvalidArgument("random family needs count >= 1");
      const int band = r->band < 0 ? N : std::min(r->band, N);
      for (int i = 0; i < r->count; ++i) {
        FourierField u = random_field(lat, band, r->seed + static_cast<std::uint64_t>(i), r->profile);
        data.push_back({name, "seed=" + std::to_string(r->seed + i), u.resized(N)});
      }
    } else if (const auto* c = std::get_if<CoherentFamily>(&fam)) {
      if (c->h.empty() || c->directions.empty())
        throw InvalidArgument("coherent family needs h values and directions");
      for (const auto& [n, m] : c->directions) {
        const RationalDirection d = make_direction(lat, n, m);
        for (double h : c->h)
          data.push_back({name,
                          "dir=(" + std::to_string(n) + "," + std::to_string(m) + ");h=" + fmt(h),
                          coherent_state(lat, N, c->center, d.xi0, h)});
      }
    } else if (const auto* s = std::get_if<ShellFamily>(&fam)) {
      if (s->h.empty() || s->count < 1) throw InvalidArgument("shell family needs h and count");
      for (double h : s->h) {
        const SpectralCutoff cut(h, s->rho);
        for (int i = 0; i < s->count; ++i) {
          const FourierField u0 = random_field(lat, N, s->seed + static_cast<std::uint64_t>(i));
          FourierField u = spectral_cutoff_apply(cp.op(), cut, u0);
          if (norm_l2(u) < 1e-12) continue;  // shell outside the truncated spectrum
          data.push_back({name, "h=" + fmt(h) + ";seed=" + std::to_string(s->seed + i), u});
        }
      }
    }
  }
}

std::vector<ObservabilitySample> evaluate(const ControlProblem& cp,
                                          const std::vector<DataSample>& data,
                                          const std::vector<EigenRequest>& eigen) {
  const HermitianEigen& e = cp.op().eig();
  const Eigen::MatrixXcd& F = cp.energy_form();
  const double area = cp.op().lattice().area();
  const int N = cp.op().truncation();
  std::vector<ObservabilitySample> out;
  int id = 0;
  for (const auto& req : eigen) {
    Eigen::VectorXd diag;
    canonical_eigenbasis(e.values, F, std::min<Eigen::Index>(req.count, e.values.size()), diag);
    for (Eigen::Index j = 0; j < diag.size(); ++j)
      out.push_back({req.family, id++, "j=" + std::to_string(j), diag[j] / area});
  }
  if (!data.empty()) {
    Eigen::MatrixXcd U(e.values.size(), static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i)
      U.col(static_cast<Eigen::Index>(i)) = data[i].u.resized(N).coeffs();
    const Eigen::MatrixXcd C = e.vectors.adjoint() * U;
    const Eigen::VectorXd num = quadratic_forms(F, C);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double n2 = area * C.col(static_cast<Eigen::Index>(i)).squaredNorm();
      out.push_back({data[i].family, id++, data[i].label, num[static_cast<Eigen::Index>(i)] / n2});
    }
  }
  return out;
}

double min_of(const std::vector<ObservabilitySample>& s) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& x : s) m = std::min(m, x.quotient);
  return m;
}

}  // namespace

ObservabilityReport estimate_obs_constant(const ControlProblem& cp,
                                          const std::vector<Family>& families, bool refine) {
  if (families.empty()) throw InvalidArgument("observability needs at least one family");
  std::vector<DataSample> data;
  std::vector<EigenRequest> eigen;
  collect(cp, families, data, eigen);

  ObservabilityReport rep;
  for (std::size_t i = 0; i < families.size(); ++i)
    rep.family += (i ? "+" : "") + family_name(families[i]);
  rep.samples = evaluate(cp, data, eigen);
  if (rep.samples.empty()) throw InvalidArgument("observability family produced no samples");
  rep.min_quotient = min_of(rep.samples);
  double sum = 0.0;
  for (const auto& s : rep.samples) sum += s.quotient;
  rep.mean_quotient = sum / static_cast<double>(rep.samples.size());
  rep.K_estimate = rep.min_quotient > 0.0 ? 1.0 / rep.min_quotient
                                           : std::numeric_limits<double>::infinity();
  if (refine) {
    const auto add = [&](const std::string& name, const ControlProblem& p) {
      const double m = min_of(evaluate(p, data, eigen));
      rep.refinement.push_back({name, m, std::abs(m - rep.min_quotient) / rep.min_quotient});
    };
    add("N+4", cp.with_truncation(cp.op().truncation() + 4));
    add("2M", cp.with_grid(2 * cp.grid()));
    add("2nt", cp.with_time_steps(2 * cp.time_steps()));
  }
  return rep;
}

Eigen::VectorXd stationary_quotients(const SchrodingerOperator& op, const Region& omega, int M,
                                     Eigen::Index count) {
  const HermitianEigen& e = op.eig();
  if (count < 1 || count > e.values.size())
    throw InvalidArgument("eigen index outside the truncated spectrum");
  const RestrictionOperator R(op.lattice(), omega, op.truncation(), M);
  const auto clusters = eigen_clusters(e.values);
  Eigen::Index end = 0;
  for (const auto& [b, en] : clusters) {
    if (b >= count) break;
    end = en;
  }
  const Eigen::MatrixXcd Es = e.vectors.leftCols(end);
  const Eigen::MatrixXcd P = Es.adjoint() * (R.dense() * Es);
  Eigen::VectorXd diag;
  canonical_eigenbasis(e.values.head(end), P, end, diag);
  return diag;
}

double stationary_check(const SchrodingerOperator& op, Eigen::Index j, const Region& omega,
                        int M) {
  return stationary_quotients(op, omega, M, j + 1)[j];
}

HelmholtzCheck helmholtz_control_check_1d(const CircleField& W, double mu, const CircleField& f,
                                          const Interval& omega_x) {
  if (f.length() != W.length()) throw InvalidArgument("source and potential live on different circles");
  const int N = std::max(W.truncation(), f.truncation());
  const FloquetOperator1D op(W.resized(N), 0.0, N);
  const HermitianEigen& e = op.eig();
  const double gap = (e.values.array() - mu).abs().minCoeff();
  if (gap < kResonanceTolerance * (1.0 + std::abs(mu))) {
    std::ostringstream os;
    os << "mu = " << mu << " lies within " << gap << " of the spectrum";
    throw NearResonance(os.str());
  }
  const CircleField fN = f.resized(N);
  Eigen::VectorXcd c = e.vectors.adjoint() * fN.coeffs();
  for (Eigen::Index j = 0; j < c.size(); ++j) c[j] /= (e.values[j] - mu);
  HelmholtzCheck out{CircleField(f.length(), N, e.vectors * c), 0, 0, 0, 0, gap};
  out.lhs = std::pow(norm_l2(out.u), 2);
  out.f_hminus1 = std::pow(norm_sobolev(fN, -1.0), 2);
  out.u_restricted = interval_mass(out.u, omega_x);
  const double rhs = out.f_hminus1 + out.u_restricted;
  out.ratio = rhs > 0.0 ? out.lhs / rhs : 0.0;
  return out;
}

namespace {

Eigen::MatrixXcd floquet_form(const FloquetOperator1D& op, const Interval& omega_x, double T,
                              int panels, TimeRule rule) {
  const HermitianEigen& e = op.eig();
  const Eigen::MatrixXcd G = interval_gram(op.length(), op.truncation(), omega_x);
  Eigen::MatrixXcd P = e.vectors.adjoint() * G * e.vectors;
  P = 0.5 * (P + P.adjoint()).eval();
  return hadamard_kernel(P, e.values, TimeQuadrature(0.0, T, panels, rule), 1.0);
}

CircleField random_circle_field(double a, int N, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CircleField v(a, N);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2 * N + 1);
  for (int k = -band; k <= band; ++k) {
    const double re = g(rng), im = g(rng);
    c[k + N] = cplx(re, im);
  }
  return CircleField(a, N, c / (std::sqrt(a) * c.norm()));
}

}  // namespace

double floquet_observed_energy(const CircleField& W, double beta, int N, const Interval& omega_x,
                               double T, int panels, const CircleField& v0, TimeRule rule) {
  const FloquetOperator1D op(W.resized(N), beta, N);
  const Eigen::MatrixXcd F = floquet_form(op, omega_x, T, panels, rule);
  const Eigen::VectorXcd c = op.eig().vectors.adjoint() * v0.resized(N).coeffs();
  return std::real(c.dot(F * c));
}

FloquetSweep floquet_obs_sweep(const CircleField& W, const Interval& omega_x, double T,
                               const std::vector<double>& betas,
                               const FloquetSweepOptions& opt) {
  if (betas.empty()) throw InvalidArgument("beta grid is empty");
  if (!(T > 0.0)) throw InvalidArgument("horizon T must be positive");
  const double a = W.length();
  const double top = 2.0 * M_PI / a;
  for (double b : betas)
    if (b < -1e-12 || b > top * (1.0 + 1e-12))
      throw InvalidArgument("beta outside [0, 2 pi / a]");
  const int band = std::min(opt.N, 8);
  std::vector<CircleField> data;
  for (int i = 0; i < opt.random_count; ++i)
    data.push_back(random_circle_field(a, opt.N, band, opt.seed + static_cast<std::uint64_t>(i)));

  FloquetSweep out;
  out.entries.resize(betas.size());
  parallel_for(betas.size(), [&](std::size_t bi) {
    const FloquetOperator1D op(W.resized(opt.N), betas[bi], opt.N);
    const HermitianEigen& e = op.eig();
    const Eigen::MatrixXcd F = floquet_form(op, omega_x, T, opt.panels, opt.rule);
    FloquetSweepEntry entry{betas[bi], 0.0, std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity()};
    if (opt.eigen_count > 0) {
      Eigen::VectorXd diag;
      canonical_eigenbasis(e.values, F, std::min<Eigen::Index>(opt.eigen_count, e.values.size()),
                           diag);
      entry.min_eigen_quotient = diag.minCoeff() / a;
    }
    for (const auto& v : data) {
      const Eigen::VectorXcd c = e.vectors.adjoint() * v.coeffs();
      entry.min_random_quotient =
          std::min(entry.min_random_quotient, std::real(c.dot(F * c)) / (a * c.squaredNorm()));
    }
    entry.min_quotient = std::min(entry.min_eigen_quotient, entry.min_random_quotient);
    out.entries[bi] = entry;
  });
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& en : out.entries) {
    lo = std::min(lo, en.min_quotient);
    hi = std::max(hi, en.min_quotient);
  }
  out.max_min_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace torus
