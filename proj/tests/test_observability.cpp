#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "torus/errors.hpp"
#include "torus/observability.hpp"
#include "torus/parallel.hpp"
#include "torus/propagator.hpp"
#include "torus/time_rules.hpp"

using namespace torus;

namespace {

const double kTwoPi = 2 * oracle::kPi;

}  // namespace

TEST_CASE("time quadrature kernels against direct summation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-300.0, 300.0);
  for (TimeRule rule : {TimeRule::gauss_legendre, TimeRule::trapezoid}) {
    const TimeQuadrature q(0.2, 1.7, 13, rule);
    const auto nodes = q.nodes();
    double wsum = 0.0;
    for (const auto& n : nodes) wsum += n.w;
    CHECK(wsum == doctest::Approx(1.5).epsilon(1e-14));
    for (int s = 0; s < 20; ++s) {
      const double w = s == 0 ? 0.0 : U(rng);
      cplx direct = 0.0;
      for (const auto& n : nodes) direct += n.w * std::polar(1.0, w * n.t);
      CHECK(std::abs(q.kernel(w) - direct) < 1e-12);
    }
  }
  const TimeQuadrature ex(0.0, 2.0, 1, TimeRule::exact);
  CHECK(std::abs(ex.kernel(0.0) - cplx(2.0)) < 1e-15);
  const cplx I(0, 1);
  CHECK(std::abs(ex.kernel(3.0) - (std::exp(I * 6.0) - 1.0) / (I * 3.0)) < 1e-14);
  // Gauss-Legendre panels integrate smooth oscillations to near round-off.
  const TimeQuadrature gl(0.0, 1.0, 40, TimeRule::gauss_legendre);
  CHECK(std::abs(gl.kernel(500.0) - (std::exp(I * 500.0) - 1.0) / (I * 500.0)) < 1e-13);
  CHECK(parse_time_rule(to_string(TimeRule::trapezoid)) == TimeRule::trapezoid);
  CHECK_THROWS_AS(parse_time_rule("simpson"), InvalidArgument);
}

TEST_CASE("observed energy identities") {
  std::mt19937_64 rng(2);
  const TorusLattice L(1, 1);
  const int N = 6;
  const SchrodingerOperator op(random_real_field(L, 2, 4, 8.0), N);
  const auto u0 = oracle::gaussian_field(L, N, rng) * cplx(2.0);

  SUBCASE("whole torus gives T ||u0||^2") {
    for (double T : {0.3, 1.0, 2.5}) {
      const ControlProblem cp(op, Region::whole(), T, 32, 50);
      CHECK(std::abs(observed_energy(cp, u0) - T * 4.0) < 1e-9);
    }
  }
  SUBCASE("plane wave under the free flow") {
    const SchrodingerOperator op0(FourierField(L, 1), N);
    const Region D = Region::disc({0.2, 0.7}, 0.3);
    const ControlProblem cp(op0, D, 0.8, 64, 40);
    const auto w = FourierField::mode(L, N, 2, -1, 1.5);
    CHECK(observed_energy(cp, w) == doctest::Approx(0.8 * D.grid_measure(L, 64) * std::pow(norm_l2(w), 2) / L.area()).epsilon(1e-12));
  }
  SUBCASE("two-mode superposition against the hand-integrated interference term") {
    const SchrodingerOperator op0(FourierField(L, 1), N);
    const Region D = Region::rectangle({0.1, 0.2}, {0.35, 0.4});
    const int M = 64;
    const double T = 0.9;
    const cplx al(0.6, -0.3), be(-0.2, 0.9);
    const auto u = FourierField::mode(L, N, 1, 0, al) + FourierField::mode(L, N, 0, 2, be);
    const Eigen::MatrixXd mask = D.mask(L, M);
    const double cell = 1.0 / (M * M);
    double meas = 0.0;
    cplx Z = 0.0;
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        meas += cell * mask(i, j);
        Z += cell * mask(i, j) * std::polar(1.0, kTwoPi * (double(i) / M - 2.0 * j / M));
      }
    const double om = kTwoPi * kTwoPi * (1.0 - 4.0);
    const cplx I(0, 1);
    const cplx tint = (1.0 - std::exp(-I * om * T)) / (I * om);
    const double expect = T * (std::norm(al) + std::norm(be)) * meas + 2.0 * std::real(al * std::conj(be) * Z * tint);
    for (TimeRule rule : {TimeRule::gauss_legendre, TimeRule::exact}) {
      const ControlProblem cp(op0, D, T, M, 30, rule);
      CHECK(observed_energy(cp, u) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
  SUBCASE("bounds, time translation, scaling and monotonicity") {
    const Region D = Region::disc({0.5, 0.5}, 0.2);
    const ControlProblem cp(op, D, 1.0, 32, 60);
    const double e = observed_energy(cp, u0);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0 * 4.0 * (1 + 1e-9));
    const double Tp = 0.35;
    CHECK(std::abs(observed_energy(cp, u0, Tp, 1.0) - observed_energy(cp, evolve(op, u0, Tp), 0.0, 1.0 - Tp)) < 1e-10);
    const auto scaled = u0 * cplx(-3.0, 7.0);
    CHECK(observed_energy(cp, scaled) / std::pow(norm_l2(scaled), 2) ==
          doctest::Approx(e / std::pow(norm_l2(u0), 2)).epsilon(1e-13));
    double prev = 0.0;
    for (double T : {0.1, 0.4, 0.7, 1.0}) {
      const double v = observed_energy(ControlProblem(op, D, T, 32, 60), u0);
      CHECK(v >= prev);
      prev = v;
    }
    prev = 0.0;
    for (double r : {0.05, 0.1, 0.2, 0.4}) {
      const double v = observed_energy(ControlProblem(op, Region::disc({0.5, 0.5}, r), 1.0, 32, 60), u0);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("observability constant estimates") {
  const TorusLattice L(1, 1);
  SUBCASE("whole torus gives K = 1 / T") {
    const SchrodingerOperator op(random_real_field(L, 2, 3, 5.0), 6);
    const double T = 0.75;
    const ControlProblem cp(op, Region::whole(), T, 32, 40);
    const auto rep = estimate_obs_constant(cp, {EigenfunctionFamily{20}, RandomFamily{10, 5}});
    for (const auto& s : rep.samples) CHECK(std::abs(s.quotient - T) < 1e-12);
    CHECK(std::abs(rep.K_estimate - 1.0 / T) < 1e-9);
    CHECK(rep.min_quotient <= rep.mean_quotient + 1e-15);
  }
  SUBCASE("free flow on a small disc: positive and stable under N -> N + 4") {
    const SchrodingerOperator op(FourierField(L, 1), 12);
    const ControlProblem cp(op, Region::disc({0.5, 0.5}, 0.15), 1.0, 256, 100);
    const auto rep = estimate_obs_constant(cp, {EigenfunctionFamily{100}}, true);
    CHECK(rep.min_quotient > 0.0);
    REQUIRE(rep.refinement.size() == 3);
    for (const auto& r : rep.refinement) CHECK(r.relative_delta <= 0.1);
    for (const auto& s : rep.samples) {
      CHECK(s.quotient >= 0.0);
      CHECK(s.quotient <= 1.0 + 1e-9);
    }
  }
  SUBCASE("coherent states along the direction of a strip stay observed") {
    // N = 16 holds the h = 1/64 packet: centre frequency 10.2, spread 1.3 modes.
    const SchrodingerOperator op(FourierField(L, 1), 16);
    const ControlProblem cp(op, Region::strip(1, 0, 0.4, 0.6), 1.0, 256, 100);
    CoherentFamily fam{{1.0 / 16, 1.0 / 32, 1.0 / 64}, {{1, 0}}, {0.3, 0.5}};
    const auto rep = estimate_obs_constant(cp, {fam});
    REQUIRE(rep.samples.size() == 3);
    double lo = 1e9, hi = 0.0;
    for (const auto& s : rep.samples) {
      lo = std::min(lo, s.quotient);
      hi = std::max(hi, s.quotient);
    }
    CHECK(lo > 0.1);
    CHECK(hi / lo < 3.0);
  }
  SUBCASE("deterministic and worker-count independent") {
    const SchrodingerOperator op(random_real_field(L, 2, 3, 5.0), 6);
    const ControlProblem cp(op, Region::disc({0.3, 0.3}, 0.2), 1.0, 64, 40);
    const std::vector<Family> fam{EigenfunctionFamily{15}, RandomFamily{12, 9}};
    set_worker_count(1);
    const auto a = estimate_obs_constant(cp, fam);
    set_worker_count(3);
    const auto b = estimate_obs_constant(cp, fam);
    set_worker_count(1);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].quotient == b.samples[i].quotient);
  }
}

TEST_CASE("stationary quotients") {
  const TorusLattice L(1, 1);
  const SchrodingerOperator op0(FourierField(L, 1), 6);
  CHECK(stationary_check(op0, 5, Region::whole(), 64) == doctest::Approx(1.0).epsilon(1e-12));
  const Region D = Region::disc({0.4, 0.4}, 0.25);
  CHECK(stationary_check(op0, 0, D, 64) == doctest::Approx(D.grid_measure(L, 64) / L.area()).epsilon(1e-12));
  const SchrodingerOperator op(random_real_field(L, 2, 7, 6.0), 8);
  const Eigen::VectorXd q = stationary_quotients(op, D, 64, 30);
  CHECK(q.size() >= 30);
  CHECK(q.minCoeff() > 0.0);
  CHECK(q.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("one-dimensional resolvent check") {
  const double a = 1.0;
  const Interval arc{0.2, 0.45};
  SUBCASE("zero data") {
    const auto r = helmholtz_control_check_1d(CircleField(a, 1), 3.0, CircleField(a, 8), arc);
    CHECK(r.lhs == 0.0);
    CHECK(r.u.coeffs().norm() == 0.0);
  }
  SUBCASE("free single mode, closed form") {
    const double mu = 17.0;
    const auto f = CircleField::mode(a, 8, 2, cplx(0.5, 0.25));
    const auto r = helmholtz_control_check_1d(CircleField(a, 1), mu, f, arc);
    const cplx expect = cplx(0.5, 0.25) / (std::pow(kTwoPi * 2, 2) - mu);
    CHECK(std::abs(r.u.coeff(2) - expect) < 1e-14);
    CHECK(r.lhs == doctest::Approx(a * std::norm(expect)).epsilon(1e-12));
    CHECK(r.f_hminus1 == doctest::Approx(a * std::norm(f.coeff(2)) / (1 + std::pow(kTwoPi * 2, 2))).epsilon(1e-12));
  }
  SUBCASE("near resonance is rejected") {
    CHECK_THROWS_AS(helmholtz_control_check_1d(CircleField(a, 1), std::pow(kTwoPi, 2), CircleField::mode(a, 4, 1), arc),
                    NearResonance);
  }
  SUBCASE("ratio stays bounded and stable in a mu sweep") {
    CircleField W(a, 1, (Eigen::VectorXcd(3) << 0.5, 0.0, 0.5).finished());
    std::mt19937_64 rng(4);
    CircleField f(a, 6, oracle::gaussian_vector(rng, 13));
    const Eigen::VectorXd spec = oracle::circle_spectrum(a, 0.0, {{1, 0.5}, {-1, 0.5}}, 40);
    // Well-separated spectral gaps; near-degenerate pairs are skipped.
    std::vector<std::pair<double, double>> gaps;
    for (Eigen::Index j = 0; j + 1 < spec.size() && gaps.size() < 10; ++j)
      if (spec[j + 1] - spec[j] > 1.0) gaps.push_back({spec[j], spec[j + 1]});
    REQUIRE(gaps.size() == 10);
    double worst = 0.0, worst_change = 0.0;
    for (int s = 0; s < 50; ++s) {
      const auto [lo, hi] = gaps[s % 10];
      const double mu = lo + (hi - lo) * (0.1 + 0.8 * (s / 10) / 4.0);
      const auto r16 = helmholtz_control_check_1d(W, mu, f.resized(16), arc);
      const auto r24 = helmholtz_control_check_1d(W, mu, f.resized(24), arc);
      CHECK(std::isfinite(r16.ratio));
      worst = std::max(worst, r16.ratio);
      worst_change = std::max(worst_change, std::abs(r24.ratio - r16.ratio) / r16.ratio);
    }
    CHECK(worst < 1e4);
    CHECK(worst_change < 1e-6);
  }
}

TEST_CASE("Floquet observability sweep") {
  const double a = 1.0;
  const double T = 1.0;
  SUBCASE("whole circle gives T for every beta") {
    CircleField W(a, 1, (Eigen::VectorXcd(3) << 0.5, 0.0, 0.5).finished());
    FloquetSweepOptions o;
    o.N = 12;
    o.eigen_count = 6;
    o.random_count = 4;
    o.panels = 40;
    const auto s = floquet_obs_sweep(W, {0.0, a}, T, {0.0, 1.0, 3.0, kTwoPi}, o);
    for (const auto& e : s.entries) CHECK(std::abs(e.min_quotient - T) < 1e-10);
    CHECK(s.max_min_ratio == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("free single mode at beta = 0 gives T L / a") {
    const Interval arc{0.1, 0.35};
    for (int k : {0, 1, -3}) {
      const auto v = CircleField::mode(a, 8, k, 2.0);
      const double e = floquet_observed_energy(CircleField(a, 1), 0.0, 8, arc, T, 40, v);
      CHECK(e / std::pow(norm_l2(v), 2) == doctest::Approx(T * 0.25 / a).epsilon(1e-12));
    }
  }
  SUBCASE("interval gram matrix is the exact arc integral") {
    const Interval arc{0.3, 0.55};
    const auto G = interval_gram(a, 3, arc);
    const cplx I(0, 1);
    for (int j = -3; j <= 3; ++j)
      for (int k = -3; k <= 3; ++k) {
        const int d = k - j;
        const cplx expect = d == 0 ? cplx(arc.width())
                                   : (std::exp(I * kTwoPi * double(d) * arc.hi / a) - std::exp(I * kTwoPi * double(d) * arc.lo / a)) /
                                         (I * kTwoPi * double(d) / a);
        CHECK(std::abs(G(j + 3, k + 3) - expect) < 1e-14);
      }
  }
}
