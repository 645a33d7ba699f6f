#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "torus/errors.hpp"
#include "torus/floquet.hpp"
#include "torus/propagator.hpp"

using namespace torus;

namespace {

const double kTwoPi = 2 * oracle::kPi;

double rel(const FourierField& a, const FourierField& b) { return (a.coeffs() - b.coeffs()).norm() / b.coeffs().norm(); }

}  // namespace

TEST_CASE("free evolution") {
  const TorusLattice L(1, std::sqrt(2.0));
  const SchrodingerOperator op(FourierField(L, 1), 6);
  std::mt19937_64 rng(1);
  const auto u0 = oracle::gaussian_field(L, 6, rng);
  CHECK(evolve(op, u0, 0.0).coeffs() == u0.coeffs());
  for (auto [k, l] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {-2, 3}, {5, -6}}) {
    const double t = 0.137;
    const auto m = FourierField::mode(L, 6, k, l);
    const double lam = std::pow(kTwoPi * k / L.A(), 2) + std::pow(kTwoPi * l / L.B(), 2);
    const auto r = evolve(op, m, t);
    CHECK(std::abs(r.coeff(k, l) - std::polar(1.0, -lam * t)) < 1e-12);
    CHECK(std::abs(norm_l2(r) - norm_l2(m)) < 1e-13);
    CHECK((evolve_free(m, t).coeffs() - r.coeffs()).norm() < 1e-12);
  }
}

TEST_CASE("unitarity, energy conservation, group law and time reversal") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> Ut(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const TorusLattice L(1.0, trial % 2 ? std::sqrt(2.0) : 1.0);
    const SchrodingerOperator op(random_real_field(L, 3, 100 + trial, 30.0), 8);
    const auto u0 = oracle::gaussian_field(L, 8, rng);
    const double t1 = Ut(rng), t2 = Ut(rng);
    const auto u1 = evolve(op, u0, t1);
    CHECK(std::abs(norm_l2(u1) - 1.0) < 1e-12);
    const double e0 = energy(op, u0);
    CHECK(std::abs(energy(op, u1) - e0) < 1e-10 * std::max(1.0, std::abs(e0)));
    CHECK(rel(evolve(op, u1, t2), evolve(op, u0, t1 + t2)) < 1e-11);
    CHECK(rel(evolve(op, u1, -t1), u0) < 1e-11);
  }
}

TEST_CASE("controlled evolution") {
  const TorusLattice L(1, 1);
  const int N = 5, M = 32, nt = 200;
  const double T = 1.0;
  std::mt19937_64 rng(5);
  const SchrodingerOperator op(random_real_field(L, 2, 9, 5.0), N);
  const auto u0 = oracle::gaussian_field(L, N, rng);

  SUBCASE("zero source reduces to free evolution") {
    const auto r = evolve_controlled(op, u0, [&](double) { return FourierField(L, N); }, Region::disc({0.5, 0.5}, 0.2), T, nt, M);
    CHECK(rel(r.state, evolve(op, u0, T)) < 1e-12);
    auto support = std::make_shared<const ControlSupport>(L, Region::disc({0.5, 0.5}, 0.2), M);
    const auto z = evolve_controlled(op, u0, ControlSamples::zero(support, T, nt));
    CHECK(rel(z.state, evolve(op, u0, T)) < 1e-12);
  }

  SUBCASE("constant eigenmode source, closed-form Duhamel value") {
    const SchrodingerOperator op0(FourierField(L, 1), N);
    const auto e = FourierField::mode(L, N, 1, 0);
    const double lam = kTwoPi * kTwoPi;
    const auto r = evolve_controlled(op0, FourierField(L, N), [&](double) { return e; }, Region::whole(), T, nt, M);
    // i u' = lam u + e, u(0) = 0: u(T) = -i (1 - e^{-i lam T}) / (i lam) e.
    const cplx I(0, 1);
    const cplx expect = -I * (1.0 - std::exp(-I * lam * T)) / (I * lam);
    const double err = std::abs(r.state.coeff(1, 0) - expect);
    CHECK(err < 2.0 * r.error_estimate + 1e-13);
    CHECK(err < 1e-2 * std::abs(expect));
    const auto fine = evolve_controlled(op0, FourierField(L, N), [&](double) { return e; }, Region::whole(), T, 4 * nt, M);
    CHECK(std::abs(fine.state.coeff(1, 0) - expect) < err / 10);
  }

  SUBCASE("linearity in the source") {
    const auto f1 = oracle::gaussian_field(L, N, rng), f2 = oracle::gaussian_field(L, N, rng);
    const Region D = Region::disc({0.3, 0.6}, 0.25);
    const FourierField zero(L, N);
    auto g1 = [&](double t) { return f1 * cplx(std::cos(3 * t)); };
    auto g2 = [&](double t) { return f2 * cplx(0, t); };
    const auto r1 = evolve_controlled(op, zero, g1, D, T, 40, M);
    const auto r2 = evolve_controlled(op, zero, g2, D, T, 40, M);
    const auto r12 = evolve_controlled(op, zero, [&](double t) { return g1(t) + g2(t); }, D, T, 40, M);
    CHECK((r12.state.coeffs() - r1.state.coeffs() - r2.state.coeffs()).norm() < 1e-11 * r12.state.coeffs().norm());
  }

  SUBCASE("manufactured solution") {
    // u(t) = (1 + t) e_j solves i u' = P u + f with f = (i - lam_j (1 + t)) e_j.
    const auto& E = op.eig();
    const Eigen::Index j = 3;
    const FourierField ej(L, N, E.vectors.col(j));
    const double lam = E.values[j];
    const cplx I(0, 1);
    const auto r = evolve_controlled(op, ej, [&](double t) { return ej * (I - lam * (1 + t)); }, Region::whole(), T, nt, M);
    const double err = (r.state.coeffs() - 2.0 * ej.coeffs()).norm();
    CHECK(err < 2.0 * r.error_estimate + 1e-12);
    CHECK(err < 1e-2 * 2.0);
  }

  SUBCASE("sampled-control rule agrees with the time-function rule") {
    const Region D = Region::disc({0.5, 0.5}, 0.3);
    auto support = std::make_shared<const ControlSupport>(L, D, M);
    auto f = ControlSamples::zero(support, T, 50);
    const auto g = oracle::gaussian_field(L, N, rng);
    for (int n = 0; n <= 50; ++n) {
      const Eigen::MatrixXcd col = support->sample(g.coeffs() * std::polar(1.0, 2.0 * f.time(n)), N);
      f.values.col(n) = col.col(0);
    }
    const auto a = evolve_controlled(op, u0, f);
    const auto b = evolve_controlled(op, u0, [&](double t) { return g * std::polar(1.0, 2.0 * t); }, D, T, 50, M);
    CHECK(rel(a.state, b.state) < 1e-12);
    CHECK(std::isfinite(a.error_estimate));
    auto odd = ControlSamples::zero(support, T, 7);
    CHECK(std::isnan(evolve_controlled(op, u0, odd).error_estimate));
  }

  SUBCASE("too few time steps") {
    CHECK_THROWS_AS(evolve_controlled(op, u0, [&](double) { return u0; }, Region::whole(), T, 1, M), InvalidArgument);
  }
}

TEST_CASE("control samples") {
  const TorusLattice L(1, 1);
  auto support = std::make_shared<const ControlSupport>(L, Region::whole(), 16);
  auto f = ControlSamples::zero(support, 2.0, 4);
  f.values.setConstant(cplx(1.0, 1.0));
  // Trapezoid in time over [0, 2], rectangle rule over the unit torus: ||f||^2 = 2 * 2.
  CHECK(control_norm(f) == doctest::Approx(std::sqrt(4.0)).epsilon(1e-14));
  CHECK(std::abs(control_inner(f, f) - cplx(4.0)) < 1e-13);
  const Eigen::VectorXd w = trapezoid_weights(2.0, 4);
  CHECK(w.sum() == doctest::Approx(2.0));
  CHECK(w[0] == doctest::Approx(0.25));
}

TEST_CASE("Floquet propagator") {
  const double a = 1.3;
  SUBCASE("beta = 0, W = 0, single mode phase") {
    const FloquetOperator1D fop(CircleField(a, 1), 0.0, 8);
    const auto v = CircleField::mode(a, 8, 3);
    const auto r = evolve_floquet(fop, v, 0.4);
    CHECK(std::abs(r.coeff(3) - std::polar(1.0, -std::pow(kTwoPi * 3 / a, 2) * 0.4)) < 1e-12);
  }
  SUBCASE("gauge equivalence of beta = 0 and beta = 2 pi / a") {
    CircleField W(a, 2, (Eigen::VectorXcd(5) << 0.1, 0.5, 0.0, 0.5, 0.1).finished());
    const int N = 24;
    const FloquetOperator1D f0(W, 0.0, N), f1(W, kTwoPi / a, N);
    // Relabelling k -> k + 1 only disturbs the truncation edge: compare the low spectrum.
    const Eigen::Index count = N;
    CHECK((f0.eig().values.head(count) - f1.eig().values.head(count)).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::VectorXd ref = oracle::circle_spectrum(a, 0.3, {{1, 0.5}, {-1, 0.5}, {2, 0.1}, {-2, 0.1}}, N);
    const FloquetOperator1D fb(W, 0.3, N);
    CHECK((fb.eig().values - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("unitarity at random beta") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, kTwoPi / a);
    CircleField W(a, 1, (Eigen::VectorXcd(3) << 0.7, 0.0, 0.7).finished());
    for (int s = 0; s < 10; ++s) {
      const FloquetOperator1D fop(W, U(rng), 16);
      CircleField v(a, 16, oracle::gaussian_vector(rng, 33));
      const double n0 = norm_l2(v);
      CHECK(std::abs(norm_l2(evolve_floquet(fop, v, U(rng))) - n0) < 1e-12 * n0);
    }
  }
}
