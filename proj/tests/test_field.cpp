#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "torus/errors.hpp"
#include "torus/field.hpp"
#include "torus/region.hpp"

using namespace torus;

TEST_CASE("L2 norm") {
  const TorusLattice L(1, 1);
  CHECK(norm_l2(FourierField(L, 4)) == 0.0);
  CHECK(norm_l2(FourierField::mode(L, 4, 1, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  const TorusLattice T(2.0, 0.5);
  CHECK(norm_l2(FourierField::mode(T, 2, -1, 2, 3.0)) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("Parseval against grid quadrature") {
  std::mt19937_64 rng(3);
  for (const TorusLattice L : {TorusLattice(1, 1), TorusLattice(1.3, std::sqrt(2.0))}) {
    for (int N : {2, 5}) {
      const auto u = oracle::gaussian_field(L, N, rng) * cplx(1.7, 0.2);
      for (int M : {4 * N, 64}) {
        const double quad = oracle::grid_mass(u, M, [](int, int) { return 1.0; });
        CHECK(std::abs(quad - std::pow(norm_l2(u), 2)) < 1e-10);
      }
    }
  }
  const auto u = oracle::gaussian_field(TorusLattice(1, 1), 4, rng);
  const double quad = oracle::grid_mass(u, 256, [](int, int) { return 1.0; });
  CHECK(std::abs(quad - 1.0) < 1e-10);
}

TEST_CASE("Sobolev norm") {
  std::mt19937_64 rng(9);
  const TorusLattice L(1, 1);
  const auto u = oracle::gaussian_field(L, 4, rng);
  CHECK(norm_sobolev(u, 0.0) == doctest::Approx(norm_l2(u)).epsilon(1e-15));
  const auto c = FourierField::mode(L, 3, 0, 0, 2.0);
  CHECK(norm_sobolev(c, -2.0) == doctest::Approx(norm_l2(c)).epsilon(1e-15));
  const TorusLattice P(2 * oracle::kPi, 2 * oracle::kPi);
  const auto m = FourierField::mode(P, 3, 1, 0);
  CHECK(norm_sobolev(m, -2.0) == doctest::Approx(0.5 * norm_l2(m)).epsilon(1e-14));
  // Direct weighted sum.
  const TorusLattice T(0.8, 1.9);
  const auto v = oracle::gaussian_field(T, 3, rng);
  double s = 0.0;
  for (int k = -3; k <= 3; ++k)
    for (int l = -3; l <= 3; ++l) {
      const double xi = 2 * oracle::kPi * k / T.A(), eta = 2 * oracle::kPi * l / T.B();
      s += std::pow(1 + xi * xi + eta * eta, 1.5) * std::norm(v.coeff(k, l));
    }
  CHECK(norm_sobolev(v, 1.5) == doctest::Approx(std::sqrt(T.area() * s)).epsilon(1e-13));
}

TEST_CASE("restricted mass") {
  std::mt19937_64 rng(13);
  const TorusLattice L(1, 1);
  const auto u = oracle::gaussian_field(L, 6, rng);
  const int M = 64;
  SUBCASE("whole torus") { CHECK(std::abs(restricted_mass(u, Region::whole(), M) - 1.0) < 1e-10); }
  SUBCASE("plane wave gives the grid measure") {
    const auto w = FourierField::mode(L, 6, 2, -3);
    for (const Region& R : {Region::disc({0.3, 0.4}, 0.2), Region::rectangle({0.9, 0.1}, {0.3, 0.5}),
                            Region::strip(1, 1, 0.0, 0.2)}) {
      CHECK(restricted_mass(w, R, M) == doctest::Approx(R.grid_measure(L, M)).epsilon(1e-12));
    }
  }
  SUBCASE("matches direct quadrature") {
    const Region D = Region::disc({0.5, 0.5}, 0.25);
    const Eigen::MatrixXd mask = D.mask(L, M);
    const double ref = oracle::grid_mass(u, M, [&](int i, int j) { return mask(i, j); });
    CHECK(std::abs(restricted_mass(u, D, M) - ref) < 1e-12);
  }
  SUBCASE("region plus complement is the total mass") {
    for (const Region& R : {Region::disc({0.1, 0.9}, 0.3), Region::strip(2, 1, 0.05, 0.2),
                            Region::unite({Region::disc({0.2, 0.2}, 0.1), Region::rectangle({0.5, 0.5}, {0.2, 0.4})})}) {
      const double s = restricted_mass(u, R, M) + restricted_mass(u, Region::complement(R), M);
      CHECK(std::abs(s - 1.0) < 1e-10);
    }
  }
  SUBCASE("monotone under inclusion") {
    double prev = 0.0;
    for (double r : {0.05, 0.1, 0.2, 0.3, 0.45}) {
      const double m = restricted_mass(u, Region::disc({0.4, 0.6}, r), M);
      CHECK(m >= prev);
      prev = m;
    }
    const double part = restricted_mass(u, Region::disc({0.4, 0.6}, 0.1), M);
    const double uni = restricted_mass(u, Region::unite({Region::disc({0.4, 0.6}, 0.1), Region::disc({0.8, 0.1}, 0.1)}), M);
    CHECK(uni >= part);
  }
  SUBCASE("empty region and coarse grids are rejected") {
    CHECK_THROWS_AS(restricted_mass(u, Region::disc({0.501, 0.501}, 1e-4), M), EmptyRegion);
    CHECK_THROWS_AS(restricted_mass(u, Region::whole(), 4 * 6 - 1), InvalidArgument);
  }
}

TEST_CASE("bump inside the region carries the total mass") {
  // Narrow Gaussian, band-limited; tails at the disc edge are below e^-20.
  const TorusLattice L(1, 1);
  const int N = 32, M = 256;
  const double sigma = 0.03;
  Eigen::MatrixXcd g(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const double dx = double(i) / M - 0.5, dy = double(j) / M - 0.5;
      g(i, j) = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
    }
  const auto u = FourierField::from_grid(L, N, g);
  const double total = std::pow(norm_l2(u), 2);
  const double inside = restricted_mass(u, Region::disc({0.5, 0.5}, 0.2), M);
  CHECK(std::abs(inside - total) < 1e-6 * total);
  // Stable under grid refinement.
  CHECK(std::abs(restricted_mass(u, Region::disc({0.5, 0.5}, 0.2), 2 * M) - inside) < 1e-6 * total);
}

TEST_CASE("regions") {
  const TorusLattice L(1, 1);
  // Sharp shapes are closed: grid points on the boundary count.
  CHECK(Region::rectangle({0.0, 0.0}, {0.25, 0.5}).grid_measure(L, 64) == doctest::Approx(17.0 * 33.0 / 4096.0));
  CHECK(Region::strip(1, 0, 0.0, 0.25).grid_measure(L, 64) == doctest::Approx(17.0 * 64.0 / 4096.0));
  CHECK(Region::whole().grid_measure(L, 32) == doctest::Approx(1.0));
  // Periodic wrap: a disc centred at the corner has the full disc measure.
  CHECK(Region::disc({0.0, 0.0}, 0.2).grid_measure(L, 512) ==
        doctest::Approx(Region::disc({0.5, 0.5}, 0.2).grid_measure(L, 512)).epsilon(1e-12));
  CHECK(Region::disc({0.5, 0.5}, 0.2).grid_measure(L, 1024) == doctest::Approx(oracle::kPi * 0.04).epsilon(2e-3));
  Eigen::MatrixXi mask = Eigen::MatrixXi::Zero(4, 4);
  mask(1, 2) = 1;
  mask(3, 0) = 1;
  const Region R = Region::raster(mask);
  CHECK(R.grid_measure(L, 64) == doctest::Approx(2.0 / 16.0));
  CHECK(R.indicator(L, 0.3, 0.6) == 1.0);
  CHECK(R.indicator(L, 0.3, 0.4) == 0.0);
  // Taper stays in [0, 1] and agrees with the sharp indicator away from the edge.
  const Region T = Region::disc({0.5, 0.5}, 0.2).tapered(0.05);
  const Eigen::MatrixXd tm = T.mask(L, 128);
  CHECK(tm.minCoeff() >= 0.0);
  CHECK(tm.maxCoeff() <= 1.0);
  CHECK(T.indicator(L, 0.5, 0.5) == 1.0);
  CHECK(T.indicator(L, 0.5, 0.8) == 0.0);
}

TEST_CASE("random fields") {
  const TorusLattice L(1, 1);
  const auto a = random_field(L, 6, 42), b = random_field(L, 6, 42);
  CHECK(a.coeffs() == b.coeffs());
  CHECK(random_field(L, 6, 43).coeffs() != a.coeffs());
  CHECK(std::abs(norm_l2(a) - 1.0) < 1e-14);
  CHECK(std::abs(norm_l2(random_field(L, 6, 7, SobolevProfile{-2.0})) - 1.0) < 1e-14);
  const auto v = random_real_field(L, 3, 5, 2.0);
  CHECK(v.reality_defect() < 1e-15);
  CHECK(v.coeffs().cwiseAbs().sum() == doctest::Approx(2.0));
}

TEST_CASE("Sobolev profile variance follows the weight") {
  // Sample variance of each coefficient over 1000 draws, divided by (1 + |xi|^2)^-1,
  // is the same constant for every mode (3 percent sampling error per mode).
  const TorusLattice L(1, 1);
  const int N = 2, draws = 1000;
  Eigen::VectorXd var = Eigen::VectorXd::Zero((2 * N + 1) * (2 * N + 1));
  for (int s = 0; s < draws; ++s)
    var += random_coefficients(L, N, 1000 + s, SobolevProfile{-1.0}).coeffs().cwiseAbs2();
  var /= draws;
  Eigen::VectorXd scaled(var.size());
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l) {
      const double xi2 = std::pow(2 * oracle::kPi * k, 2) + std::pow(2 * oracle::kPi * l, 2);
      scaled[(k + N) * (2 * N + 1) + (l + N)] = var[(k + N) * (2 * N + 1) + (l + N)] * (1 + xi2);
    }
  const double mean = scaled.mean();
  CHECK(scaled.maxCoeff() < 1.2 * mean);
  CHECK(scaled.minCoeff() > 0.8 * mean);
}

TEST_CASE("grid round trip and resizing") {
  std::mt19937_64 rng(1);
  const TorusLattice L(1.5, 0.5);
  const auto u = oracle::gaussian_field(L, 5, rng);
  const auto back = FourierField::from_grid(L, 5, u.on_grid(32));
  CHECK((back.coeffs() - u.coeffs()).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::MatrixXcd g = u.on_grid(16);
  CHECK(std::abs(g(3, 7) - oracle::eval(u, 1.5 * 3 / 16, 0.5 * 7 / 16)) < 1e-13);
  CHECK(std::abs(u(0.31, 0.17) - oracle::eval(u, 0.31, 0.17)) < 1e-13);
  const auto big = u.resized(8);
  CHECK(norm_l2(big) == doctest::Approx(norm_l2(u)).epsilon(1e-15));
  CHECK(big.coeff(5, -5) == u.coeff(5, -5));
  CHECK(u.resized(3).band() <= 3);
  CHECK(u.coeff(6, 0) == cplx(0.0));
}
