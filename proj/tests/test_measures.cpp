#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "torus/errors.hpp"
#include "torus/measures.hpp"
#include "torus/propagator.hpp"

using namespace torus;

namespace {

// <Op_h(a) u, u> on a physical grid: profile(h D) in Fourier space, harmonics pointwise.
cplx grid_element(const TestSymbol& a, const FourierField& u, double h, int M) {
  const TorusLattice& L = u.lattice();
  const int N = u.truncation();
  const Eigen::MatrixXcd ug = u.on_grid(M);
  cplx total = 0.0;
  for (const auto& t : a.terms) {
    Eigen::VectorXcd c = u.coeffs();
    for (int k = -N; k <= N; ++k)
      for (int l = -N; l <= N; ++l) {
        const double xi = 2 * oracle::kPi * k / L.A(), eta = 2 * oracle::kPi * l / L.B();
        c[u.index(k, l)] *= t.profile.f({h * xi, h * eta});
      }
    const Eigen::MatrixXcd wg = FourierField(L, N, c).on_grid(M);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        const double x = L.A() * i / M, y = L.B() * j / M;
        cplx g = 0.0;
        for (const auto& hm : t.harmonics)
          g += hm.c * std::polar(1.0, 2 * oracle::kPi * (hm.k * x / L.A() + hm.l * y / L.B()));
        total += g * wg(i, j) * std::conj(ug(i, j));
      }
  }
  return total * L.area() / double(M * M);
}

TestSymbol smooth_symbol() {
  return TestSymbol{"smooth",
                    {SymbolTerm{{{0, 0, 1.0}, {1, 0, 0.25}, {-1, 0, 0.25}, {0, 1, cplx(0, 0.2)}, {0, -1, cplx(0, -0.2)}},
                                profile_disc({0.9, 1.0}, 0.8)}}};
}

}  // namespace

TEST_CASE("quantization") {
  const TorusLattice L(1, std::sqrt(2.0));
  std::mt19937_64 rng(6);
  const auto u = oracle::gaussian_field(L, 8, rng) * cplx(1.5);
  SUBCASE("constant symbol is the identity") {
    const auto one = TestSymbol::multiplier("one", profile_one());
    for (double h : {1.0, 0.1, 0.01}) CHECK(std::abs(matrix_element(one, u, h) - std::pow(norm_l2(u), 2)) < 1e-12);
  }
  SUBCASE("agrees with grid quadrature") {
    const TestSymbol a{"mixed",
                       {SymbolTerm{{{0, 0, 0.5}, {2, -1, cplx(0.1, 0.3)}}, profile_disc({0.2, -0.1}, 0.6)},
                        SymbolTerm{{{1, 1, 1.0}}, profile_annulus(1.0, 0.3)}}};
    for (double h : {1.0 / 8, 1.0 / 20}) CHECK(std::abs(matrix_element(a, u, h) - grid_element(a, u, h, 64)) < 1e-12);
  }
  SUBCASE("plane wave multiplier") {
    const auto m = FourierField::mode(L, 8, 3, -2, 0.7);
    const auto p = profile_disc({0.5, -0.5}, 0.6);
    const double h = 1.0 / 25;
    const Vec2 xi = L.frequency(3, -2);
    const auto a = TestSymbol{"a", {SymbolTerm{{{0, 0, cplx(2.0, -1.0)}}, p}}};
    CHECK(std::abs(matrix_element(a, m, h) - cplx(2.0, -1.0) * p.f({h * xi[0], h * xi[1]}) * std::pow(norm_l2(m), 2)) < 1e-13);
  }
  SUBCASE("nonnegative for a squared profile, sesquilinear in u") {
    const auto d = profile_disc({0.0, 0.0}, 3.0);
    const auto sq = TestSymbol::multiplier("sq", ZetaProfile{"sq", [d](const Vec2& z) { return d.f(z) * d.f(z); }, 3.0});
    for (int s = 0; s < 5; ++s) CHECK(std::real(matrix_element(sq, oracle::gaussian_field(L, 8, rng), 0.1)) >= -1e-15);
    const auto a = smooth_symbol();
    CHECK(std::abs(matrix_element(a, u * cplx(0, 2), 0.1) - 4.0 * matrix_element(a, u, 0.1)) < 1e-12);
  }
  SUBCASE("profile shapes") {
    const auto d = profile_disc({1.0, 0.0}, 0.4);
    CHECK(d.f({1.1, 0.1}) == 1.0);
    CHECK(d.f({1.5, 0.0}) == 0.0);
    const auto r = profile_annulus(1.0, 0.2);
    CHECK(r.f({0.0, 1.05}) == 1.0);
    CHECK(r.f({0.0, 1.3}) == 0.0);
    CHECK_THROWS_AS(profile_disc({0, 0}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(matrix_element(smooth_symbol(), u, 0.0), InvalidArgument);
  }
}

TEST_CASE("coherent states concentrate at a point of phase space") {
  const TorusLattice L(1, 1);
  const Vec2 z0{0.3, 0.6}, xi0{0.6, 0.8};
  const auto cc = coherent_convergence(smooth_symbol(), L, 32, z0, xi0, {1.0 / 32, 1.0 / 64, 1.0 / 128});
  CHECK(std::abs(cc.target - smooth_symbol()(L, z0, xi0)) < 1e-15);
  CHECK(cc.max_ratio <= 0.75);
  for (std::size_t i = 1; i < cc.error.size(); ++i) CHECK(cc.error[i] < cc.error[i - 1]);
  std::vector<std::pair<double, FourierField>> seq;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) seq.push_back({h, coherent_state(L, 32, z0, xi0, h)});
  const auto sg = measure_signatures(seq);
  CHECK(sg.mass_ok);
  CHECK(sg.off_circle_ok);
  CHECK(sg.off_circle_max < 1e-3);
}

TEST_CASE("measure scans") {
  const TorusLattice L(1, 1);
  SUBCASE("eigenfunctions see nothing away from the unit circle") {
    std::vector<std::pair<double, FourierField>> seq;
    for (int k : {4, 8, 16}) {
      const double h = 1.0 / (2 * oracle::kPi * k);
      seq.push_back({h, FourierField::mode(L, 16, k, 0)});
    }
    const auto sc = measure_scan(seq, {TestSymbol::multiplier("disc", profile_disc({0.0, 0.0}, 0.5))});
    CHECK(sc.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(sc.limit[0]) == 0.0);
    const auto sg = measure_signatures(seq);
    CHECK(sg.mass_ok);
    CHECK(sg.mass_error < 1e-12);
  }
  SUBCASE("plane waves give the profile at their frequency") {
    const auto p = profile_disc({0.8, 0.0}, 0.5);
    const cplx c00(0.5, 0.25);
    const TestSymbol a{"a", {SymbolTerm{{{0, 0, c00}, {1, 0, 3.0}}, p}}};
    std::vector<std::pair<double, FourierField>> seq;
    for (double h : {1.0 / 20, 1.0 / 40}) seq.push_back({h, FourierField::mode(L, 8, 3, 0, 2.0)});
    const auto sc = measure_scan(seq, {a});
    for (int j = 0; j < 2; ++j) {
      const double zeta = seq[j].first * 2 * oracle::kPi * 3;
      CHECK(std::abs(sc.values(0, j) - c00 * p.f({zeta, 0.0}) * 4.0) < 1e-13);
    }
  }
  SUBCASE("h must decrease strictly") {
    const auto u = FourierField::mode(L, 4, 1, 0);
    const auto one = TestSymbol::multiplier("one", profile_one());
    CHECK_THROWS_AS(measure_scan({{0.1, u}, {0.1, u}}, {one}), InvalidArgument);
    CHECK_THROWS_AS(measure_scan({{0.1, u}, {0.2, u}}, {one}), InvalidArgument);
    CHECK_THROWS_AS(measure_scan({}, {one}), InvalidArgument);
  }
  SUBCASE("Richardson limit is exact for data linear in h") {
    // <Op_h(one) u_h, u_h> = 1 + h for u_h = sqrt(1 + h) e_0.
    std::vector<std::pair<double, FourierField>> seq;
    for (double h : {0.2, 0.1, 0.05}) seq.push_back({h, FourierField::mode(L, 2, 0, 0, std::sqrt(1 + h))});
    const auto sc = measure_scan(seq, {TestSymbol::multiplier("one", profile_one())});
    CHECK(std::abs(sc.limit[0] - 1.0) < 1e-13);
    CHECK(sc.error_bar[0] == doctest::Approx(0.05).epsilon(1e-12));
  }
}

TEST_CASE("time averages along the free flow") {
  const TorusLattice L(1, std::sqrt(2.0));
  std::mt19937_64 rng(8);
  const auto u = oracle::gaussian_field(L, 4, rng);
  const double T = 0.37;
  const int n = 4000;
  for (auto [k, l] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {1, -2}}) {
    // Simpson rule over [0, T] of the instantaneous harmonic.
    const TestSymbol e{"e", {SymbolTerm{{{k, l, 1.0}}, profile_one()}}};
    cplx s = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      s += w * matrix_element(e, evolve_free(u, T * j / n), 1.0);
    }
    s *= 1.0 / (3.0 * n);
    CHECK(std::abs(time_averaged_harmonic(u, k, l, T) - s) < 1e-8);
  }
  CHECK(std::abs(time_averaged_harmonic(u, 0, 0, T) - 1.0) < 1e-13);
}

TEST_CASE("coherent states equidistribute on closed orbits") {
  const TorusLattice L(1, 1);
  for (auto [n, m] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}}) {
    const auto ou = orbit_uniformity(make_direction(L, n, m), {0.3, 0.6}, {1.0 / 16, 1.0 / 32, 1.0 / 64}, 32);
    CHECK(ou.decreasing);
    CHECK(ou.deviation.back() < ou.deviation.front());
  }
}

TEST_CASE("direction census") {
  const TorusLattice L(1, 1);
  const auto c1 = direction_census(L, 1);
  REQUIRE(c1.size() == 4);
  CHECK(c1[0].b == doctest::Approx(1.0));
  CHECK(c1[1].b == doctest::Approx(1.0));
  CHECK(c1[2].b == doctest::Approx(std::sqrt(2.0)));
  const TorusLattice R(2.0, std::sqrt(3.0));
  const int bound = 4;
  std::set<std::pair<int, int>> brute;
  for (int n = -bound; n <= bound; ++n)
    for (int m = -bound; m <= bound; ++m) {
      if (oracle::gcd(n, m) != 1) continue;
      if (n > 0 || (n == 0 && m == 1)) brute.insert({n, m});
    }
  const auto c = direction_census(R, bound);
  std::set<std::pair<int, int>> got;
  for (const auto& d : c) got.insert({int(d.n), int(d.m)});
  CHECK(got == brute);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].b >= c[i - 1].b - 1e-12);
  const auto ax = std::find_if(c.begin(), c.end(), [](const RationalDirection& d) { return d.n == 1 && d.m == 0; });
  REQUIRE(ax != c.end());
  CHECK(ax->b == doctest::Approx(2.0));
  CHECK_THROWS_AS(direction_census(R, 0), InvalidArgument);
}
