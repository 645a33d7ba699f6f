#include "torus/measures.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "torus/errors.hpp"
#include "torus/parallel.hpp"
#include "torus/smooth.hpp"

namespace torus {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

cplx harmonic_value(const TorusLattice& lat, const Harmonic& hm, const Vec2& z) {
  return hm.c * std::polar(1.0, kTwoPi * (hm.k * z[0] / lat.A() + hm.l * z[1] / lat.B()));
}

void check_sequence(const std::vector<std::pair<double, FourierField>>& seq) {
  if (seq.empty()) throw InvalidArgument("measure scan needs a non-empty sequence");
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!(seq[i].first > 0.0)) throw InvalidArgument("semiclassical parameter h must be positive");
    if (i > 0 && !(seq[i].first < seq[i - 1].first))
      throw InvalidArgument("h values of a measure scan must be strictly decreasing");
  }
}

}  // namespace

ZetaProfile profile_one() {
  return {"one", [](const Vec2&) { return 1.0; }, std::numeric_limits<double>::infinity()};
}

ZetaProfile profile_disc(const Vec2& center, double r) {
  if (!(r > 0.0)) throw InvalidArgument("profile radius must be positive");
  return {"disc",
          [center, r](const Vec2& z) {
            return smooth::plateau(std::hypot(z[0] - center[0], z[1] - center[1]) / r);
          },
          std::hypot(center[0], center[1]) + r};
}

ZetaProfile profile_annulus(double rho, double w) {
  if (!(w > 0.0)) throw InvalidArgument("annulus width must be positive");
  return {"annulus",
          [rho, w](const Vec2& z) { return smooth::plateau((std::hypot(z[0], z[1]) - rho) / w); },
          rho + w};
}

cplx TestSymbol::operator()(const TorusLattice& lattice, const Vec2& z, const Vec2& zeta) const {
  cplx s = 0.0;
  for (const auto& t : terms) {
    cplx zs = 0.0;
    for (const auto& hm : t.harmonics) zs += harmonic_value(lattice, hm, z);
    s += zs * t.profile.f(zeta);
  }
  return s;
}

TestSymbol TestSymbol::multiplier(std::string name, ZetaProfile p) {
  return {std::move(name), {SymbolTerm{{Harmonic{0, 0, 1.0}}, std::move(p)}}};
}

cplx matrix_element(const TestSymbol& a, const FourierField& u, double h) {
  if (!(h > 0.0)) throw InvalidArgument("semiclassical parameter h must be positive");
  const TorusLattice& lat = u.lattice();
  const int N = u.truncation();
  cplx total = 0.0;
  Eigen::VectorXd prof(u.size());
  for (const auto& t : a.terms) {
    for (int k = -N; k <= N; ++k)
      for (int l = -N; l <= N; ++l) {
        const Vec2 xi = lat.frequency(k, l);
        prof[u.index(k, l)] = t.profile.f({h * xi[0], h * xi[1]});
      }
    for (const auto& hm : t.harmonics) {
      cplx s = 0.0;
      for (int k = std::max(-N, -N - hm.k); k <= std::min(N, N - hm.k); ++k)
        for (int l = std::max(-N, -N - hm.l); l <= std::min(N, N - hm.l); ++l) {
          const Eigen::Index j = u.index(k, l);
          s += std::conj(u.coeffs()[u.index(k + hm.k, l + hm.l)]) * prof[j] * u.coeffs()[j];
        }
      total += hm.c * s;
    }
  }
  return lat.area() * total;
}

MeasureScan measure_scan(const std::vector<std::pair<double, FourierField>>& sequence,
                         const std::vector<TestSymbol>& symbols) {
  check_sequence(sequence);
  MeasureScan out;
  const std::size_t S = symbols.size(), H = sequence.size();
  for (const auto& [h, u] : sequence) out.h.push_back(h);
  for (const auto& s : symbols) out.symbols.push_back(s.name);
  out.values.resize(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(H));
  parallel_for(S * H, [&](std::size_t job) {
    const std::size_t s = job / H, i = job % H;
    out.values(s, i) = matrix_element(symbols[s], sequence[i].second, sequence[i].first);
  });
  for (std::size_t s = 0; s < S; ++s) {
    const auto r = static_cast<Eigen::Index>(s);
    const cplx last = out.values(r, H - 1);
    if (H < 2) {
      out.limit.push_back(last);
      out.error_bar.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double h1 = out.h[H - 2], h2 = out.h[H - 1];
    const cplx m1 = out.values(r, H - 2);
    const cplx lim = (h1 * last - h2 * m1) / (h1 - h2);
    out.limit.push_back(lim);
    out.error_bar.push_back(std::abs(lim - last));
  }
  return out;
}

TestSymbol mass_symbol() { return TestSymbol::multiplier("mass", profile_annulus(1.0, 1.0)); }

std::vector<TestSymbol> off_circle_symbols() {
  return {TestSymbol::multiplier("inner", profile_disc({0.0, 0.0}, 0.5)),
          TestSymbol::multiplier("outer", profile_annulus(2.0, 0.5))};
}

MeasureSignatures measure_signatures(const std::vector<std::pair<double, FourierField>>& sequence,
                                     double mass_tol, double off_tol) {
  std::vector<TestSymbol> syms{mass_symbol()};
  for (auto& s : off_circle_symbols()) syms.push_back(std::move(s));
  MeasureSignatures out;
  out.scan = measure_scan(sequence, syms);
  out.mass_limit = out.scan.limit[0];
  out.mass_error = std::abs(out.mass_limit - 1.0);
  out.mass_ok = out.mass_error <= mass_tol;
  out.off_circle_max = 0.0;
  const Eigen::Index last = out.scan.values.cols() - 1;
  for (Eigen::Index s = 1; s < out.scan.values.rows(); ++s)
    out.off_circle_max = std::max(out.off_circle_max, std::abs(out.scan.values(s, last)));
  out.off_circle_ok = out.off_circle_max <= off_tol;
  return out;
}

CoherentConvergence coherent_convergence(const TestSymbol& a, const TorusLattice& lattice, int N,
                                         const Vec2& z0, const Vec2& xi0,
                                         const std::vector<double>& hs) {
  if (hs.size() < 2) throw InvalidArgument("convergence check needs at least two h values");
  CoherentConvergence out;
  out.h = hs;
  out.target = a(lattice, z0, xi0);
  out.values.resize(hs.size());
  parallel_for(hs.size(), [&](std::size_t i) {
    out.values[i] = matrix_element(a, coherent_state(lattice, N, z0, xi0, hs[i]), hs[i]);
  });
  out.constant = 0.0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    out.error.push_back(std::abs(out.values[i] - out.target));
    out.constant = std::max(out.constant, out.error.back() / std::sqrt(hs[i]));
  }
  out.max_ratio = 0.0;
  for (std::size_t i = 1; i < hs.size(); ++i) {
    const double r = out.error[i - 1] > 0.0 ? out.error[i] / out.error[i - 1] : 0.0;
    out.ratio.push_back(r);
    out.max_ratio = std::max(out.max_ratio, r);
  }
  return out;
}

cplx time_averaged_harmonic(const FourierField& u0, int k, int l, double T) {
  if (!(T > 0.0)) throw InvalidArgument("averaging time must be positive");
  const TorusLattice& lat = u0.lattice();
  const int N = u0.truncation();
  const auto& c = u0.coeffs();
  const auto lam = [&](int a, int b) {
    const Vec2 xi = lat.frequency(a, b);
    return xi[0] * xi[0] + xi[1] * xi[1];
  };
  cplx s = 0.0;
  for (int a = std::max(-N, -N - k); a <= std::min(N, N - k); ++a)
    for (int b = std::max(-N, -N - l); b <= std::min(N, N - l); ++b) {
      // u(t)_j = u_j exp(-i lam_j t)
      const double w = lam(a + k, b + l) - lam(a, b);
      const double x = w * T;
      const cplx avg = std::abs(x) < 1e-8 ? cplx(1.0, 0.5 * x)
                                          : (std::polar(1.0, x) - 1.0) / cplx(0.0, x);
      s += std::conj(c[u0.index(a + k, b + l)]) * c[u0.index(a, b)] * avg;
    }
  return lat.area() * s;
}

OrbitUniformity orbit_uniformity(const RationalDirection& d, const Vec2& z0,
                                 const std::vector<double>& hs, int N, int K, int passes) {
  if (hs.empty()) throw InvalidArgument("orbit check needs h values");
  if (K < 1 || passes < 1) throw InvalidArgument("orbit check needs K >= 1 and passes >= 1");
  const TorusLattice& lat = d.lattice;
  OrbitUniformity out{hs, std::vector<double>(hs.size(), 0.0), true};
  const int Q = 8 * K * static_cast<int>(std::abs(d.n) + std::abs(d.m)) + 16;
  parallel_for(hs.size(), [&](std::size_t i) {
    const double h = hs[i];
    const FourierField u = coherent_state(lat, N, z0, d.xi0, h);
    const double T = passes * h * d.b / 2.0;
    double dev = 0.0;
    for (int k = -K; k <= K; ++k)
      for (int l = -K; l <= K; ++l) {
        if (k == 0 && l == 0) continue;
        cplx oracle = 0.0;
        for (int q = 0; q < Q; ++q) {
          const double s = d.b * q / Q;
          const Vec2 z{z0[0] + s * d.xi0[0], z0[1] + s * d.xi0[1]};
          oracle += harmonic_value(lat, Harmonic{k, l, 1.0}, z);
        }
        oracle /= Q;
        dev = std::max(dev, std::abs(time_averaged_harmonic(u, k, l, T) - oracle));
      }
    out.deviation[i] = dev;
  });
  for (std::size_t i = 1; i < hs.size(); ++i)
    if (!(out.deviation[i] < out.deviation[i - 1])) out.decreasing = false;
  return out;
}

std::vector<RationalDirection> direction_census(const TorusLattice& lattice, int bound) {
  if (bound < 1) throw InvalidArgument("census bound must be at least 1");
  std::vector<RationalDirection> out;
  for (int n = 0; n <= bound; ++n)
    for (int m = -bound; m <= bound; ++m) {
      if (std::gcd(n, m) != 1) continue;
      if (n == 0 && m != 1) continue;
      out.push_back(make_direction(lattice, n, m));
    }
  std::stable_sort(out.begin(), out.end(), [](const RationalDirection& x, const RationalDirection& y) {
    if (x.b != y.b) return x.b < y.b;
    if (x.n != y.n) return x.n > y.n;
    return x.m > y.m;
  });
  return out;
}

}  // namespace torus
