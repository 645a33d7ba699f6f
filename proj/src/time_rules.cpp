#include "torus/time_rules.hpp"

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "torus/errors.hpp"

namespace torus {

namespace {

using cplx = std::complex<double>;

struct GaussRule {
  std::array<double, 16> x;  // on [-1, 1]
  std::array<double, 16> w;
};

const GaussRule& gauss16() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 16>;
    GaussRule r{};
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    // Boost stores the 8 non-negative abscissas.
    for (std::size_t i = 0; i < 8; ++i) {
      r.x[7 - i] = -a[i];
      r.w[7 - i] = w[i];
      r.x[8 + i] = a[i];
      r.w[8 + i] = w[i];
    }
    return r;
  }();
  return rule;
}

// sum_{p=0}^{n-1} e^{i theta p}
cplx geometric(double theta, int n) {
  const double s = std::sin(0.5 * theta);
  if (std::abs(s) < 1e-3) {
    cplx acc = 0.0;
    for (int p = 0; p < n; ++p) acc += std::polar(1.0, theta * p);
    return acc;
  }
  return std::sin(0.5 * n * theta) / s * std::polar(1.0, 0.5 * theta * (n - 1));
}

}  // namespace

TimeRule parse_time_rule(const std::string& name) {
  if (name == "gauss_legendre") return TimeRule::gauss_legendre;
  if (name == "trapezoid") return TimeRule::trapezoid;
  if (name == "exact") return TimeRule::exact;
  throw InvalidArgument("unknown time rule '" + name + "'");
}

std::string to_string(TimeRule rule) {
  switch (rule) {
    case TimeRule::gauss_legendre:
      return "gauss_legendre";
    case TimeRule::trapezoid:
      return "trapezoid";
    case TimeRule::exact:
      return "exact";
  }
  return "?";
}

TimeQuadrature::TimeQuadrature(double t0, double t1, int panels, TimeRule rule)
    : t0_(t0), t1_(t1), panels_(panels), rule_(rule) {
  if (!(t1 > t0)) throw InvalidArgument("time window needs t1 > t0");
  if (panels < 1) throw InvalidArgument("time quadrature needs at least one panel");
}

std::complex<double> TimeQuadrature::kernel(double omega) const {
  const double L = t1_ - t0_;
  const cplx shift = std::polar(1.0, omega * t0_);
  switch (rule_) {
    case TimeRule::exact: {
      const double phi = omega * L;
      if (std::abs(phi) < 1e-4)
        return shift * L * cplx(1.0 - phi * phi / 6.0, 0.5 * phi - phi * phi * phi / 24.0);
      const double s = std::sin(0.5 * phi);
      return shift * cplx(std::sin(phi), 2.0 * s * s) / omega;
    }
    case TimeRule::trapezoid: {
      const double tau = L / panels_;
      const double theta = omega * tau;
      const cplx ends = 0.5 * (1.0 + std::polar(1.0, theta * panels_));
      return shift * tau * (geometric(theta, panels_ + 1) - ends);
    }
    case TimeRule::gauss_legendre: {
      const double tau = L / panels_;
      const GaussRule& g = gauss16();
      // Symmetric nodes: the panel sum is e^{i theta / 2} times a real cosine sum.
      const double theta = omega * tau;
      double cs = 0.0;
      for (int i = 8; i < 16; ++i) cs += g.w[i] * std::cos(0.5 * theta * g.x[i]);
      const cplx panel = tau * cs * std::polar(1.0, 0.5 * theta);
      return shift * panel * geometric(theta, panels_);
    }
  }
  return 0.0;
}

std::vector<TimeNode> TimeQuadrature::nodes() const {
  std::vector<TimeNode> out;
  const double tau = (t1_ - t0_) / panels_;
  switch (rule_) {
    case TimeRule::exact:
      break;
    case TimeRule::trapezoid:
      for (int n = 0; n <= panels_; ++n)
        out.push_back({t0_ + n * tau, (n == 0 || n == panels_) ? 0.5 * tau : tau});
      break;
    case TimeRule::gauss_legendre: {
      const GaussRule& g = gauss16();
      for (int p = 0; p < panels_; ++p)
        for (int i = 0; i < 16; ++i)
          out.push_back({t0_ + p * tau + 0.5 * tau * (1.0 + g.x[i]), 0.5 * tau * g.w[i]});
      break;
    }
  }
  return out;
}

}  // namespace torus
