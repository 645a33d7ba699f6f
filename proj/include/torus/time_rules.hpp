#pragma once

#include <complex>
#include <string>
#include <vector>

namespace torus {

enum class TimeRule {
  gauss_legendre,  ///< composite 16-node Gauss-Legendre panels
  trapezoid,       ///< composite trapezoid on panels + 1 nodes
  exact,           ///< exact integral (no nodes)
};

TimeRule parse_time_rule(const std::string& name);
std::string to_string(TimeRule rule);

struct TimeNode {
  double t;
  double w;
};

/// Quadrature of functions of t over the window (t0, t1) with a fixed number of panels.
class TimeQuadrature {
 public:
  TimeQuadrature(double t0, double t1, int panels, TimeRule rule = TimeRule::gauss_legendre);

  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t1_; }
  int panels() const noexcept { return panels_; }
  TimeRule rule() const noexcept { return rule_; }

  /// The rule applied to e^{i omega t}.  Closed form per panel structure, so the cost
  /// does not grow with the number of panels.
  std::complex<double> kernel(double omega) const;

  /// Explicit nodes and weights; empty for the exact rule.
  std::vector<TimeNode> nodes() const;

 private:
  double t0_;
  double t1_;
  int panels_;
  TimeRule rule_;
};

}  // namespace torus
