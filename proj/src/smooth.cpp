#include "torus/smooth.hpp"

#include <cmath>
#include <numbers>

namespace torus::smooth {

double glue(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = glue(s);
  const double b = glue(1.0 - s);
  return a / (a + b);
}

double plateau(double t) { return step(2.0 * (1.0 - std::abs(t))); }

double cosine_ramp(double signed_distance, double width) {
  if (width <= 0.0) return signed_distance > 0.0 ? 1.0 : 0.0;
  if (signed_distance <= -0.5 * width) return 0.0;
  if (signed_distance >= 0.5 * width) return 1.0;
  return 0.5 + 0.5 * std::sin(std::numbers::pi * signed_distance / width);
}

}  // namespace torus::smooth
