#pragma once

// C-infinity cutoff profiles built from the exp(-1/t) glue function.

namespace torus::smooth {

/// exp(-1/t) for t > 0, zero otherwise.
double glue(double t);

/// Monotone smooth step: 0 for s <= 0, 1 for s >= 1.
double step(double s);

/// Plateau bump: identically 1 on [-1/2, 1/2], supported in (-1, 1).
double plateau(double t);

/// Cosine ramp used for mollified indicators: 0 below -w/2, 1 above w/2.
double cosine_ramp(double signed_distance, double width);

}  // namespace torus::smooth
