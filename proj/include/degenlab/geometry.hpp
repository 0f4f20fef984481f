#pragma once

namespace degenlab {

/// Surface area of the unit sphere in R^n, 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Volume of the ball of radius R in R^n.
double ball_volume(int n, double R);

}  // namespace degenlab
