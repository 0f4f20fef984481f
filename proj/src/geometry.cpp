#include "degenlab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "degenlab/errors.hpp"

namespace degenlab {

double sphere_area(int n) {
  if (n < 1) throw DomainError("sphere_area: dimension must be >= 1, got " + std::to_string(n));
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n, double R) { return sphere_area(n) * std::pow(R, n) / n; }

}  // namespace degenlab
