#include "conical/geometry.hpp"

#include <numbers>

namespace conical {

std::vector<IdealPoint> circle_grid(int n, double offset) {
  std::vector<IdealPoint> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double th = offset + 2.0 * std::numbers::pi * k / n;
    out.push_back(ball_ideal(Eigen::Vector2d(std::cos(th), std::sin(th))));
  }
  return out;
}

std::vector<IdealPoint> fibonacci_sphere(int n) {
  std::vector<IdealPoint> out;
  out.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n;
    const double r = std::sqrt(1.0 - z * z);
    Eigen::Vector3d u(z, r * std::cos(golden * k), r * std::sin(golden * k));
    out.push_back(ball_ideal(Eigen::Vector3d(u.normalized())));
  }
  return out;
}

}  // namespace conical
