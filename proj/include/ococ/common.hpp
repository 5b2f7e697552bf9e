#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ococ {

using Vec3 = std::array<double, 3>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double sq_dist(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

inline double dist(const Vec3& a, const Vec3& b) { return std::sqrt(sq_dist(a, b)); }

// Distance in the XY plane (the "plane distance" used by the boundary decay).
inline double dist_xy(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace ococ
