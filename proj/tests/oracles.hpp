#ifndef UAVNET_TESTS_ORACLES_HPP
#define UAVNET_TESTS_ORACLES_HPP

#include "uavnet/env.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracles {

using uavnet::Vec3;
using uavnet::env::Building;

// Walks the open segment in ~1 mm steps and reports whether any sample lies
// inside a building volume.
inline bool ray_march_los(const std::vector<Building>& buildings, const Vec3& a, const Vec3& b) {
  const double length = (b - a).norm();
  const long steps = std::max<long>(2, static_cast<long>(std::ceil(length / 1e-3)));
  for (const auto& bld : buildings) {
    // Broad phase on the segment's bounding box.
    if (std::max(a.x(), b.x()) < bld.x || std::min(a.x(), b.x()) > bld.x + bld.width) continue;
    if (std::max(a.y(), b.y()) < bld.y || std::min(a.y(), b.y()) > bld.y + bld.depth) continue;
    if (std::min(a.z(), b.z()) > bld.height_m) continue;
    for (long s = 1; s < steps; ++s) {
      const Vec3 p = a + (b - a) * (static_cast<double>(s) / steps);
      if (p.x() >= bld.x && p.x() <= bld.x + bld.width && p.y() >= bld.y &&
          p.y() <= bld.y + bld.depth && p.z() <= bld.height_m) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace oracles

#endif  // UAVNET_TESTS_ORACLES_HPP
