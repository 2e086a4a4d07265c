#pragma once

// Independent oracles used by tests. These recompute expected values from
// first principles (terrain geometry, brute-force loops) and must stay
// decoupled from the implementation paths they check.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tacfoot/geometry.hpp"
#include "tacfoot/terrain.hpp"

namespace tacfoot::oracle {

// Root of hip_angle -> signed_edge_distance(foot_position(...)) by bisection.
// Requires a sign change over [lo_deg, hi_deg].
inline double true_edge_hip_angle(const Terrain& terrain, const Pose2D& pose,
                                  const RobotParams& robot, double lo_deg, double hi_deg) {
  auto s = [&](double a) { return signed_edge_distance(terrain, foot_position(pose, robot, a)); };
  double lo = lo_deg, hi = hi_deg;
  double slo = s(lo), shi = s(hi);
  if (slo == 0.0) return lo;
  if (shi == 0.0) return hi;
  if ((slo > 0.0) == (shi > 0.0))
    throw std::runtime_error("bisection: no sign change over the arc");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double sm = s(mid);
    if (sm == 0.0) return mid;
    if ((sm > 0.0) == (slo > 0.0)) {
      lo = mid;
      slo = sm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-12) break;
  }
  return 0.5 * (lo + hi);
}

// Straightforward per-pin reimplementation of the RMS pattern distance.
inline double dissimilarity_bruteforce(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  const std::size_t n_pins = a.size() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < n_pins; ++i) {
    const double dx = a[2 * i] - b[2 * i];
    const double dy = a[2 * i + 1] - b[2 * i + 1];
    acc += dx * dx + dy * dy;
  }
  return std::sqrt(acc / static_cast<double>(n_pins));
}

}  // namespace tacfoot::oracle
