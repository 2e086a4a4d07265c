#include "tacfoot/geometry.hpp"

#include <cmath>

#include "tacfoot/errors.hpp"

namespace tacfoot {

void validate(const ArcSpec& arc) {
  if (arc.num_taps < 3) throw Error("arc num_taps must be >= 3");
  if (arc.num_taps % 2 == 0) throw Error("arc num_taps must be odd");
  if (arc.half_extent_deg <= 0.0) throw Error("arc half_extent must be positive");
}

void validate(const RobotParams& params) {
  if (params.hip_radius_mm <= 0.0) throw Error("hip_radius must be positive");
  if (params.step_length_mm <= 0.0) throw Error("step_length must be positive");
  if (params.placement_noise_sigma_mm < 0.0 || params.heading_drift_sigma_deg < 0.0)
    throw Error("noise sigmas must be non-negative");
}

Pose2D normalized(Pose2D pose) {
  pose.heading_deg = wrap_deg(pose.heading_deg);
  return pose;
}

Vec2 foot_position(const Pose2D& pose, const RobotParams& params, double hip_angle_deg) {
  return pose.position() + params.hip_radius_mm * unit_from_deg(pose.heading_deg + hip_angle_deg);
}

std::vector<std::pair<double, Vec2>> arc_points(const Pose2D& pose, const RobotParams& params,
                                                const ArcSpec& arc) {
  validate(arc);
  const int mid = (arc.num_taps - 1) / 2;
  const double spacing = arc.spacing_deg();
  std::vector<std::pair<double, Vec2>> out;
  out.reserve(arc.num_taps);
  for (int k = 0; k < arc.num_taps; ++k) {
    const double angle = arc.center_deg + (k - mid) * spacing;
    out.emplace_back(angle, foot_position(pose, params, angle));
  }
  return out;
}

Vec2 apply_actuation_noise(Vec2 point, const RobotParams& params, Rng& rng) {
  const double dx = rng.normal(params.placement_noise_sigma_mm);
  const double dy = rng.normal(params.placement_noise_sigma_mm);
  return {point.x + dx, point.y + dy};
}

Vec2 apply_actuation_noise(Vec2 point, const RobotParams& params, std::uint64_t seed) {
  Rng rng(seed);
  return apply_actuation_noise(point, params, rng);
}

TurnOutcome turn_and_step(const Pose2D& pose, const RobotParams& params, Vec2 target_foot,
                          Rng& rng) {
  const Vec2 to_target = target_foot - pose.position();
  const double dist = to_target.norm();
  if (dist > 2.0 * params.hip_radius_mm)
    throw UnreachableTarget("target foot beyond reach: " + std::to_string(dist) + " mm");

  TurnOutcome out;
  double heading_cmd = pose.heading_deg;
  if (dist > 1e-12) heading_cmd = rad_to_deg(std::atan2(to_target.y, to_target.x));
  out.commanded_turn_deg = wrap_deg(heading_cmd - pose.heading_deg);

  double heading = pose.heading_deg + out.commanded_turn_deg;
  heading += rng.normal(params.heading_drift_sigma_deg);

  const TurnSlipModel& slip = params.turn_slip;
  if (std::abs(out.commanded_turn_deg) > slip.threshold_deg && slip.probability > 0.0) {
    if (rng.uniform01() < slip.probability) {
      const double mag = rng.uniform(slip.min_deg, slip.max_deg);
      out.slip_deg = (out.commanded_turn_deg >= 0.0 ? -mag : mag);
      out.slipped = true;
      heading += out.slip_deg;
    }
  }

  Pose2D next;
  next.heading_deg = wrap_deg(heading);
  const Vec2 advance = params.step_length_mm * unit_from_deg(next.heading_deg);
  next.x_mm = pose.x_mm + advance.x;
  next.y_mm = pose.y_mm + advance.y;
  out.pose = next;
  return out;
}

}  // namespace tacfoot
