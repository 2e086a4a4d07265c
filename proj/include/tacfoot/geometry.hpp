#pragma once

#include <utility>
#include <vector>

#include "tacfoot/types.hpp"

namespace tacfoot {

// Robot body state. Tracks the hip pivot of the tactile (front right) leg;
// the foot sits hip_radius ahead of it along heading + hip_angle.
struct Pose2D {
  double x_mm = 0.0;
  double y_mm = 0.0;
  double heading_deg = 0.0;  // world, CCW positive, kept in [-180, 180)

  Vec2 position() const { return {x_mm, y_mm}; }
};

// Heading execution error for large commanded turns. Disabled by default
// (probability 0); the curved-table experiment enables it to model turning
// that under-rotates at larger angles.
struct TurnSlipModel {
  double threshold_deg = 1e9;
  double probability = 0.0;
  double min_deg = 20.0;
  double max_deg = 35.0;
};

struct RobotParams {
  double hip_radius_mm = 115.0;
  double foot_spacing_mm = 230.0;
  double placement_noise_sigma_mm = 1.5;
  double heading_drift_sigma_deg = 2.0;
  double step_length_mm = 40.0;
  TurnSlipModel turn_slip{};
};

// Evenly spaced tap angles around the hip. num_taps must be odd and >= 3 so
// the center angle itself is sampled.
struct ArcSpec {
  double center_deg = 0.0;
  double half_extent_deg = 15.0;
  int num_taps = 31;

  double spacing_deg() const { return 2.0 * half_extent_deg / (num_taps - 1); }
};

void validate(const ArcSpec& arc);
void validate(const RobotParams& params);

Pose2D normalized(Pose2D pose);

// World-frame foot center for a given hip angle. Deterministic, noise-free.
Vec2 foot_position(const Pose2D& pose, const RobotParams& params, double hip_angle_deg);

// All tap points of an arc, angles strictly increasing.
std::vector<std::pair<double, Vec2>> arc_points(const Pose2D& pose, const RobotParams& params,
                                                const ArcSpec& arc);

// Isotropic Gaussian placement error.
Vec2 apply_actuation_noise(Vec2 point, const RobotParams& params, Rng& rng);
Vec2 apply_actuation_noise(Vec2 point, const RobotParams& params, std::uint64_t seed);

struct TurnOutcome {
  Pose2D pose;
  double commanded_turn_deg = 0.0;  // noise-free turn toward the target foot
  bool slipped = false;
  double slip_deg = 0.0;
};

// Re-aims the body at the planted foot and advances one step. Throws
// UnreachableTarget when the foot is farther than 2 * hip_radius away.
TurnOutcome turn_and_step(const Pose2D& pose, const RobotParams& params, Vec2 target_foot,
                          Rng& rng);

}  // namespace tacfoot
