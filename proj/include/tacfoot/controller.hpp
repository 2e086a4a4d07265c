#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tacfoot/geometry.hpp"
#include "tacfoot/perception.hpp"
#include "tacfoot/sensor.hpp"
#include "tacfoot/terrain.hpp"
#include "tacfoot/vision.hpp"

namespace tacfoot {

struct SearchConfig {
  int max_sweeps = 3;
  double extent_growth = 1.5;
};

struct ControllerConfig {
  double tolerance_deg = 3.0;
  double safe_offset_deg = 7.0;  // toward the supported interior
  int max_iterations = 10;
  ArcSpec arc{0.0, 15.0, 31};
  SearchConfig search{};
  bool disable_sensing = false;
  bool use_image_pipeline = false;
  int reference_override = -1;       // < 0: transition-midpoint selection
  double dissim_range_floor = 0.3;   // informative-arc threshold, mm
};

void validate(const ControllerConfig& config);

// The retrain trigger. Exactly |prediction| > tolerance, no hysteresis.
inline bool retrain_required(double predicted_deg, double tolerance_deg) {
  return std::abs(predicted_deg) > tolerance_deg;
}

// Everything a run needs. predictor_override replaces the GP estimate when
// set (used by experiments and tests, e.g. a terrain-truth oracle).
struct RunContext {
  RobotParams robot{};
  PinLayout layout = PinLayout::make_default();
  SensorParams sensor{};
  DetectionParams detection{};
  CameraScale camera{};
  GPConfig gp{};
  ControllerConfig ctrl{};
  Terrain terrain = BeamTerrain{};
  Pose2D start_pose{};
  std::function<double(const Pose2D&, double hip_deg, const TapFrame&)> predictor_override;
};

struct TapObservation {
  double hip_deg = 0.0;
  TapFrame frame;
  double pred_deg = 0.0;
  double std_deg = 0.0;
};

struct ArcRecord {
  int id = -1;
  double center_deg = 0.0;
  double half_extent_deg = 0.0;
  std::vector<double> hip_angles_deg;
  std::vector<TapFrame> frames;
  std::vector<double> dissimilarities;
  std::vector<double> labels_deg;
  bool boundary = false;
  bool used_for_training = false;
};

struct FootholdRecord {
  Vec2 point{0.0, 0.0};
  double hip_deg = 0.0;
  double signed_edge_mm = 0.0;
  bool supported = false;
};

struct StepRecord {
  int iteration = 0;
  Pose2D pose_before{};
  TapObservation tap1, tap2;
  bool retrained = false;
  std::vector<ArcRecord> arcs;  // retrain arc then search sweeps, in order
  bool search_used = false;
  double edge_angle_deg = 0.0;
  FootholdRecord foothold;
  double commanded_turn_deg = 0.0;
  bool slipped = false;
  Pose2D pose_after{};
};

struct InitRecord {
  Pose2D pose_before{};
  bool sensing_disabled = false;
  ArcRecord arc;
  int reference_index = -1;
  double edge_angle_deg = 0.0;
  FootholdRecord foothold;
  double commanded_turn_deg = 0.0;
  Pose2D pose_after{};
};

struct TrajectoryLog {
  InitRecord init;
  std::vector<StepRecord> steps;
  std::string end_reason;  // completed | fall | search_exhausted
  std::int64_t total_taps = 0;
  int arcs_collected = 0;
};

struct ControllerState {
  Pose2D pose{};
  GPModel model;
  ReferenceTap reference;
  double expected_edge_deg = 0.0;  // edge hip angle under perfect walking
  Rng rng{0};
  std::int64_t tap_count = 0;
  int arc_count = 0;
  int iteration = 0;
};

struct InitResult {
  ControllerState state;
  InitRecord record;
};

// Collects the startup arc, self-labels it against the selected reference,
// fits the model, plants the first foothold at edge + safe_offset and steps.
// Propagates NoTransition when the start pose missed the edge.
InitResult initialize(const RunContext& ctx, std::uint64_t seed);

// One main-loop iteration: predict-tap, correct-tap, tolerance check with
// optional retrain arc (and edge search when the arc misses the edge), safe
// placement, body realignment. Throws SearchExhausted.
StepRecord control_step(ControllerState& state, const RunContext& ctx);

struct SearchResult {
  double edge_angle_deg = 0.0;
  std::vector<ArcRecord> sweeps;
};

// Sweeps successively larger arcs about center_deg until the dissimilarity
// minimum to the reference is interior and informative; successful sweep taps
// join the model. Throws SearchExhausted after max_sweeps.
SearchResult search_edge(ControllerState& state, const RunContext& ctx, double center_deg);

// Full experiment: initialize then control_step until max_iterations, a fall,
// or an exhausted search.
TrajectoryLog run(const RunContext& ctx, std::uint64_t seed);

}  // namespace tacfoot
