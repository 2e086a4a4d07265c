#include "tacfoot/controller.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "tacfoot/errors.hpp"

namespace tacfoot {

void validate(const ControllerConfig& config) {
  if (config.tolerance_deg <= 0.0) throw Error("tolerance must be positive");
  if (config.max_iterations < 1) throw Error("max_iterations must be >= 1");
  validate(config.arc);
  if (config.search.max_sweeps < 1) throw Error("search.max_sweeps must be >= 1");
  if (config.search.extent_growth <= 1.0) throw Error("search.extent_growth must exceed 1");
}

namespace {

TapFrame observe(ControllerState& state, const RunContext& ctx, double hip_deg) {
  const Vec2 commanded = foot_position(state.pose, ctx.robot, hip_deg);
  const Vec2 actual = apply_actuation_noise(commanded, ctx.robot, state.rng);
  TapFrame frame = simulate_tap(ctx.layout, ctx.sensor, ctx.terrain, actual,
                                state.pose.heading_deg + hip_deg, state.rng);
  frame.meta.hip_angle_deg = hip_deg;
  frame.meta.timestamp = ++state.tap_count;
  if (ctx.ctrl.use_image_pipeline)
    frame = through_image(frame, ctx.layout, ctx.detection, ctx.camera, state.rng);
  return frame;
}

TapObservation observe_and_predict(ControllerState& state, const RunContext& ctx, double hip_deg) {
  TapObservation obs;
  obs.hip_deg = hip_deg;
  obs.frame = observe(state, ctx, hip_deg);
  if (ctx.ctrl.disable_sensing) {
    obs.pred_deg = 0.0;
    obs.std_deg = 0.0;
  } else if (ctx.predictor_override) {
    obs.pred_deg = ctx.predictor_override(state.pose, hip_deg, obs.frame);
    obs.std_deg = 0.0;
  } else {
    const Prediction p = state.model.predict(feature_from_frame(obs.frame));
    obs.pred_deg = p.mean_deg;
    obs.std_deg = p.std_deg;
  }
  return obs;
}

ArcRecord collect_arc(ControllerState& state, const RunContext& ctx, double center_deg,
                      double half_extent_deg, int num_taps) {
  ArcSpec spec{center_deg, half_extent_deg, num_taps};
  ArcRecord rec;
  rec.id = state.arc_count++;
  rec.center_deg = center_deg;
  rec.half_extent_deg = half_extent_deg;
  for (const auto& [angle, _] : arc_points(state.pose, ctx.robot, spec)) {
    TapFrame frame = observe(state, ctx, angle);
    rec.hip_angles_deg.push_back(angle);
    rec.frames.push_back(std::move(frame));
  }
  return rec;
}

struct ArcEvaluation {
  AlignResult align;
  bool usable = false;
};

// Aligns an arc to the reference and decides whether its labels can be
// trusted: interior minimum, a real dissimilarity transition, and contact at
// the matched tap. The minimum is restricted to transitional frames (mean
// deflection away from both saturation levels): saturated patterns barely
// change under the leg rotation of a wide sweep, so they can undercut the
// true edge match when the sweep's orientations differ from the reference's.
ArcEvaluation evaluate_arc(ArcRecord& rec, const ControllerState& state, const RunContext& ctx) {
  const int n = static_cast<int>(rec.frames.size());
  std::vector<FeatureVector> features;
  features.reserve(n);
  for (const TapFrame& f : rec.frames) features.push_back(feature_from_frame(f));

  std::vector<double> mean_deflection(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double sum = 0.0;
    for (int i = 0; i < ctx.layout.count(); ++i)
      sum += (rec.frames[k].pins[i] - ctx.layout.rest[i]).norm();
    mean_deflection[k] = sum / ctx.layout.count();
  }
  const auto [mn_m, mx_m] = std::minmax_element(mean_deflection.begin(), mean_deflection.end());
  const double band = *mx_m - *mn_m;
  std::vector<bool> transitional(n, false);
  int n_candidates = 0;
  for (int k = 0; k < n; ++k) {
    transitional[k] = mean_deflection[k] > *mn_m + 0.2 * band &&
                      mean_deflection[k] < *mx_m - 0.2 * band;
    if (transitional[k]) ++n_candidates;
  }

  ArcEvaluation eval;
  if (n_candidates >= 3) {
    eval.align = align_arc(rec.hip_angles_deg, features, state.reference, transitional);
  } else {
    eval.align = align_arc(rec.hip_angles_deg, features, state.reference);
  }
  rec.dissimilarities = eval.align.dissimilarities;
  rec.boundary = eval.align.boundary;
  rec.labels_deg.clear();
  for (const LabeledTap& t : eval.align.taps) rec.labels_deg.push_back(t.label_deg);

  const auto [mn, mx] =
      std::minmax_element(rec.dissimilarities.begin(), rec.dissimilarities.end());
  const bool informative = (*mx - *mn) >= ctx.ctrl.dissim_range_floor;
  eval.usable = n_candidates >= 3 && !eval.align.boundary && informative &&
                rec.frames[eval.align.argmin_index].contact;
  return eval;
}

FootholdRecord plant_foot(ControllerState& state, const RunContext& ctx, double hip_deg) {
  FootholdRecord fh;
  fh.hip_deg = hip_deg;
  const Vec2 commanded = foot_position(state.pose, ctx.robot, hip_deg);
  fh.point = apply_actuation_noise(commanded, ctx.robot, state.rng);
  fh.signed_edge_mm = signed_edge_distance(ctx.terrain, fh.point);
  fh.supported = is_supported(ctx.terrain, fh.point);
  return fh;
}

}  // namespace

InitResult initialize(const RunContext& ctx, std::uint64_t seed) {
  validate(ctx.ctrl);
  validate(ctx.robot);
  validate(ctx.terrain);
  validate(ctx.layout, ctx.sensor);

  InitResult res{ControllerState{}, InitRecord{}};
  ControllerState& state = res.state;
  InitRecord& rec = res.record;

  state.pose = normalized(ctx.start_pose);
  state.rng = Rng(seed);
  rec.pose_before = state.pose;
  rec.sensing_disabled = ctx.ctrl.disable_sensing;

  double edge_deg;
  if (ctx.ctrl.disable_sensing) {
    // No model: walk straight, assuming the edge sits where a tracked run
    // would leave it.
    edge_deg = -ctx.ctrl.safe_offset_deg;
  } else {
    rec.arc = collect_arc(state, ctx, ctx.ctrl.arc.center_deg, ctx.ctrl.arc.half_extent_deg,
                          ctx.ctrl.arc.num_taps);

    std::optional<int> override_index;
    if (ctx.ctrl.reference_override >= 0) override_index = ctx.ctrl.reference_override;
    ReferenceSelection sel =
        select_reference(rec.arc.hip_angles_deg, rec.arc.frames, ctx.layout, override_index);
    sel.reference.arc_id = rec.arc.id;
    state.reference = sel.reference;
    rec.reference_index = sel.index;

    ArcEvaluation eval = evaluate_arc(rec.arc, state, ctx);
    state.model = GPModel(ctx.gp).updated(eval.align.taps);
    rec.arc.used_for_training = true;
    edge_deg = eval.align.edge_angle_deg;
  }

  rec.edge_angle_deg = edge_deg;
  rec.foothold = plant_foot(state, ctx, edge_deg + ctx.ctrl.safe_offset_deg);

  const TurnOutcome turn = turn_and_step(state.pose, ctx.robot, rec.foothold.point, state.rng);
  state.pose = turn.pose;
  rec.commanded_turn_deg = turn.commanded_turn_deg;
  rec.pose_after = state.pose;
  state.expected_edge_deg = edge_deg - turn.commanded_turn_deg;
  return res;
}

StepRecord control_step(ControllerState& state, const RunContext& ctx) {
  StepRecord rec;
  rec.iteration = ++state.iteration;
  rec.pose_before = state.pose;

  rec.tap1 = observe_and_predict(state, ctx, state.expected_edge_deg);
  const double corrected_deg = rec.tap1.hip_deg - rec.tap1.pred_deg;
  rec.tap2 = observe_and_predict(state, ctx, corrected_deg);

  rec.retrained = retrain_required(rec.tap2.pred_deg, ctx.ctrl.tolerance_deg);

  if (rec.retrained && !ctx.ctrl.disable_sensing && !ctx.predictor_override) {
    ArcRecord arc = collect_arc(state, ctx, rec.tap2.hip_deg, ctx.ctrl.arc.half_extent_deg,
                                ctx.ctrl.arc.num_taps);
    ArcEvaluation eval = evaluate_arc(arc, state, ctx);
    if (eval.usable) {
      state.model = state.model.updated(eval.align.taps);
      arc.used_for_training = true;
      rec.edge_angle_deg = eval.align.edge_angle_deg;
      rec.arcs.push_back(std::move(arc));
    } else {
      // Edge lost: the fresh arc missed it, grow the search.
      rec.arcs.push_back(std::move(arc));
      SearchResult search = search_edge(state, ctx, rec.tap2.hip_deg);
      rec.search_used = true;
      rec.edge_angle_deg = search.edge_angle_deg;
      for (ArcRecord& sweep : search.sweeps) rec.arcs.push_back(std::move(sweep));
    }
  } else {
    rec.edge_angle_deg = rec.tap2.hip_deg - rec.tap2.pred_deg;
  }

  rec.foothold = plant_foot(state, ctx, rec.edge_angle_deg + ctx.ctrl.safe_offset_deg);

  const TurnOutcome turn = turn_and_step(state.pose, ctx.robot, rec.foothold.point, state.rng);
  state.pose = turn.pose;
  rec.commanded_turn_deg = turn.commanded_turn_deg;
  rec.slipped = turn.slipped;
  rec.pose_after = state.pose;
  state.expected_edge_deg = rec.edge_angle_deg - turn.commanded_turn_deg;
  return rec;
}

SearchResult search_edge(ControllerState& state, const RunContext& ctx, double center_deg) {
  SearchResult res;
  const double base_spacing = ctx.ctrl.arc.spacing_deg();
  for (int sweep = 0; sweep < ctx.ctrl.search.max_sweeps; ++sweep) {
    const double extent =
        ctx.ctrl.arc.half_extent_deg * std::pow(ctx.ctrl.search.extent_growth, sweep);
    int num = 2 * static_cast<int>(std::lround(extent / base_spacing)) + 1;
    if (num < 3) num = 3;

    ArcRecord arc = collect_arc(state, ctx, center_deg, extent, num);
    ArcEvaluation eval = evaluate_arc(arc, state, ctx);
    if (eval.usable) {
      state.model = state.model.updated(eval.align.taps);
      arc.used_for_training = true;
      res.edge_angle_deg = eval.align.edge_angle_deg;
      res.sweeps.push_back(std::move(arc));
      return res;
    }
    res.sweeps.push_back(std::move(arc));
  }
  throw SearchExhausted("edge not found within " + std::to_string(ctx.ctrl.search.max_sweeps) +
                        " sweeps about " + std::to_string(center_deg) + " deg");
}

TrajectoryLog run(const RunContext& ctx, std::uint64_t seed) {
  TrajectoryLog log;
  InitResult init = initialize(ctx, seed);
  log.init = init.record;
  ControllerState& state = init.state;

  if (!log.init.foothold.supported) {
    log.end_reason = "fall";
  } else {
    log.end_reason = "completed";
    for (int it = 0; it < ctx.ctrl.max_iterations; ++it) {
      try {
        StepRecord step = control_step(state, ctx);
        const bool ok = step.foothold.supported;
        log.steps.push_back(std::move(step));
        if (!ok) {
          log.end_reason = "fall";
          break;
        }
      } catch (const SearchExhausted&) {
        log.end_reason = "search_exhausted";
        break;
      } catch (const TrackingLost&) {
        log.end_reason = "tracking_lost";
        break;
      }
    }
  }

  log.total_taps = state.tap_count;
  log.arcs_collected = state.arc_count;
  return log;
}

}  // namespace tacfoot
