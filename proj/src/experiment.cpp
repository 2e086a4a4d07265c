#include "tacfoot/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "tacfoot/errors.hpp"

namespace tacfoot {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// defaults

ExperimentConfig beam_defaults() {
  ExperimentConfig cfg;
  cfg.terrain_kind = "beam";
  cfg.ctx.terrain = BeamTerrain{};
  cfg.ctx.start_pose = {-100.0, -14.0, 0.0};
  cfg.ctx.detection.gate_px = 48.0;  // tap frames are matched against rest positions
  cfg.seeds.resize(10);
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = i + 1;
  return cfg;
}

ExperimentConfig table_defaults() {
  ExperimentConfig cfg = beam_defaults();
  cfg.terrain_kind = "table";
  TableTerrain table;
  cfg.ctx.terrain = table;
  // Neutral foot on the rim at bearing 0, heading tangent (anti-clockwise).
  cfg.ctx.start_pose = {table.radius_mm, -cfg.ctx.robot.hip_radius_mm, 90.0};
  cfg.ctx.ctrl.max_iterations = 60;
  cfg.ctx.ctrl.search.max_sweeps = 4;
  cfg.ctx.robot.turn_slip = TurnSlipModel{3.0, 0.12, 18.0, 30.0};
  return cfg;
}

// ---------------------------------------------------------------------------
// config json

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
  throw ConfigError(path, why);
}

double req_num(const json& j, const std::string& section, const char* key) {
  if (!j.contains(key)) bad_field(section + "." + key, "missing required field");
  if (!j.at(key).is_number()) bad_field(section + "." + key, "must be a number");
  return j.at(key).get<double>();
}

void opt_num(const json& j, const std::string& section, const char* key, double& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number()) bad_field(section + "." + key, "must be a number");
  out = j.at(key).get<double>();
}

void opt_int(const json& j, const std::string& section, const char* key, int& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) bad_field(section + "." + key, "must be an integer");
  out = j.at(key).get<int>();
}

void opt_bool(const json& j, const std::string& section, const char* key, bool& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_boolean()) bad_field(section + "." + key, "must be a boolean");
  out = j.at(key).get<bool>();
}

Vec2 vec2_from(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad_field(path, "must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

void parse_terrain(const json& jt, ExperimentConfig& cfg) {
  if (!jt.contains("type")) bad_field("terrain.type", "missing required field");
  const std::string type = jt.at("type").get<std::string>();
  if (type == "beam") {
    BeamTerrain beam;
    if (const auto* prev = std::get_if<BeamTerrain>(&cfg.ctx.terrain)) beam = *prev;
    if (jt.contains("origin_mm")) beam.origin = vec2_from(jt["origin_mm"], "terrain.origin_mm");
    if (jt.contains("direction")) {
      beam.direction = vec2_from(jt["direction"], "terrain.direction");
      const double n = beam.direction.norm();
      if (n < 1e-12) bad_field("terrain.direction", "must be nonzero");
      beam.direction = beam.direction / n;
    }
    opt_num(jt, "terrain", "length_mm", beam.length_mm);
    opt_num(jt, "terrain", "width_mm", beam.width_mm);
    if (jt.contains("height_profile")) {
      beam.height_profile.clear();
      for (const auto& pt : jt["height_profile"]) {
        const Vec2 v = vec2_from(pt, "terrain.height_profile");
        beam.height_profile.emplace_back(v.x, v.y);
      }
    }
    cfg.ctx.terrain = beam;
    cfg.terrain_kind = "beam";
  } else if (type == "table") {
    TableTerrain table;
    if (const auto* prev = std::get_if<TableTerrain>(&cfg.ctx.terrain)) table = *prev;
    if (jt.contains("center_mm")) table.center = vec2_from(jt["center_mm"], "terrain.center_mm");
    opt_num(jt, "terrain", "radius_mm", table.radius_mm);
    if (jt.contains("active_arc_deg")) {
      const Vec2 v = vec2_from(jt["active_arc_deg"], "terrain.active_arc_deg");
      table.active_arc_begin_deg = v.x;
      table.active_arc_end_deg = v.y;
    }
    cfg.ctx.terrain = table;
    cfg.terrain_kind = "table";
  } else {
    bad_field("terrain.type", "must be \"beam\" or \"table\"");
  }
}

void parse_robot(const json& jr, RobotParams& robot) {
  opt_num(jr, "robot", "hip_radius_mm", robot.hip_radius_mm);
  opt_num(jr, "robot", "foot_spacing_mm", robot.foot_spacing_mm);
  opt_num(jr, "robot", "placement_noise_sigma_mm", robot.placement_noise_sigma_mm);
  opt_num(jr, "robot", "heading_drift_sigma_deg", robot.heading_drift_sigma_deg);
  opt_num(jr, "robot", "step_length_mm", robot.step_length_mm);
  if (jr.contains("turn_slip")) {
    const json& js = jr["turn_slip"];
    opt_num(js, "robot.turn_slip", "threshold_deg", robot.turn_slip.threshold_deg);
    opt_num(js, "robot.turn_slip", "probability", robot.turn_slip.probability);
    opt_num(js, "robot.turn_slip", "min_deg", robot.turn_slip.min_deg);
    opt_num(js, "robot.turn_slip", "max_deg", robot.turn_slip.max_deg);
  }
}

void parse_sensor(const json& js, SensorParams& sensor) {
  opt_num(js, "sensor", "tip_radius_mm", sensor.tip_radius_mm);
  opt_num(js, "sensor", "indent_depth_mm", sensor.indent_depth_mm);
  opt_num(js, "sensor", "deflection_gain", sensor.deflection_gain);
  opt_num(js, "sensor", "edge_decay_length_mm", sensor.edge_decay_length_mm);
  opt_num(js, "sensor", "shear_gain", sensor.shear_gain);
  opt_num(js, "sensor", "pin_noise_sigma_mm", sensor.pin_noise_sigma_mm);
  opt_num(js, "sensor", "height_indent_scale", sensor.height_indent_scale);
}

void parse_detection(const json& jd, DetectionParams& det, CameraScale& cam) {
  opt_int(jd, "detection", "threshold", det.threshold);
  opt_int(jd, "detection", "min_area_px", det.min_area_px);
  opt_int(jd, "detection", "max_area_px", det.max_area_px);
  opt_num(jd, "detection", "ambient_level", det.ambient_level);
  opt_num(jd, "detection", "pin_brightness", det.pin_brightness);
  opt_num(jd, "detection", "pixel_noise_sigma", det.pixel_noise_sigma);
  opt_num(jd, "detection", "gate_px", det.gate_px);
  opt_num(jd, "detection", "mm_to_px", cam.mm_to_px);
}

void parse_controller(const json& jc, ControllerConfig& ctrl) {
  ctrl.tolerance_deg = req_num(jc, "controller", "tolerance_deg");
  ctrl.safe_offset_deg = req_num(jc, "controller", "safe_offset_deg");
  if (!jc.contains("max_iterations"))
    bad_field("controller.max_iterations", "missing required field");
  opt_int(jc, "controller", "max_iterations", ctrl.max_iterations);
  if (jc.contains("arc")) {
    const json& ja = jc["arc"];
    opt_num(ja, "controller.arc", "center_deg", ctrl.arc.center_deg);
    opt_num(ja, "controller.arc", "half_extent_deg", ctrl.arc.half_extent_deg);
    opt_int(ja, "controller.arc", "num_taps", ctrl.arc.num_taps);
  }
  if (jc.contains("search")) {
    const json& js = jc["search"];
    opt_int(js, "controller.search", "max_sweeps", ctrl.search.max_sweeps);
    opt_num(js, "controller.search", "extent_growth", ctrl.search.extent_growth);
  }
  opt_num(jc, "controller", "dissim_range_floor", ctrl.dissim_range_floor);
  opt_int(jc, "controller", "reference_override", ctrl.reference_override);
}

void parse_experiment(const json& je, ExperimentConfig& cfg) {
  if (je.contains("seeds")) {
    if (!je["seeds"].is_array() || je["seeds"].empty())
      bad_field("experiment.seeds", "must be a non-empty array");
    cfg.seeds.clear();
    for (const auto& s : je["seeds"]) {
      if (!s.is_number_unsigned() && !s.is_number_integer())
        bad_field("experiment.seeds", "seeds must be integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (je.contains("out_dir")) cfg.out_dir = je["out_dir"].get<std::string>();
  opt_bool(je, "experiment", "disable_sensing", cfg.ctx.ctrl.disable_sensing);
  opt_bool(je, "experiment", "use_image_pipeline", cfg.ctx.ctrl.use_image_pipeline);
  if (je.contains("start_pose")) {
    const json& jp = je["start_pose"];
    opt_num(jp, "experiment.start_pose", "x_mm", cfg.ctx.start_pose.x_mm);
    opt_num(jp, "experiment.start_pose", "y_mm", cfg.ctx.start_pose.y_mm);
    opt_num(jp, "experiment.start_pose", "heading_deg", cfg.ctx.start_pose.heading_deg);
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("(root)", "config must be a JSON object");

  std::string kind = "beam";
  if (j.contains("terrain") && j["terrain"].contains("type") && j["terrain"]["type"].is_string())
    kind = j["terrain"]["type"].get<std::string>();
  ExperimentConfig cfg = (kind == "table") ? table_defaults() : beam_defaults();

  try {
    if (j.contains("terrain")) parse_terrain(j["terrain"], cfg);
    if (j.contains("robot")) parse_robot(j["robot"], cfg.ctx.robot);
    if (j.contains("sensor")) parse_sensor(j["sensor"], cfg.ctx.sensor);
    if (j.contains("detection")) parse_detection(j["detection"], cfg.ctx.detection, cfg.ctx.camera);
    if (j.contains("controller")) parse_controller(j["controller"], cfg.ctx.ctrl);
    if (j.contains("gp")) {
      opt_num(j["gp"], "gp", "noise_var_floor", cfg.ctx.gp.noise_var_floor);
      opt_num(j["gp"], "gp", "lengthscale", cfg.ctx.gp.lengthscale);
      opt_num(j["gp"], "gp", "signal_var", cfg.ctx.gp.signal_var);
    }
    if (j.contains("experiment")) parse_experiment(j["experiment"], cfg);
  } catch (const json::exception& e) {
    throw ConfigError("(parse)", e.what());
  }

  if (cfg.seeds.empty()) throw ConfigError("experiment.seeds", "at least one seed required");
  try {
    validate(cfg.ctx.ctrl);
    validate(cfg.ctx.robot);
    validate(cfg.ctx.terrain);
    validate(cfg.ctx.layout, cfg.ctx.sensor);
    validate(cfg.ctx.detection);
  } catch (const Error& e) {
    throw ConfigError("(validate)", e.what());
  }
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (const auto* beam = std::get_if<BeamTerrain>(&cfg.ctx.terrain)) {
    json profile = json::array();
    for (const auto& [ax, h] : beam->height_profile) profile.push_back({ax, h});
    j["terrain"] = {{"type", "beam"},
                    {"origin_mm", {beam->origin.x, beam->origin.y}},
                    {"direction", {beam->direction.x, beam->direction.y}},
                    {"length_mm", beam->length_mm},
                    {"width_mm", beam->width_mm},
                    {"height_profile", profile}};
  } else {
    const auto& table = std::get<TableTerrain>(cfg.ctx.terrain);
    j["terrain"] = {{"type", "table"},
                    {"center_mm", {table.center.x, table.center.y}},
                    {"radius_mm", table.radius_mm},
                    {"active_arc_deg", {table.active_arc_begin_deg, table.active_arc_end_deg}}};
  }
  const RobotParams& r = cfg.ctx.robot;
  j["robot"] = {{"hip_radius_mm", r.hip_radius_mm},
                {"foot_spacing_mm", r.foot_spacing_mm},
                {"placement_noise_sigma_mm", r.placement_noise_sigma_mm},
                {"heading_drift_sigma_deg", r.heading_drift_sigma_deg},
                {"step_length_mm", r.step_length_mm},
                {"turn_slip",
                 {{"threshold_deg", r.turn_slip.threshold_deg},
                  {"probability", r.turn_slip.probability},
                  {"min_deg", r.turn_slip.min_deg},
                  {"max_deg", r.turn_slip.max_deg}}}};
  const SensorParams& s = cfg.ctx.sensor;
  j["sensor"] = {{"tip_radius_mm", s.tip_radius_mm},
                 {"indent_depth_mm", s.indent_depth_mm},
                 {"deflection_gain", s.deflection_gain},
                 {"edge_decay_length_mm", s.edge_decay_length_mm},
                 {"shear_gain", s.shear_gain},
                 {"pin_noise_sigma_mm", s.pin_noise_sigma_mm},
                 {"height_indent_scale", s.height_indent_scale}};
  const DetectionParams& d = cfg.ctx.detection;
  j["detection"] = {{"threshold", d.threshold},
                    {"min_area_px", d.min_area_px},
                    {"max_area_px", d.max_area_px},
                    {"ambient_level", d.ambient_level},
                    {"pin_brightness", d.pin_brightness},
                    {"pixel_noise_sigma", d.pixel_noise_sigma},
                    {"gate_px", d.gate_px},
                    {"mm_to_px", cfg.ctx.camera.mm_to_px}};
  const ControllerConfig& c = cfg.ctx.ctrl;
  j["controller"] = {
      {"tolerance_deg", c.tolerance_deg},
      {"safe_offset_deg", c.safe_offset_deg},
      {"max_iterations", c.max_iterations},
      {"arc",
       {{"center_deg", c.arc.center_deg},
        {"half_extent_deg", c.arc.half_extent_deg},
        {"num_taps", c.arc.num_taps}}},
      {"search", {{"max_sweeps", c.search.max_sweeps}, {"extent_growth", c.search.extent_growth}}},
      {"dissim_range_floor", c.dissim_range_floor},
      {"reference_override", c.reference_override}};
  j["gp"] = {{"noise_var_floor", cfg.ctx.gp.noise_var_floor},
             {"lengthscale", cfg.ctx.gp.lengthscale},
             {"signal_var", cfg.ctx.gp.signal_var}};
  json seeds = json::array();
  for (std::uint64_t s2 : cfg.seeds) seeds.push_back(s2);
  j["experiment"] = {{"seeds", seeds},
                     {"out_dir", cfg.out_dir},
                     {"disable_sensing", c.disable_sensing},
                     {"use_image_pipeline", c.use_image_pipeline},
                     {"start_pose",
                      {{"x_mm", cfg.ctx.start_pose.x_mm},
                       {"y_mm", cfg.ctx.start_pose.y_mm},
                       {"heading_deg", cfg.ctx.start_pose.heading_deg}}}};
  return j;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("(file)", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// log serialization

namespace {

json pose_json(const Pose2D& p) {
  return {{"x_mm", p.x_mm}, {"y_mm", p.y_mm}, {"heading_deg", p.heading_deg}};
}

json frame_json(const TapFrame& f) {
  json pins = json::array();
  for (const Vec2& p : f.pins) pins.push_back({p.x, p.y});
  return {{"pins", pins},
          {"contact", f.contact},
          {"meta",
           {{"hip_deg", f.meta.hip_angle_deg},
            {"orientation_deg", f.meta.orientation_deg},
            {"world", {f.meta.world.x, f.meta.world.y}},
            {"t", f.meta.timestamp}}}};
}

json tap_json(const TapObservation& t) {
  return {{"hip_deg", t.hip_deg},
          {"pred_deg", t.pred_deg},
          {"std_deg", t.std_deg},
          {"frame", frame_json(t.frame)}};
}

json arc_json(const ArcRecord& a) {
  json frames = json::array();
  for (const TapFrame& f : a.frames) frames.push_back(frame_json(f));
  return {{"id", a.id},
          {"center_deg", a.center_deg},
          {"half_extent_deg", a.half_extent_deg},
          {"hip_angles_deg", a.hip_angles_deg},
          {"frames", frames},
          {"dissimilarities", a.dissimilarities},
          {"labels_deg", a.labels_deg},
          {"boundary", a.boundary},
          {"used_for_training", a.used_for_training}};
}

json foothold_json(const FootholdRecord& f) {
  return {{"x_mm", f.point.x},
          {"y_mm", f.point.y},
          {"hip_deg", f.hip_deg},
          {"signed_edge_mm", f.signed_edge_mm},
          {"supported", f.supported}};
}

}  // namespace

std::vector<std::string> log_to_jsonl(const TrajectoryLog& log, std::uint64_t seed,
                                      const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.reserve(log.steps.size() + 3);

  json header = {{"type", "header"}, {"seed", seed}, {"config", config_to_json(cfg)}};
  lines.push_back(header.dump());

  json init = {{"type", "init"},
               {"pose_before", pose_json(log.init.pose_before)},
               {"sensing_disabled", log.init.sensing_disabled},
               {"reference_index", log.init.reference_index},
               {"edge_angle_deg", log.init.edge_angle_deg},
               {"foothold", foothold_json(log.init.foothold)},
               {"commanded_turn_deg", log.init.commanded_turn_deg},
               {"pose_after", pose_json(log.init.pose_after)}};
  if (!log.init.sensing_disabled) init["arc"] = arc_json(log.init.arc);
  lines.push_back(init.dump());

  for (const StepRecord& s : log.steps) {
    json arcs = json::array();
    for (const ArcRecord& a : s.arcs) arcs.push_back(arc_json(a));
    json step = {{"type", "step"},
                 {"iteration", s.iteration},
                 {"pose_before", pose_json(s.pose_before)},
                 {"tap1", tap_json(s.tap1)},
                 {"tap2", tap_json(s.tap2)},
                 {"retrained", s.retrained},
                 {"arcs", arcs},
                 {"search_used", s.search_used},
                 {"edge_angle_deg", s.edge_angle_deg},
                 {"foothold", foothold_json(s.foothold)},
                 {"commanded_turn_deg", s.commanded_turn_deg},
                 {"slipped", s.slipped},
                 {"pose_after", pose_json(s.pose_after)}};
    lines.push_back(step.dump());
  }

  json end = {{"type", "end"},
              {"reason", log.end_reason},
              {"iterations", static_cast<int>(log.steps.size())},
              {"total_taps", log.total_taps},
              {"arcs_collected", log.arcs_collected}};
  lines.push_back(end.dump());
  return lines;
}

// ---------------------------------------------------------------------------
// metrics

namespace {

struct ParsedLog {
  std::uint64_t seed = 0;
  ExperimentConfig cfg;
  json init;
  std::vector<json> steps;
  json end;
};

ParsedLog parse_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  ParsedLog out;
  std::string line;
  int line_no = 0;
  bool have_header = false, have_end = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        out.seed = j.at("seed").get<std::uint64_t>();
        out.cfg = config_from_json(j.at("config"));
        have_header = true;
      } else if (type == "init") {
        out.init = std::move(j);
      } else if (type == "step") {
        out.steps.push_back(std::move(j));
      } else if (type == "end") {
        out.end = std::move(j);
        have_end = true;
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (line_no == 0) throw ParseError(1, "empty log: " + path);
  if (!have_header || out.init.is_null() || !have_end)
    throw ParseError(line_no, "incomplete log: " + path);
  return out;
}

double displacement_target_mm(const ExperimentConfig& cfg) {
  if (const auto* beam = std::get_if<BeamTerrain>(&cfg.ctx.terrain))
    return 0.5 * beam->width_mm;  // beam center
  // table: safe offset converted to distance inside the rim
  return cfg.ctx.robot.hip_radius_mm * std::sin(deg_to_rad(cfg.ctx.ctrl.safe_offset_deg));
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RunMetrics metrics_from_parsed(const ParsedLog& log) {
  RunMetrics m;
  m.seed = log.seed;
  m.end_reason = log.end.at("reason").get<std::string>();
  m.completed = m.end_reason == "completed";
  m.total_taps = log.end.at("total_taps").get<std::int64_t>();
  m.arcs_collected = log.end.at("arcs_collected").get<int>();

  const double target = displacement_target_mm(log.cfg);
  std::vector<Vec2> points;
  auto add_foothold = [&](const json& fh) {
    m.signed_edge_mm.push_back(fh.at("signed_edge_mm").get<double>());
    points.push_back({fh.at("x_mm").get<double>(), fh.at("y_mm").get<double>()});
  };
  add_foothold(log.init.at("foothold"));
  for (const json& s : log.steps) {
    add_foothold(s.at("foothold"));
    if (s.at("search_used").get<bool>()) m.search_used = true;
  }
  m.footholds = static_cast<int>(m.signed_edge_mm.size());

  double sum = 0.0, mx = 0.0;
  for (double se : m.signed_edge_mm) {
    const double d = std::abs(se - target);
    sum += d;
    mx = std::max(mx, d);
  }
  m.mean_abs_displacement_mm = sum / m.footholds;
  m.max_abs_displacement_mm = mx;

  if (const auto* table = std::get_if<TableTerrain>(&log.cfg.ctx.terrain)) {
    double prev = 0.0, total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Vec2 r = points[i] - table->center;
      const double bearing = rad_to_deg(std::atan2(r.y, r.x));
      if (i > 0) total += wrap_deg(bearing - prev);
      prev = bearing;
    }
    m.coverage_deg = std::abs(total);
  }
  return m;
}

}  // namespace

MetricsReport compute_metrics(const std::vector<std::string>& log_paths) {
  MetricsReport report;
  for (const std::string& path : log_paths)
    report.runs.push_back(metrics_from_parsed(parse_log_file(path)));

  int completed = 0;
  double disp_sum = 0.0;
  std::vector<double> taps, arcs;
  for (const RunMetrics& r : report.runs) {
    if (!r.completed) continue;
    ++completed;
    disp_sum += r.mean_abs_displacement_mm;
    report.max_abs_displacement_mm =
        std::max(report.max_abs_displacement_mm, r.max_abs_displacement_mm);
    taps.push_back(static_cast<double>(r.total_taps));
    arcs.push_back(static_cast<double>(r.arcs_collected));
  }
  report.success_rate = report.runs.empty()
                            ? 0.0
                            : static_cast<double>(completed) / static_cast<double>(report.runs.size());
  if (completed > 0) report.mean_abs_displacement_mm = disp_sum / completed;
  report.median_total_taps = median(taps);
  report.median_arcs_collected = median(arcs);
  return report;
}

json metrics_to_json(const MetricsReport& report) {
  json runs = json::array();
  for (const RunMetrics& r : report.runs) {
    runs.push_back({{"seed", r.seed},
                    {"completed", r.completed},
                    {"end_reason", r.end_reason},
                    {"footholds", r.footholds},
                    {"mean_abs_displacement_mm", r.mean_abs_displacement_mm},
                    {"max_abs_displacement_mm", r.max_abs_displacement_mm},
                    {"total_taps", r.total_taps},
                    {"arcs_collected", r.arcs_collected},
                    {"search_used", r.search_used},
                    {"coverage_deg", r.coverage_deg}});
  }
  return {{"runs", runs},
          {"aggregate",
           {{"success_rate", report.success_rate},
            {"mean_abs_displacement_mm", report.mean_abs_displacement_mm},
            {"max_abs_displacement_mm", report.max_abs_displacement_mm},
            {"median_total_taps", report.median_total_taps},
            {"median_arcs_collected", report.median_arcs_collected}}}};
}

// ---------------------------------------------------------------------------
// plot data + experiment driver

namespace {

std::string fmt_num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const std::string& l : lines) out << l << '\n';
}

std::vector<std::string> trajectory_csv(const ParsedLog& log) {
  std::vector<std::string> rows{"iter,role,x_mm,y_mm"};
  auto world = [](const json& frame) {
    const auto& w = frame.at("meta").at("world");
    return std::pair<double, double>(w[0].get<double>(), w[1].get<double>());
  };
  auto add = [&](int iter, const char* role, double x, double y) {
    rows.push_back(std::to_string(iter) + "," + role + "," + fmt_num(x) + "," + fmt_num(y));
  };
  if (log.init.contains("arc")) {
    for (const json& f : log.init.at("arc").at("frames")) {
      const auto [x, y] = world(f);
      add(0, "arc_tap", x, y);
    }
  }
  add(0, "foothold", log.init.at("foothold").at("x_mm").get<double>(),
      log.init.at("foothold").at("y_mm").get<double>());
  for (const json& s : log.steps) {
    const int it = s.at("iteration").get<int>();
    for (const char* tap : {"tap1", "tap2"}) {
      const auto [x, y] = world(s.at(tap).at("frame"));
      add(it, tap, x, y);
    }
    const auto& arcs = s.at("arcs");
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      const bool sweep = s.at("search_used").get<bool>() && a > 0;
      for (const json& f : arcs[a].at("frames")) {
        const auto [x, y] = world(f);
        add(it, sweep ? "search_tap" : "arc_tap", x, y);
      }
    }
    add(it, "foothold", s.at("foothold").at("x_mm").get<double>(),
        s.at("foothold").at("y_mm").get<double>());
  }
  return rows;
}

std::vector<std::string> displacement_csv(const ParsedLog& log) {
  const double target = displacement_target_mm(log.cfg);
  double lower = -target, upper = target;
  if (const auto* beam = std::get_if<BeamTerrain>(&log.cfg.ctx.terrain)) {
    lower = -0.5 * beam->width_mm;
    upper = 0.5 * beam->width_mm;
  }
  std::vector<std::string> rows{"foothold_index,displacement_mm,lower_limit_mm,upper_limit_mm"};
  int idx = 0;
  auto add = [&](const json& fh) {
    const double d = fh.at("signed_edge_mm").get<double>() - target;
    rows.push_back(std::to_string(idx++) + "," + fmt_num(d) + "," + fmt_num(lower) + "," +
                   fmt_num(upper));
  };
  add(log.init.at("foothold"));
  for (const json& s : log.steps) add(s.at("foothold"));
  return rows;
}

std::vector<std::string> footholds_csv(const ParsedLog& log) {
  std::vector<std::string> rows{"iteration,x_mm,y_mm,signed_edge_mm,retrained"};
  auto add = [&](int iter, const json& fh, bool retrained) {
    rows.push_back(std::to_string(iter) + "," + fmt_num(fh.at("x_mm").get<double>()) + "," +
                   fmt_num(fh.at("y_mm").get<double>()) + "," +
                   fmt_num(fh.at("signed_edge_mm").get<double>()) + "," +
                   (retrained ? "true" : "false"));
  };
  add(0, log.init.at("foothold"), false);
  for (const json& s : log.steps)
    add(s.at("iteration").get<int>(), s.at("foothold"), s.at("retrained").get<bool>());
  return rows;
}

std::vector<std::string> dissimilarity_csv(const ParsedLog& log) {
  std::vector<std::string> rows{"arc_id,hip_angle_deg,dissimilarity_mm,label_deg"};
  auto add_arc = [&](const json& arc) {
    if (!arc.contains("dissimilarities") || arc.at("dissimilarities").empty()) return;
    const auto& angles = arc.at("hip_angles_deg");
    const auto& dis = arc.at("dissimilarities");
    const auto& labels = arc.at("labels_deg");
    const int id = arc.at("id").get<int>();
    for (std::size_t k = 0; k < angles.size(); ++k) {
      rows.push_back(std::to_string(id) + "," + fmt_num(angles[k].get<double>()) + "," +
                     fmt_num(dis[k].get<double>()) + "," + fmt_num(labels[k].get<double>()));
    }
  };
  if (log.init.contains("arc")) add_arc(log.init.at("arc"));
  for (const json& s : log.steps)
    for (const json& arc : s.at("arcs")) add_arc(arc);
  return rows;
}

}  // namespace

std::vector<std::string> emit_plot_data(const std::vector<std::string>& log_paths, PlotKind kind,
                                        const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (const std::string& path : log_paths) {
    const ParsedLog log = parse_log_file(path);
    std::vector<std::string> rows;
    std::string suffix;
    switch (kind) {
      case PlotKind::trajectory:
        rows = trajectory_csv(log);
        suffix = "_trajectory.csv";
        break;
      case PlotKind::displacement_bar:
        rows = displacement_csv(log);
        suffix = "_displacement.csv";
        break;
      case PlotKind::dissimilarity:
        rows = dissimilarity_csv(log);
        suffix = "_dissimilarity.csv";
        break;
    }
    const std::string out = (fs::path(out_dir) / (fs::path(path).stem().string() + suffix)).string();
    write_lines(out, rows);
    written.push_back(out);
  }
  return written;
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::vector<std::string> log_paths;
  for (std::uint64_t seed : cfg.seeds) {
    const TrajectoryLog log = run(cfg.ctx, seed);
    const std::string path =
        (fs::path(cfg.out_dir) / ("run_seed" + std::to_string(seed) + ".jsonl")).string();
    write_lines(path, log_to_jsonl(log, seed, cfg));
    log_paths.push_back(path);
    const std::string fh_path =
        (fs::path(cfg.out_dir) / ("footholds_seed" + std::to_string(seed) + ".csv")).string();
    write_lines(fh_path, footholds_csv(parse_log_file(path)));
  }

  MetricsReport report = compute_metrics(log_paths);
  emit_plot_data(log_paths, PlotKind::trajectory, cfg.out_dir);
  emit_plot_data(log_paths, PlotKind::displacement_bar, cfg.out_dir);
  emit_plot_data(log_paths, PlotKind::dissimilarity, cfg.out_dir);

  std::ofstream mout(fs::path(cfg.out_dir) / "metrics.json", std::ios::binary);
  mout << metrics_to_json(report).dump(2) << '\n';
  return report;
}

}  // namespace tacfoot
