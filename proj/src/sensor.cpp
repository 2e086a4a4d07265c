#include "tacfoot/sensor.hpp"

#include <algorithm>
#include <cmath>

#include "tacfoot/errors.hpp"

namespace tacfoot {

static PinLayout make_rings(double tip_radius_mm, const std::vector<int>& counts,
                            const std::vector<double>& radius_fractions) {
  PinLayout layout;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    const double radius = radius_fractions[r] * tip_radius_mm;
    const double phase = kPi / (2.0 * counts[r]);
    for (int i = 0; i < counts[r]; ++i) {
      const double a = phase + 2.0 * kPi * i / counts[r];
      layout.rest.push_back({radius * std::cos(a), radius * std::sin(a)});
      layout.ring.push_back(static_cast<int>(r));
    }
  }
  return layout;
}

PinLayout PinLayout::make_default(double tip_radius_mm) {
  return make_rings(tip_radius_mm, {6, 10, 14}, {0.34, 0.60, 0.84});
}

void validate(const PinLayout& layout, const SensorParams& params) {
  if (layout.count() < 6) throw Error("pin count must be >= 6");
  if (params.tip_radius_mm <= 0.0) throw Error("tip_radius must be positive");
  if (params.edge_decay_length_mm <= 0.0) throw Error("edge_decay_length must be positive");
  if (params.pin_noise_sigma_mm < 0.0) throw Error("pin_noise_sigma must be non-negative");
  for (const Vec2& p : layout.rest) {
    if (p.norm() > params.tip_radius_mm) throw Error("pin rest position outside tip radius");
  }
}

TapFrame simulate_tap(const PinLayout& layout, const SensorParams& params, const Terrain& terrain,
                      Vec2 foot_center, double orientation_deg, Rng& rng) {
  TapFrame frame;
  frame.meta.world = foot_center;
  frame.meta.orientation_deg = orientation_deg;
  frame.pins = layout.rest;

  const double s0 = signed_edge_distance(terrain, foot_center);
  frame.contact = s0 > -params.tip_radius_mm;

  if (frame.contact) {
    // A taller surface presses the hemisphere deeper, widening the contact
    // patch: every support query reads as if the edge sat farther away. This
    // is how height changes masquerade as edge displacement.
    const double effective_indent =
        params.indent_depth_mm + params.height_indent_scale * height_at(terrain, foot_center);
    auto contact_radius = [&](double depth) {
      return std::sqrt(std::max(0.0, depth * (2.0 * params.tip_radius_mm - depth)));
    };
    const double edge_shift =
        contact_radius(effective_indent) - contact_radius(params.indent_depth_mm);
    const double s0_eff = s0 + edge_shift;

    const double indent = params.indent_depth_mm;
    const double w_center =
        std::clamp(s0_eff / params.edge_decay_length_mm + 0.5, 0.0, 1.0);
    const double taper = smoothstep01((s0_eff + params.tip_radius_mm) / params.tip_radius_mm);
    const Vec2 support_dir_sensor = rotate_deg(edge_normal(terrain, foot_center), -orientation_deg);
    const Vec2 shear =
        (params.shear_gain * indent * (1.0 - w_center) * taper) * support_dir_sensor;

    for (int i = 0; i < layout.count(); ++i) {
      const Vec2 rest = layout.rest[i];
      const Vec2 world_pin = foot_center + rotate_deg(rest, orientation_deg);
      const double s = signed_edge_distance(terrain, world_pin) + edge_shift;
      const double w = smoothstep01(s / params.edge_decay_length_mm);
      const double r_pin = rest.norm();
      const double bulge =
          std::sqrt(std::max(0.0, 1.0 - (r_pin * r_pin) / (params.tip_radius_mm * params.tip_radius_mm)));
      const Vec2 radial_dir = rest / r_pin;
      frame.pins[i] = rest + (params.deflection_gain * indent * w * bulge) * radial_dir + shear;
    }
  }

  for (Vec2& p : frame.pins) {
    p.x += rng.normal(params.pin_noise_sigma_mm);
    p.y += rng.normal(params.pin_noise_sigma_mm);
  }
  return frame;
}

TapFrame simulate_tap(const PinLayout& layout, const SensorParams& params, const Terrain& terrain,
                      Vec2 foot_center, double orientation_deg, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_tap(layout, params, terrain, foot_center, orientation_deg, rng);
}

ArcSample simulate_arc(const PinLayout& layout, const SensorParams& params, const Terrain& terrain,
                       const std::vector<std::pair<double, Vec2>>& arc_pts, double heading_deg,
                       Rng& rng) {
  ArcSample arc;
  arc.hip_angles_deg.reserve(arc_pts.size());
  arc.frames.reserve(arc_pts.size());
  for (const auto& [angle, point] : arc_pts) {
    TapFrame f = simulate_tap(layout, params, terrain, point, heading_deg + angle, rng);
    f.meta.hip_angle_deg = angle;
    arc.hip_angles_deg.push_back(angle);
    arc.frames.push_back(std::move(f));
  }
  return arc;
}

}  // namespace tacfoot
