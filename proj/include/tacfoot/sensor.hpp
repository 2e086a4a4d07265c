#pragma once

#include <cstdint>
#include <vector>

#include "tacfoot/geometry.hpp"
#include "tacfoot/terrain.hpp"
#include "tacfoot/types.hpp"

namespace tacfoot {

// Pin rest positions in the sensor plane (mm, apex at the origin) plus ring
// index per pin. Ordering is fixed and identical across all frames from one
// sensor.
struct PinLayout {
  std::vector<Vec2> rest;
  std::vector<int> ring;

  int count() const { return static_cast<int>(rest.size()); }

  // 30 pins in 3 concentric rings (6/10/14) inside the tip radius.
  static PinLayout make_default(double tip_radius_mm = 13.5);
};

struct SensorParams {
  double tip_radius_mm = 13.5;       // 27 mm dome diameter
  double indent_depth_mm = 2.0;      // constant per tap
  double deflection_gain = 1.0;      // sensor-plane mm per contact mm
  double edge_decay_length_mm = 3.0; // support transition width
  double shear_gain = 0.5;
  double pin_noise_sigma_mm = 0.05;
  double height_indent_scale = 0.5;  // mm of extra indent per mm surface height
};

void validate(const PinLayout& layout, const SensorParams& params);

struct TapMeta {
  double hip_angle_deg = 0.0;
  double orientation_deg = 0.0;  // sensor frame rotation in the world
  Vec2 world{0.0, 0.0};
  std::int64_t timestamp = 0;
};

// One tap's ordered pin positions in sensor-plane coordinates.
struct TapFrame {
  std::vector<Vec2> pins;
  bool contact = false;
  TapMeta meta;
};

// Contact model for one tap of the hemispherical tip at foot_center.
//
// Per pin, with s = signed edge distance at the pin's world contact point and
// s0 at the foot center:
//   support   w      = smoothstep(clamp(s / edge_decay, 0, 1))
//   radial  deflection = gain * indent * w * bulge, outward from the apex,
//                        bulge = sqrt(max(0, 1 - (r_pin / tip_radius)^2))
//   shear   deflection = shear_gain * indent * (1 - w_center) * taper, toward
//                        the supported side in the sensor plane, with
//                        w_center = clamp(s0 / edge_decay + 0.5, 0, 1) and
//                        taper = smoothstep((s0 + tip_radius) / tip_radius)
//                        so the pattern stays continuous and distinct down to
//                        the no-contact boundary
// plus per-axis Gaussian pin noise. indent is indent_depth plus the local
// surface height scaled by height_indent_scale (taller surface presses the
// dome deeper, which is how height changes masquerade as edge displacement).
// contact = (s0 > -tip_radius); free taps leave pins at rest + noise.
TapFrame simulate_tap(const PinLayout& layout, const SensorParams& params, const Terrain& terrain,
                      Vec2 foot_center, double orientation_deg, Rng& rng);
TapFrame simulate_tap(const PinLayout& layout, const SensorParams& params, const Terrain& terrain,
                      Vec2 foot_center, double orientation_deg = 0.0, std::uint64_t seed = 0);

// TapFrames collected along a hip-angle arc with known relative angles.
struct ArcSample {
  int id = 0;
  std::vector<double> hip_angles_deg;
  std::vector<TapFrame> frames;
};

// One simulate_tap per arc point; hip angle and orientation recorded in meta.
ArcSample simulate_arc(const PinLayout& layout, const SensorParams& params, const Terrain& terrain,
                       const std::vector<std::pair<double, Vec2>>& arc_pts, double heading_deg,
                       Rng& rng);

}  // namespace tacfoot
