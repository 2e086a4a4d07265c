#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tacfoot/sensor.hpp"
#include "tacfoot/types.hpp"

namespace tacfoot {

struct GrayImage {
  int width = 640;
  int height = 480;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct DetectionParams {
  int threshold = 128;         // 0..255
  int min_area_px = 6;
  int max_area_px = 400;
  double ambient_level = 0.0;  // 0..1
  double pin_brightness = 1.0; // 0..1
  double pixel_noise_sigma = 2.0;
  double gate_px = 8.0;        // match_pins gating radius
};

void validate(const DetectionParams& params);

// Sensor-plane mm -> image px mapping (origin at the image center, y down the
// rows like the sensor's +y; no flip).
struct CameraScale {
  double mm_to_px = 14.0;
  double center_x = 320.0;
  double center_y = 240.0;

  Vec2 to_px(Vec2 mm) const { return {center_x + mm.x * mm_to_px, center_y + mm.y * mm_to_px}; }
  Vec2 to_mm(Vec2 px) const {
    return {(px.x - center_x) / mm_to_px, (px.y - center_y) / mm_to_px};
  }
};

inline constexpr double kPinSpotSigmaPx = 2.0;

// Renders the pin pattern: background 255 * ambient * 0.15 plus Gaussian
// pixel noise, one Gaussian spot per pin with peak
// 255 * clamp(pin_brightness + 0.3 * ambient, 0, 1). Throws OutOfFrame when a
// pin maps outside the image.
GrayImage render_image(const TapFrame& frame, const DetectionParams& params,
                       const CameraScale& scale, Rng& rng, int width = 640, int height = 480);

struct Blob {
  double cx_px = 0.0;
  double cy_px = 0.0;
  int area_px = 0;
};

// Threshold + 4-connected components with area in [min_area, max_area];
// intensity-weighted centroids sorted by (y, x).
std::vector<Blob> detect_pins(const GrayImage& image, const DetectionParams& params);

// Greedy mutual-nearest-neighbor assignment of centroids to the reference
// pins (both in px). Unmatched reference pins keep their reference position.
// Throws TrackingLost when the centroid count is outside +-20% of the
// reference count or fewer than 80% of pins match within gate_px.
std::vector<Vec2> match_pins(const std::vector<Vec2>& centroids_px,
                             const std::vector<Vec2>& reference_px, double gate_px = 8.0);

// Full image-mediated observation: render -> detect -> match against the rest
// layout, back to sensor-plane mm. contact flag and meta are preserved.
TapFrame through_image(const TapFrame& frame, const PinLayout& layout,
                       const DetectionParams& params, const CameraScale& scale, Rng& rng);

void write_pgm(const GrayImage& image, const std::string& path);
std::string centroids_csv(const std::vector<Blob>& blobs);

}  // namespace tacfoot
