#include "tacfoot/vision.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "tacfoot/errors.hpp"

namespace tacfoot {

void validate(const DetectionParams& params) {
  if (params.threshold < 0 || params.threshold > 255) throw Error("threshold must be in [0, 255]");
  if (params.min_area_px >= params.max_area_px) throw Error("min_area must be below max_area");
}

GrayImage render_image(const TapFrame& frame, const DetectionParams& params,
                       const CameraScale& scale, Rng& rng, int width, int height) {
  std::vector<Vec2> centers_px;
  centers_px.reserve(frame.pins.size());
  for (const Vec2& pin : frame.pins) {
    const Vec2 c = scale.to_px(pin);
    if (c.x < 0.0 || c.x >= width || c.y < 0.0 || c.y >= height)
      throw OutOfFrame("pin maps outside the image at (" + std::to_string(c.x) + ", " +
                       std::to_string(c.y) + ") px");
    centers_px.push_back(c);
  }

  const double background = 255.0 * params.ambient_level * 0.15;
  const double peak = 255.0 * std::clamp(params.pin_brightness + 0.3 * params.ambient_level, 0.0, 1.0);

  std::vector<float> intensity(static_cast<std::size_t>(width) * height,
                               static_cast<float>(background));
  const double inv2s2 = 1.0 / (2.0 * kPinSpotSigmaPx * kPinSpotSigmaPx);
  const int radius = static_cast<int>(std::ceil(4.0 * kPinSpotSigmaPx));
  for (const Vec2& c : centers_px) {
    const int x0 = std::max(0, static_cast<int>(std::floor(c.x)) - radius);
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(c.x)) + radius);
    const int y0 = std::max(0, static_cast<int>(std::floor(c.y)) - radius);
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(c.y)) + radius);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - c.x;
        const double dy = y - c.y;
        intensity[static_cast<std::size_t>(y) * width + x] +=
            static_cast<float>(peak * std::exp(-(dx * dx + dy * dy) * inv2s2));
      }
    }
  }

  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(intensity.size());
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    const double v = intensity[i] + rng.normal(params.pixel_noise_sigma);
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return img;
}

std::vector<Blob> detect_pins(const GrayImage& image, const DetectionParams& params) {
  const int w = image.width, h = image.height;
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<Blob> blobs;
  std::vector<int> stack;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int idx = y * w + x;
      if (label[idx] != -1 || image.pixels[idx] <= params.threshold) continue;

      // flood fill one 4-connected component
      double sum_w = 0.0, sum_x = 0.0, sum_y = 0.0;
      int area = 0;
      stack.clear();
      stack.push_back(idx);
      label[idx] = 0;
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cy = cur / w, cx = cur % w;
        const double inten = image.pixels[cur];
        sum_w += inten;
        sum_x += inten * cx;
        sum_y += inten * cy;
        ++area;
        const int nbrs[4] = {cur - 1, cur + 1, cur - w, cur + w};
        const bool ok[4] = {cx > 0, cx < w - 1, cy > 0, cy < h - 1};
        for (int k = 0; k < 4; ++k) {
          if (!ok[k]) continue;
          const int nb = nbrs[k];
          if (label[nb] == -1 && image.pixels[nb] > params.threshold) {
            label[nb] = 0;
            stack.push_back(nb);
          }
        }
      }
      if (area >= params.min_area_px && area <= params.max_area_px)
        blobs.push_back({sum_x / sum_w, sum_y / sum_w, area});
    }
  }

  std::sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) {
    return a.cy_px != b.cy_px ? a.cy_px < b.cy_px : a.cx_px < b.cx_px;
  });
  return blobs;
}

std::vector<Vec2> match_pins(const std::vector<Vec2>& centroids_px,
                             const std::vector<Vec2>& reference_px, double gate_px) {
  const int n_ref = static_cast<int>(reference_px.size());
  const int n_cen = static_cast<int>(centroids_px.size());
  if (n_cen < static_cast<int>(std::ceil(0.8 * n_ref)) ||
      n_cen > static_cast<int>(std::floor(1.2 * n_ref)))
    throw TrackingLost("centroid count " + std::to_string(n_cen) + " outside +-20% of " +
                       std::to_string(n_ref) + " pins");

  std::vector<Vec2> out = reference_px;  // unmatched pins keep their previous position
  std::vector<bool> ref_used(n_ref, false), cen_used(n_cen, false);
  int matched = 0;

  // repeatedly take the globally closest unassigned pair within the gate
  for (;;) {
    double best_d2 = gate_px * gate_px;
    int best_r = -1, best_c = -1;
    for (int r = 0; r < n_ref; ++r) {
      if (ref_used[r]) continue;
      for (int c = 0; c < n_cen; ++c) {
        if (cen_used[c]) continue;
        const double d2 = (reference_px[r] - centroids_px[c]).norm2();
        if (d2 <= best_d2) {
          best_d2 = d2;
          best_r = r;
          best_c = c;
        }
      }
    }
    if (best_r < 0) break;
    ref_used[best_r] = true;
    cen_used[best_c] = true;
    out[best_r] = centroids_px[best_c];
    ++matched;
  }

  if (matched < static_cast<int>(std::ceil(0.8 * n_ref)))
    throw TrackingLost("matched only " + std::to_string(matched) + " of " + std::to_string(n_ref) +
                       " pins within " + std::to_string(gate_px) + " px");
  return out;
}

TapFrame through_image(const TapFrame& frame, const PinLayout& layout,
                       const DetectionParams& params, const CameraScale& scale, Rng& rng) {
  const GrayImage img = render_image(frame, params, scale, rng);
  const std::vector<Blob> blobs = detect_pins(img, params);

  std::vector<Vec2> centroids;
  centroids.reserve(blobs.size());
  for (const Blob& b : blobs) centroids.push_back({b.cx_px, b.cy_px});

  std::vector<Vec2> rest_px;
  rest_px.reserve(layout.rest.size());
  for (const Vec2& r : layout.rest) rest_px.push_back(scale.to_px(r));

  const std::vector<Vec2> matched = match_pins(centroids, rest_px, params.gate_px);

  TapFrame out = frame;
  for (std::size_t i = 0; i < matched.size(); ++i) out.pins[i] = scale.to_mm(matched[i]);
  return out;
}

void write_pgm(const GrayImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write image: " + path);
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

std::string centroids_csv(const std::vector<Blob>& blobs) {
  std::string csv = "x_px,y_px,area\n";
  char buf[64];
  for (const Blob& b : blobs) {
    auto append = [&](double v, char sep) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      csv.append(buf, res.ptr);
      csv.push_back(sep);
    };
    append(b.cx_px, ',');
    append(b.cy_px, ',');
    csv += std::to_string(b.area_px);
    csv.push_back('\n');
  }
  return csv;
}

}  // namespace tacfoot
