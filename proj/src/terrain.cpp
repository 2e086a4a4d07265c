#include "tacfoot/terrain.hpp"

#include <algorithm>
#include <cmath>

#include "tacfoot/errors.hpp"

namespace tacfoot {

void validate(const BeamTerrain& beam) {
  if (beam.width_mm <= 0.0) throw Error("beam width must be positive");
  if (beam.length_mm <= 0.0) throw Error("beam length must be positive");
  if (std::abs(beam.direction.norm() - 1.0) > 1e-9) throw Error("beam direction must be unit");
  for (std::size_t i = 1; i < beam.height_profile.size(); ++i) {
    if (beam.height_profile[i].first <= beam.height_profile[i - 1].first)
      throw Error("height_profile axial coordinates must be strictly increasing");
  }
}

void validate(const TableTerrain& table) {
  if (table.radius_mm <= 0.0) throw Error("table radius must be positive");
}

void validate(const Terrain& terrain) {
  std::visit([](const auto& t) { validate(t); }, terrain);
}

double signed_edge_distance(const Terrain& terrain, Vec2 point) {
  if (const auto* beam = std::get_if<BeamTerrain>(&terrain)) {
    // Only the tracked outer edge (lateral -width/2) defines the sign.
    return beam->lateral(point) + 0.5 * beam->width_mm;
  }
  const auto& table = std::get<TableTerrain>(terrain);
  return table.radius_mm - (point - table.center).norm();
}

Vec2 edge_normal(const Terrain& terrain, Vec2 point) {
  if (const auto* beam = std::get_if<BeamTerrain>(&terrain)) {
    return beam->direction.perp();
  }
  const auto& table = std::get<TableTerrain>(terrain);
  const Vec2 r = point - table.center;
  const double n = r.norm();
  if (n < 1e-12) return {1.0, 0.0};
  return (-1.0 / n) * r;
}

bool is_supported(const Terrain& terrain, Vec2 foot_center, double /*foot_radius_mm*/) {
  if (const auto* beam = std::get_if<BeamTerrain>(&terrain)) {
    const double lat = beam->lateral(foot_center);
    const double ax = beam->axial(foot_center);
    return lat >= -0.5 * beam->width_mm && lat <= 0.5 * beam->width_mm && ax >= 0.0 &&
           ax <= beam->length_mm;
  }
  return signed_edge_distance(terrain, foot_center) >= 0.0;
}

static double profile_value(const std::vector<std::pair<double, double>>& profile, double ax) {
  if (profile.empty()) return 0.0;
  if (ax <= profile.front().first) return profile.front().second;
  if (ax >= profile.back().first) return profile.back().second;
  auto hi = std::upper_bound(profile.begin(), profile.end(), ax,
                             [](double v, const auto& p) { return v < p.first; });
  auto lo = hi - 1;
  const double t = (ax - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

double height_at(const Terrain& terrain, Vec2 point) {
  if (const auto* beam = std::get_if<BeamTerrain>(&terrain)) {
    return profile_value(beam->height_profile, beam->axial(point));
  }
  return 0.0;
}

double surface_height(const Terrain& terrain, Vec2 point) {
  if (!is_supported(terrain, point))
    throw UnsupportedPoint("surface_height queried off the supported surface");
  return height_at(terrain, point);
}

}  // namespace tacfoot
