#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "tacfoot/types.hpp"

namespace tacfoot {

// Raised beam. The tracked outer edge is the lateral -width/2 side (the side
// away from the second, wide beam); the supported band is lateral in
// [-width/2, +width/2] and axial in [0, length].
struct BeamTerrain {
  Vec2 origin{0.0, 0.0};
  Vec2 direction{1.0, 0.0};  // unit axis
  double length_mm = 500.0;
  double width_mm = 28.0;
  // Piecewise-linear height offset (axial_mm, height_mm), sorted by axial.
  std::vector<std::pair<double, double>> height_profile;

  double axial(Vec2 p) const { return (p - origin).dot(direction); }
  double lateral(Vec2 p) const { return (p - origin).dot(direction.perp()); }
};

// Round table; supported inside the disc, tracked edge is the rim.
// active_arc marks the semicircular section followed in the experiments and
// is used for start placement and coverage metrics only.
struct TableTerrain {
  Vec2 center{0.0, 0.0};
  double radius_mm = 590.0;
  double active_arc_begin_deg = 0.0;
  double active_arc_end_deg = 180.0;
};

using Terrain = std::variant<BeamTerrain, TableTerrain>;

void validate(const BeamTerrain& beam);
void validate(const TableTerrain& table);
void validate(const Terrain& terrain);

// Perpendicular distance to the tracked edge; positive on the supported side,
// zero exactly on the edge.
double signed_edge_distance(const Terrain& terrain, Vec2 point);

// Unit direction of increasing signed_edge_distance (toward the supported
// side) at the given point.
Vec2 edge_normal(const Terrain& terrain, Vec2 point);

// Safety criterion: the foot center lies on the supported surface (closed
// boundary). foot_radius is accepted for stricter optional checks.
bool is_supported(const Terrain& terrain, Vec2 foot_center, double foot_radius_mm = 0.0);

// Height offset at a supported point; throws UnsupportedPoint otherwise.
double surface_height(const Terrain& terrain, Vec2 point);

// Height profile evaluated without the support check (0 where no profile).
double height_at(const Terrain& terrain, Vec2 point);

}  // namespace tacfoot
