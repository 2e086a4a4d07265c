#include <doctest.h>

#include <cmath>

#include "tacfoot/errors.hpp"
#include "tacfoot/terrain.hpp"
#include "tacfoot/types.hpp"

using namespace tacfoot;

TEST_CASE("beam signed edge distance") {
  Terrain terrain = BeamTerrain{};  // width 28, axis +x, outer edge at y = -14

  CHECK(signed_edge_distance(terrain, {100.0, 0.0}) == doctest::Approx(14.0));  // centerline
  CHECK(signed_edge_distance(terrain, {100.0, -14.0}) == doctest::Approx(0.0));
  CHECK(signed_edge_distance(terrain, {100.0, -20.0}) == doctest::Approx(-6.0));
  // only the tracked outer edge defines the sign
  CHECK(signed_edge_distance(terrain, {100.0, 14.0}) == doctest::Approx(28.0));
}

TEST_CASE("table signed edge distance") {
  TableTerrain table;
  Terrain terrain = table;
  CHECK(signed_edge_distance(terrain, {590.0, 0.0}) == doctest::Approx(0.0));
  CHECK(signed_edge_distance(terrain, {600.0, 0.0}) == doctest::Approx(-10.0));
  CHECK(signed_edge_distance(terrain, {0.0, 0.0}) == doctest::Approx(590.0));

  SUBCASE("radially symmetric about the center") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const double r = rng.uniform(0.0, 900.0);
      const double a = rng.uniform(0.0, 2.0 * kPi);
      const double b = rng.uniform(0.0, 2.0 * kPi);
      const Vec2 pa{r * std::cos(a), r * std::sin(a)};
      const Vec2 pb{r * std::cos(b), r * std::sin(b)};
      CHECK(signed_edge_distance(terrain, pa) ==
            doctest::Approx(signed_edge_distance(terrain, pb)).epsilon(1e-12));
    }
  }
}

TEST_CASE("signed edge distance is 1-Lipschitz") {
  Rng rng(17);
  const Terrain beam = BeamTerrain{};
  const Terrain table = TableTerrain{};
  for (int i = 0; i < 500; ++i) {
    const Vec2 p{rng.uniform(-200.0, 700.0), rng.uniform(-200.0, 700.0)};
    const Vec2 q{rng.uniform(-200.0, 700.0), rng.uniform(-200.0, 700.0)};
    const double dpq = (p - q).norm();
    CHECK(std::abs(signed_edge_distance(beam, p) - signed_edge_distance(beam, q)) <= dpq + 1e-9);
    CHECK(std::abs(signed_edge_distance(table, p) - signed_edge_distance(table, q)) <= dpq + 1e-9);
  }
}

TEST_CASE("is_supported uses the foot center with a closed boundary") {
  Terrain terrain = BeamTerrain{};

  CHECK(is_supported(terrain, {100.0, 0.0}));
  CHECK_FALSE(is_supported(terrain, {100.0, -15.0}));  // 1 mm past the tracked edge
  CHECK(is_supported(terrain, {100.0, -14.0}));        // exactly on the edge

  SUBCASE("inner side and length bounds also apply") {
    CHECK_FALSE(is_supported(terrain, {100.0, 15.0}));
    CHECK_FALSE(is_supported(terrain, {-1.0, 0.0}));
    CHECK_FALSE(is_supported(terrain, {501.0, 0.0}));
  }

  SUBCASE("support iff signed distance >= 0 within the other bounds") {
    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
      const Vec2 p{rng.uniform(0.0, 500.0), rng.uniform(-40.0, 14.0)};
      CHECK(is_supported(terrain, p) == (signed_edge_distance(terrain, p) >= 0.0));
    }
  }
}

TEST_CASE("surface height profile") {
  BeamTerrain beam;
  Terrain flat = beam;
  CHECK(surface_height(flat, {100.0, 0.0}) == 0.0);

  beam.height_profile = {{0.0, 0.0}, {400.0, 2.0}};
  Terrain ramp = beam;
  CHECK(surface_height(ramp, {200.0, 0.0}) == doctest::Approx(1.0));
  CHECK(surface_height(ramp, {0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(surface_height(ramp, {400.0, 0.0}) == doctest::Approx(2.0));
  CHECK(surface_height(ramp, {450.0, 0.0}) == doctest::Approx(2.0));  // clamped past the last knot

  CHECK_THROWS_AS(surface_height(ramp, {200.0, -20.0}), UnsupportedPoint);
}

TEST_CASE("edge normal points toward the supported side") {
  Terrain beam = BeamTerrain{};
  const Vec2 nb = edge_normal(beam, {100.0, -14.0});
  CHECK(nb.x == doctest::Approx(0.0));
  CHECK(nb.y == doctest::Approx(1.0));

  Terrain table = TableTerrain{};
  const Vec2 nt = edge_normal(table, {590.0, 0.0});
  CHECK(nt.x == doctest::Approx(-1.0));
  CHECK(nt.y == doctest::Approx(0.0));

  // gradient check: moving along the normal increases the signed distance
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p{rng.uniform(0.0, 500.0), rng.uniform(-40.0, 40.0)};
    const Vec2 n = edge_normal(beam, p);
    const double d0 = signed_edge_distance(beam, p);
    const double d1 = signed_edge_distance(beam, p + 0.01 * n);
    CHECK(d1 > d0);
  }
}

TEST_CASE("terrain validation") {
  BeamTerrain bad;
  bad.width_mm = 0.0;
  CHECK_THROWS_AS(validate(Terrain{bad}), Error);
  TableTerrain tbl;
  tbl.radius_mm = -1.0;
  CHECK_THROWS_AS(validate(Terrain{tbl}), Error);
  CHECK_NOTHROW(validate(Terrain{BeamTerrain{}}));
  CHECK_NOTHROW(validate(Terrain{TableTerrain{}}));
}
