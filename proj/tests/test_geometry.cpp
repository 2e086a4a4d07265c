#include <doctest.h>

#include <cmath>

#include "tacfoot/errors.hpp"
#include "tacfoot/geometry.hpp"

using namespace tacfoot;

TEST_CASE("foot_position zero angle is the neutral foothold") {
  Pose2D pose{0.0, 0.0, 0.0};
  RobotParams robot;
  const Vec2 p = foot_position(pose, robot, 0.0);
  CHECK(p.x == doctest::Approx(115.0).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("foot_position arc-length displacement matches closed form") {
  Pose2D pose{0.0, 0.0, 0.0};
  RobotParams robot;
  const Vec2 neutral = foot_position(pose, robot, 0.0);
  const Vec2 p = foot_position(pose, robot, 7.0);

  // closed-form arc length r * theta
  const double arc_expected = 115.0 * deg_to_rad(7.0);
  CHECK(arc_expected == doctest::Approx(14.0493).epsilon(1e-4));

  // recover the arc length from the numerically rotated point via its chord
  const double chord = (p - neutral).norm();
  const double arc_from_chord = 2.0 * 115.0 * std::asin(chord / (2.0 * 115.0));
  CHECK(arc_from_chord == doctest::Approx(arc_expected).epsilon(1e-12));
}

TEST_CASE("foot_position mirror symmetry about the neutral ray") {
  Pose2D pose{3.0, -8.0, 30.0};
  RobotParams robot;
  for (double a : {3.0, 7.5, 15.0, 40.0}) {
    const Vec2 plus = foot_position(pose, robot, a) - pose.position();
    const Vec2 minus = foot_position(pose, robot, -a) - pose.position();
    const Vec2 axis = unit_from_deg(pose.heading_deg);
    // equal projection on the ray, opposite perpendicular components
    CHECK(plus.dot(axis) == doctest::Approx(minus.dot(axis)).epsilon(1e-12));
    CHECK(plus.dot(axis.perp()) == doctest::Approx(-minus.dot(axis.perp())).epsilon(1e-12));
  }
}

TEST_CASE("foot_position is injective over (-90, 90) for fixed pose") {
  Pose2D pose{0.0, 0.0, 45.0};
  RobotParams robot;
  Vec2 prev = foot_position(pose, robot, -89.0);
  for (double a = -88.0; a < 90.0; a += 1.0) {
    const Vec2 cur = foot_position(pose, robot, a);
    CHECK((cur - prev).norm() > 1e-6);
    prev = cur;
  }
}

TEST_CASE("arc_points spacing and endpoints") {
  Pose2D pose{0.0, 0.0, 0.0};
  RobotParams robot;

  SUBCASE("31 taps over +-15 deg space exactly 1 deg apart") {
    const auto pts = arc_points(pose, robot, ArcSpec{0.0, 15.0, 31});
    REQUIRE(pts.size() == 31);
    for (std::size_t k = 1; k < pts.size(); ++k)
      CHECK(pts[k].first - pts[k - 1].first == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("3 taps hit endpoints and midpoint") {
    const auto pts = arc_points(pose, robot, ArcSpec{5.0, 15.0, 3});
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].first == doctest::Approx(-10.0));
    CHECK(pts[1].first == doctest::Approx(5.0));
    CHECK(pts[2].first == doctest::Approx(20.0));
  }

  SUBCASE("angles symmetric about the center") {
    const auto pts = arc_points(pose, robot, ArcSpec{-4.0, 12.0, 25});
    const int n = static_cast<int>(pts.size());
    for (int k = 0; k < n; ++k)
      CHECK(pts[k].first + pts[n - 1 - k].first == doctest::Approx(-8.0).epsilon(1e-12));
  }
}

TEST_CASE("arc_points all lie on the hip circle") {
  Pose2D pose{12.0, -40.0, 77.0};
  RobotParams robot;
  const auto pts = arc_points(pose, robot, ArcSpec{10.0, 25.0, 41});
  for (const auto& [angle, p] : pts) {
    CHECK((p - pose.position()).norm() == doctest::Approx(115.0).epsilon(1e-12));
  }
}

TEST_CASE("consecutive arc taps are one hip-arc spacing apart") {
  Pose2D pose{0.0, 0.0, 0.0};
  RobotParams robot;
  const ArcSpec arc{0.0, 15.0, 31};
  const auto pts = arc_points(pose, robot, arc);
  const double expected_chord = 2.0 * 115.0 * std::sin(0.5 * deg_to_rad(arc.spacing_deg()));
  const double expected_arc = 115.0 * deg_to_rad(arc.spacing_deg());
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double chord = (pts[k].second - pts[k - 1].second).norm();
    CHECK(chord == doctest::Approx(expected_chord).epsilon(1e-12));
    const double arc_len = 2.0 * 115.0 * std::asin(chord / (2.0 * 115.0));
    CHECK(std::abs(arc_len - expected_arc) < 1e-9);
  }
}

TEST_CASE("arc spec validation") {
  CHECK_THROWS_AS(validate(ArcSpec{0.0, 15.0, 2}), Error);
  CHECK_THROWS_AS(validate(ArcSpec{0.0, 15.0, 4}), Error);
  CHECK_THROWS_AS(validate(ArcSpec{0.0, -1.0, 31}), Error);
  CHECK_NOTHROW(validate(ArcSpec{0.0, 15.0, 3}));
}

TEST_CASE("actuation noise") {
  RobotParams robot;

  SUBCASE("zero sigma leaves the point untouched") {
    robot.placement_noise_sigma_mm = 0.0;
    const Vec2 p = apply_actuation_noise({10.0, -3.0}, robot, 42);
    CHECK(p.x == 10.0);
    CHECK(p.y == -3.0);
  }

  SUBCASE("same seed gives the identical perturbation") {
    robot.placement_noise_sigma_mm = 2.0;
    const Vec2 a = apply_actuation_noise({1.0, 2.0}, robot, 7);
    const Vec2 b = apply_actuation_noise({1.0, 2.0}, robot, 7);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
  }

  SUBCASE("sample std within 5% of sigma per axis over 1e4 draws") {
    robot.placement_noise_sigma_mm = 2.0;
    Rng rng(123);
    const int n = 10000;
    double sx = 0, sy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
      const Vec2 p = apply_actuation_noise({0.0, 0.0}, robot, rng);
      sx += p.x;
      sy += p.y;
      sxx += p.x * p.x;
      syy += p.y * p.y;
    }
    const double std_x = std::sqrt(sxx / n - (sx / n) * (sx / n));
    const double std_y = std::sqrt(syy / n - (sy / n) * (sy / n));
    CHECK(std_x == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std_y == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("turn_and_step") {
  RobotParams robot;
  robot.heading_drift_sigma_deg = 0.0;
  robot.placement_noise_sigma_mm = 0.0;
  Rng rng(1);

  SUBCASE("target on the heading ray keeps heading and advances") {
    Pose2D pose{0.0, 0.0, 0.0};
    const TurnOutcome out = turn_and_step(pose, robot, {115.0, 0.0}, rng);
    CHECK(out.pose.heading_deg == doctest::Approx(0.0));
    CHECK(out.pose.x_mm == doctest::Approx(40.0));
    CHECK(out.pose.y_mm == doctest::Approx(0.0));
    CHECK(out.commanded_turn_deg == doctest::Approx(0.0));
  }

  SUBCASE("left offset turns counter-clockwise by the bearing of the offset") {
    Pose2D pose{0.0, 0.0, 0.0};
    const Vec2 target{115.0 * std::cos(deg_to_rad(9.0)), 115.0 * std::sin(deg_to_rad(9.0))};
    const TurnOutcome out = turn_and_step(pose, robot, target, rng);
    const double expected = rad_to_deg(std::atan2(target.y, target.x));
    CHECK(out.pose.heading_deg == doctest::Approx(expected).epsilon(1e-12));
    CHECK(out.commanded_turn_deg == doctest::Approx(9.0).epsilon(1e-9));
  }

  SUBCASE("zero step length only turns") {
    robot.step_length_mm = 0.0;
    Pose2D pose{5.0, 5.0, 10.0};
    const TurnOutcome out = turn_and_step(pose, robot, foot_position(pose, robot, 20.0), rng);
    CHECK(out.pose.x_mm == doctest::Approx(5.0));
    CHECK(out.pose.y_mm == doctest::Approx(5.0));
    CHECK(out.pose.heading_deg == doctest::Approx(30.0).epsilon(1e-9));
  }

  SUBCASE("unreachable target throws") {
    Pose2D pose{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(turn_and_step(pose, robot, {500.0, 0.0}, rng), UnreachableTarget);
  }
}

TEST_CASE("turn slip under-rotates large commanded turns") {
  RobotParams robot;
  robot.heading_drift_sigma_deg = 0.0;
  robot.turn_slip = TurnSlipModel{3.0, 1.0, 20.0, 35.0};
  Pose2D pose{0.0, 0.0, 0.0};
  const Vec2 target = foot_position(pose, robot, 10.0);
  Rng rng(5);
  const TurnOutcome out = turn_and_step(pose, robot, target, rng);
  CHECK(out.slipped);
  CHECK(out.slip_deg < 0.0);  // opposes the commanded left turn
  CHECK(out.pose.heading_deg <= -10.0 + 1e-9);
  CHECK(std::abs(out.slip_deg) >= 20.0);
  CHECK(std::abs(out.slip_deg) <= 35.0);
}

TEST_CASE("kinematics with zero sigmas is seed independent") {
  RobotParams robot;
  robot.placement_noise_sigma_mm = 0.0;
  robot.heading_drift_sigma_deg = 0.0;
  Pose2D pose{1.0, 2.0, 3.0};
  const Vec2 target = foot_position(pose, robot, -4.0);
  Rng rng_a(11), rng_b(999);
  const TurnOutcome a = turn_and_step(pose, robot, target, rng_a);
  const TurnOutcome b = turn_and_step(pose, robot, target, rng_b);
  CHECK(a.pose.x_mm == b.pose.x_mm);
  CHECK(a.pose.y_mm == b.pose.y_mm);
  CHECK(a.pose.heading_deg == b.pose.heading_deg);
  const Vec2 na = apply_actuation_noise(target, robot, 11);
  const Vec2 nb = apply_actuation_noise(target, robot, 999);
  CHECK(na.x == nb.x);
  CHECK(na.y == nb.y);
}

TEST_CASE("heading normalization wraps to [-180, 180)") {
  CHECK(wrap_deg(180.0) == doctest::Approx(-180.0));
  CHECK(wrap_deg(-180.0) == doctest::Approx(-180.0));
  CHECK(wrap_deg(540.0) == doctest::Approx(-180.0));
  CHECK(wrap_deg(359.0) == doctest::Approx(-1.0));
  CHECK(normalized(Pose2D{0, 0, 270.0}).heading_deg == doctest::Approx(-90.0));
}
