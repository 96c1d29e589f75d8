#include <doctest.h>

#include <cmath>

#include "lanekit/errors.hpp"
#include "lanekit/geometry.hpp"
#include "lanekit/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lanekit;

TEST_CASE("polyline invariants") {
  Polyline2D ok{{0, 0}, {1, 0}};
  CHECK(!ok.invariant_violation());

  Polyline2D single{{0, 0}};
  CHECK(single.invariant_violation());

  Polyline2D dup{{0, 0}, {0, 0}, {1, 0}};
  CHECK(dup.invariant_violation());

  Polyline2D nan_pt{{0, 0}, {std::nan(""), 1}};
  CHECK(nan_pt.invariant_violation());
}

TEST_CASE("resample: straight segment spaces points uniformly") {
  Polyline2D line{{0, 0}, {10, 0}};
  const Polyline2D r = resample_polyline(line, 10);
  REQUIRE(r.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(r[i].x == doctest::Approx(10.0 * i / 9.0).epsilon(1e-12));
    CHECK(r[i].y == 0.0);
  }
}

TEST_CASE("resample: endpoints preserved exactly") {
  Polyline2D p{{0.123, 4.5}, {3.0, 2.0}, {7.5, -1.25}};
  const Polyline2D r = resample_polyline(p, 7);
  CHECK(r.front() == p.front());
  CHECK(r.back() == p.back());
}

TEST_CASE("resample: idempotent on already-uniform input") {
  Polyline2D p{{0, 0}, {2, 0}, {4, 0}, {6, 0}};
  const Polyline2D r = resample_polyline(p, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(distance(r[i], p[i]) < 1e-9);
  }
}

TEST_CASE("resample: L-shape midpoint lands on the corner") {
  Polyline2D p{{0, 0}, {4, 0}, {4, 4}};
  const Polyline2D r = resample_polyline(p, 3);
  REQUIRE(r.size() == 3);
  CHECK(distance(r[1], {4, 0}) < 1e-9);
  // Arc length along the original is fully covered and the corner sample
  // keeps the chordal length exact here.
  CHECK(r.arc_length() == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("resample matches the brute-force arc walker") {
  SeededRng rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    Polyline2D p;
    const int n_pts = 3 + static_cast<int>(rng.below(5));
    double x = 0.0, y = 0.0;
    p.points.push_back({x, y});
    for (int i = 1; i < n_pts; ++i) {
      x += rng.uniform(0.5, 3.0);
      y += rng.uniform(-2.0, 2.0);
      p.points.push_back({x, y});
    }
    const int n = 2 + static_cast<int>(rng.below(9));
    const Polyline2D r = resample_polyline(p, n);
    const double total = p.arc_length();
    for (int k = 0; k < n; ++k) {
      const Vec2 expected =
          oracle::point_at_arc_bruteforce(p, total * k / (n - 1));
      CHECK(distance(r[static_cast<std::size_t>(k)], expected) < 1e-3);
    }
    // Uniform spacing in arc length: verify positions against the exact
    // walker too.
    for (int k = 0; k < n; ++k) {
      const Vec2 exact = point_at_arc(p, total * k / (n - 1));
      CHECK(distance(r[static_cast<std::size_t>(k)], exact) < 1e-9);
    }
  }
}

TEST_CASE("resample: zero-length input throws") {
  Polyline2D p;
  p.points = {{1, 1}, {1, 1}};
  CHECK_THROWS_AS(resample_polyline(p, 5), DegenerateInput);
}

TEST_CASE("signed area and orientation") {
  std::vector<Vec2> ccw{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(ccw) == doctest::Approx(1.0));
  std::vector<Vec2> cw{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  CHECK(signed_area(cw) == doctest::Approx(-1.0));
}

TEST_CASE("simple polygon detection") {
  std::vector<Vec2> simple{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(is_simple_polygon(simple));
  std::vector<Vec2> bowtie{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  CHECK(!is_simple_polygon(bowtie));
}

TEST_CASE("convex clipping and IoU") {
  std::vector<Vec2> a{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  std::vector<Vec2> b{{1, 0}, {3, 0}, {3, 2}, {1, 2}};
  // Overlap area 2, union 6.
  CHECK(polygon_iou(a, b) == doctest::Approx(2.0 / 6.0).epsilon(1e-9));
  std::vector<Vec2> far{{10, 10}, {11, 10}, {11, 11}, {10, 11}};
  CHECK(polygon_iou(a, far) == 0.0);
  CHECK(polygon_iou(a, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("box clipping inserts exact border points") {
  // Crosses the box [-5,5]^2 horizontally.
  Polyline2D p{{-10, 1}, {10, 1}};
  const auto runs = clip_polyline_to_box(p, 5.0);
  REQUIRE(runs.size() == 1);
  REQUIRE(runs[0].size() == 2);
  CHECK(runs[0][0] == Vec2{-5, 1});
  CHECK(runs[0][1] == Vec2{5, 1});
}

TEST_CASE("box clipping splits re-entrant chains") {
  // Leaves through the top and comes back.
  Polyline2D p{{-4, 4}, {0, 8}, {4, 4}};
  const auto runs = clip_polyline_to_box(p, 5.0);
  CHECK(runs.size() == 2);
  for (const auto& run : runs) {
    for (const Vec2& v : run.points) {
      CHECK(std::abs(v.x) <= 5.0 + 1e-9);
      CHECK(std::abs(v.y) <= 5.0 + 1e-9);
    }
  }
}

TEST_CASE("box clipping drops outside chains") {
  Polyline2D p{{10, 10}, {12, 10}};
  CHECK(clip_polyline_to_box(p, 5.0).empty());
  CHECK(!clip_polyline_to_box_single(p, 5.0).has_value());
}

TEST_CASE("polyline distance") {
  Polyline2D a{{0, 0}, {10, 0}};
  Polyline2D b{{0, 3}, {10, 3}};
  CHECK(polyline_distance(a, b) == doctest::Approx(3.0));
  Polyline2D crossing{{5, -1}, {5, 1}};
  CHECK(polyline_distance(a, crossing) == 0.0);
}

TEST_CASE("polygon-polyline distance covers containment") {
  std::vector<Vec2> ring{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  Polyline2D inside{{4, 4}, {6, 6}};
  CHECK(polygon_polyline_distance(ring, inside) == 0.0);
  Polyline2D outside{{20, 0}, {20, 10}};
  CHECK(polygon_polyline_distance(ring, outside) == doctest::Approx(10.0));
}
