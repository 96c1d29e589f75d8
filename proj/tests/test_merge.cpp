#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "lanekit/errors.hpp"
#include "lanekit/json_io.hpp"
#include "lanekit/lane_graph.hpp"
#include "lanekit/merge.hpp"
#include "merge_reference.hpp"
#include "support.hpp"

using namespace lanekit;
using namespace lanekit::testing;

namespace {

double total_centerline_length(const MapScene& scene) {
  double total = 0.0;
  for (const auto& [id, ls] : scene.lane_segments) total += ls.centerline.arc_length();
  return total;
}

double total_covered_area(const MapScene& scene) {
  double total = 0.0;
  for (const auto& [id, ls] : scene.lane_segments) {
    total += std::abs(signed_area(lane_polygon(ls)));
  }
  return total;
}

}  // namespace

TEST_CASE("merge: chain of equal-property segments collapses to one") {
  const MapScene scene = chain_scene(3);
  const MapScene merged = merge_elements(scene);
  REQUIRE(merged.lane_segments.size() == 1);
  const LaneSegment& ls = merged.lane_segments.begin()->second;
  CHECK(ls.id == 1);
  CHECK(ls.centerline.arc_length() ==
        doctest::Approx(total_centerline_length(scene)).epsilon(1e-9));
  CHECK(ls.successors.empty());
  CHECK(ls.predecessors.empty());
}

TEST_CASE("merge: change-status boundaries block merging") {
  MapScene scene = chain_scene(3);
  scene.lane_segments.at(2).change_hist = {"marking"};
  scene.lane_segments.at(2).is_modified = true;
  const MapScene merged = merge_elements(scene);
  CHECK(merged.lane_segments.size() == 3);
}

TEST_CASE("merge: property boundaries block merging") {
  MapScene scene = chain_scene(4);
  scene.lane_segments.at(3).lane_type = LaneType::kBus;
  const MapScene merged = merge_elements(scene);
  // 1+2 merge; 3 stays; 4 stays (its joint with 3 is blocked).
  CHECK(merged.lane_segments.size() == 3);
  CHECK(merged.lane_segments.count(1) == 1);
  CHECK(merged.lane_segments.count(3) == 1);
  CHECK(merged.lane_segments.count(4) == 1);
}

TEST_CASE("merge: fork vertices never merge") {
  MapScene scene;
  scene.scene_id = "fork";
  scene.lane_segments.emplace(1, make_lane(1, 0.0, 10.0, 0.0, 3.5));
  scene.lane_segments.emplace(2, make_lane(2, 10.0, 20.0, 0.0, 3.5));
  scene.lane_segments.emplace(3, make_lane(3, 10.0, 20.0, 3.5, 7.0));
  link(scene, 1, 2);
  link(scene, 1, 3);
  const MapScene merged = merge_elements(scene);
  CHECK(merged.lane_segments.size() == 3);
}

TEST_CASE("merge: idempotent, preserves length and area") {
  SeededRng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const MapScene scene = random_scene(rng);
    const MapScene merged = merge_elements(scene);
    CHECK(merged.lane_segments.size() <= scene.lane_segments.size());
    CHECK(total_centerline_length(merged) ==
          doctest::Approx(total_centerline_length(scene)).epsilon(1e-6));
    CHECK(total_covered_area(merged) ==
          doctest::Approx(total_covered_area(scene)).epsilon(1e-6));
    const MapScene again = merge_elements(merged);
    CHECK(serialize_map(again) == serialize_map(merged));
    CHECK(validate_scene(merged).ok());
  }
}

TEST_CASE("merge: confluence against single-joint reference in all orders") {
  for (int n : {3, 4, 5, 6}) {
    const MapScene scene = chain_scene(n);
    const MapScene merged = merge_elements(scene);
    // Apply single merges in every permutation of the joint list.
    auto joints = mergeable_joints(scene);
    std::vector<std::size_t> order(joints.size());
    std::iota(order.begin(), order.end(), 0);
    int permutations = 0;
    do {
      MapScene work = scene;
      // Joints are identified by (upstream, downstream) ids; after earlier
      // merges the upstream id may have been replaced by the chain head, so
      // re-discover the joint each step by its downstream id.
      for (std::size_t idx : order) {
        const ElementId b = joints[idx].second;
        const auto current = mergeable_joints(work);
        for (const auto& [ca, cb] : current) {
          if (cb == b) {
            work = merge_single_joint(work, ca, cb);
            break;
          }
        }
      }
      CHECK(mergeable_joints(work).empty());
      CHECK(serialize_map(work) == serialize_map(merged));
      ++permutations;
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(permutations >= 1);
  }
}

TEST_CASE("unify: canonical crossing untouched, clockwise one flipped") {
  MapScene scene;
  scene.scene_id = "s";
  scene.pedestrian_crossings.emplace(1, make_crossing(1, 5.0, 0.0, 8.0));
  const MapScene unified = unify_crossing_orientation(scene);
  CHECK(serialize_map(unified) == serialize_map(scene));  // already canonical

  MapScene flipped = scene;
  std::swap(flipped.pedestrian_crossings.at(1).left_boundary,
            flipped.pedestrian_crossings.at(1).right_boundary);
  CHECK(signed_area(crossing_polygon(flipped.pedestrian_crossings.at(1))) < 0.0);
  const MapScene fixed = unify_crossing_orientation(flipped);
  CHECK(signed_area(crossing_polygon(fixed.pedestrian_crossings.at(1))) > 0.0);

  // Geometry set-equal to the input: same polylines up to swap/reversal.
  const auto& before = flipped.pedestrian_crossings.at(1);
  const auto& after = fixed.pedestrian_crossings.at(1);
  auto same_line = [](const Polyline2D& a, const Polyline2D& b) {
    return a == b || a == b.reversed();
  };
  CHECK((same_line(after.left_boundary, before.left_boundary) ||
         same_line(after.left_boundary, before.right_boundary)));

  // Idempotence.
  CHECK(serialize_map(unify_crossing_orientation(fixed)) == serialize_map(fixed));
}

TEST_CASE("unify: reversed-boundary crossings are canonicalized") {
  MapScene scene;
  scene.scene_id = "s";
  PedestrianCrossing pc = make_crossing(1, 5.0, 0.0, 8.0);
  pc.left_boundary = pc.left_boundary.reversed();  // one boundary against flow
  scene.pedestrian_crossings.emplace(1, pc);
  const MapScene fixed = unify_crossing_orientation(scene);
  const auto& out = fixed.pedestrian_crossings.at(1);
  CHECK(signed_area(crossing_polygon(out)) > 0.0);
  // Both boundaries now run along the centerline direction.
  const Vec2 dir = out.centerline.back() - out.centerline.front();
  CHECK(dot(out.left_boundary.back() - out.left_boundary.front(), dir) > 0.0);
  CHECK(dot(out.right_boundary.back() - out.right_boundary.front(), dir) > 0.0);
}

TEST_CASE("unify: self-intersecting crossing raises GeometryError") {
  MapScene scene;
  scene.scene_id = "s";
  PedestrianCrossing pc;
  pc.id = 1;
  pc.centerline = Polyline2D{{{0.0, 0.0}, {0.0, 8.0}}};
  // Boundaries cross each other halfway: a bowtie.
  pc.left_boundary = Polyline2D{{{-1.0, 0.0}, {1.0, 8.0}}};
  pc.right_boundary = Polyline2D{{{1.0, 0.0}, {-1.0, 8.0}}};
  scene.pedestrian_crossings.emplace(1, pc);
  CHECK_THROWS_AS(unify_crossing_orientation(scene), GeometryError);
}
