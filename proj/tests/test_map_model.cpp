#include <doctest.h>

#include "lanekit/crop.hpp"
#include "lanekit/errors.hpp"
#include "lanekit/json_io.hpp"
#include "lanekit/lane_graph.hpp"
#include "lanekit/map.hpp"
#include "lanekit/rng.hpp"
#include "support.hpp"

using namespace lanekit;
using namespace lanekit::testing;

namespace {

// All 14 lane-segment fields populated, plus an unknown field that must
// survive the round trip.
constexpr const char* kFullLaneDoc = R"({
  "scene_id": "fixture",
  "lane_segments": {
    "1": {
      "id": 1,
      "is_intersection": false,
      "lane_type": "vehicle",
      "left_lane_boundary": [[0.0, 3.5], [30.0, 3.5]],
      "right_lane_boundary": [[0.0, 0.0], [30.0, 0.0]],
      "centerline": [[0.0, 1.75], [30.0, 1.75]],
      "left_lane_mark_type": {"mark": "dashed", "color": "white"},
      "right_lane_mark_type": {"mark": "solid", "color": "yellow"},
      "successors": [2],
      "predecessors": [],
      "left_neighbor_id": null,
      "right_neighbor_id": null,
      "is_modified": true,
      "change_hist": ["marking"],
      "height_source": "lidar"
    },
    "2": {
      "id": 2,
      "is_intersection": true,
      "lane_type": "bus",
      "left_lane_boundary": [[30.0, 3.5], [60.0, 3.5]],
      "right_lane_boundary": [[30.0, 0.0], [60.0, 0.0]],
      "centerline": [[30.0, 1.75], [60.0, 1.75]],
      "left_lane_mark_type": {"mark": "none", "color": "non-visible"},
      "right_lane_mark_type": {"mark": "double-solid", "color": "white"},
      "successors": [],
      "predecessors": [1],
      "left_neighbor_id": null,
      "right_neighbor_id": null,
      "is_modified": false,
      "change_hist": []
    }
  },
  "pedestrian_crossings": {}
})";

}  // namespace

TEST_CASE("parse: minimal valid document") {
  const MapScene scene = parse_map(
      R"({"scene_id":"s","lane_segments":{"1":{"id":1,"is_intersection":false,
      "lane_type":"vehicle","left_lane_boundary":[[0,1],[5,1]],
      "right_lane_boundary":[[0,0],[5,0]],"centerline":[[0,0.5],[5,0.5]],
      "left_lane_mark_type":{"mark":"solid","color":"white"},
      "right_lane_mark_type":{"mark":"solid","color":"white"},
      "successors":[],"predecessors":[],"left_neighbor_id":null,
      "right_neighbor_id":null,"is_modified":false,"change_hist":[]}},
      "pedestrian_crossings":{}})");
  CHECK(scene.lane_segments.size() == 1);
  CHECK(scene.pedestrian_crossings.empty());
}

TEST_CASE("parse: dangling successor id names the offender") {
  const std::string doc =
      R"({"scene_id":"s","lane_segments":{"1":{"id":1,"is_intersection":false,
      "lane_type":"vehicle","left_lane_boundary":[[0,1],[5,1]],
      "right_lane_boundary":[[0,0],[5,0]],"centerline":[[0,0.5],[5,0.5]],
      "left_lane_mark_type":{"mark":"solid","color":"white"},
      "right_lane_mark_type":{"mark":"solid","color":"white"},
      "successors":[99],"predecessors":[],"left_neighbor_id":null,
      "right_neighbor_id":null,"is_modified":false,"change_hist":[]}},
      "pedestrian_crossings":{}})";
  try {
    parse_map(doc);
    FAIL("expected IntegrityError");
  } catch (const IntegrityError& e) {
    CHECK(e.id() == 99);
  }
}

TEST_CASE("parse: schema errors carry the JSON path") {
  try {
    parse_map(R"({"scene_id":"s","lane_segments":{"1":{"id":1}},
                  "pedestrian_crossings":{}})");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path().find("/lane_segments/1") != std::string::npos);
  }
}

TEST_CASE("parse: degenerate polyline raises GeometryError") {
  CHECK_THROWS_AS(
      parse_map(
          R"({"scene_id":"s","lane_segments":{"1":{"id":1,"is_intersection":false,
          "lane_type":"vehicle","left_lane_boundary":[[0,1]],
          "right_lane_boundary":[[0,0],[5,0]],"centerline":[[0,0.5],[5,0.5]],
          "left_lane_mark_type":{"mark":"solid","color":"white"},
          "right_lane_mark_type":{"mark":"solid","color":"white"},
          "successors":[],"predecessors":[],"left_neighbor_id":null,
          "right_neighbor_id":null,"is_modified":false,"change_hist":[]}},
          "pedestrian_crossings":{}})"),
      GeometryError);
}

TEST_CASE("round trip: full-schema fixture is lossless") {
  const MapScene scene = parse_map(kFullLaneDoc);
  const LaneSegment& ls = scene.lane_segments.at(1);
  CHECK(ls.successors == std::vector<ElementId>{2});
  CHECK(ls.left_mark.mark == MarkType::kDashed);
  CHECK(ls.extra.at("height_source") == "lidar");
  CHECK(ls.is_modified);
  CHECK(ls.change_hist == std::vector<std::string>{"marking"});

  // serialize(parse(x)) is the canonical form; a second round trip is the
  // identity on it byte for byte.
  const std::string canonical = serialize_map(scene);
  CHECK(serialize_map(parse_map(canonical)) == canonical);
  CHECK(canonical.find("height_source") != std::string::npos);
}

TEST_CASE("serialize: empty scene") {
  MapScene scene;
  scene.scene_id = "empty";
  const std::string bytes = serialize_map(scene);
  CHECK(bytes.find("\"lane_segments\":{}") != std::string::npos);
  CHECK(bytes.find("\"pedestrian_crossings\":{}") != std::string::npos);
}

TEST_CASE("serialize: parse/serialize identities on 1000 random scenes") {
  SeededRng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const MapScene scene = random_scene(rng);
    const std::string once = serialize_map(scene);
    CHECK(serialize_map(parse_map(once)) == once);
  }
}

TEST_CASE("serialize: document ordering never leaks into the output") {
  // The same scene with its element objects listed in a different order
  // serializes to identical bytes.
  const char* ordered =
      R"({"scene_id":"s","lane_segments":{},"pedestrian_crossings":{
      "3":{"id":3,"left_lane_boundary":[[0,0],[0,5]],
           "right_lane_boundary":[[2,0],[2,5]],"centerline":[[1,0],[1,5]],
           "is_modified":false,"change_hist":[]},
      "8":{"id":8,"left_lane_boundary":[[10,0],[10,5]],
           "right_lane_boundary":[[12,0],[12,5]],"centerline":[[11,0],[11,5]],
           "is_modified":false,"change_hist":[]}}})";
  const char* shuffled =
      R"({"pedestrian_crossings":{
      "8":{"change_hist":[],"is_modified":false,"centerline":[[11,0],[11,5]],
           "right_lane_boundary":[[12,0],[12,5]],
           "left_lane_boundary":[[10,0],[10,5]],"id":8},
      "3":{"id":3,"left_lane_boundary":[[0,0],[0,5]],
           "right_lane_boundary":[[2,0],[2,5]],"centerline":[[1,0],[1,5]],
           "is_modified":false,"change_hist":[]}},
      "lane_segments":{},"scene_id":"s"})";
  CHECK(serialize_map(parse_map(ordered)) == serialize_map(parse_map(shuffled)));
}

TEST_CASE("serialize: fixed 3-decimal float formatting") {
  CHECK(format_fixed3(1.0) == "1.000");
  CHECK(format_fixed3(-0.00004) == "0.000");
  CHECK(format_fixed3(2.71828) == "2.718");
}

TEST_CASE("validate: valid scene yields an empty report") {
  SeededRng rng(12);
  const MapScene scene = random_scene(rng);
  CHECK(validate_scene(scene).ok());
}

TEST_CASE("validate: predecessor asymmetry is reported") {
  MapScene scene = chain_scene(2);
  scene.lane_segments.at(2).predecessors.clear();  // break symmetry
  const ValidationReport report = validate_scene(scene);
  CHECK(report.by_rule("predecessor-successor-symmetry").size() == 1);
}

TEST_CASE("validate: clockwise crossing flagged as warning") {
  MapScene scene;
  scene.scene_id = "s";
  PedestrianCrossing pc = make_crossing(5, 10.0, 0.0, 7.0);
  std::swap(pc.left_boundary, pc.right_boundary);  // flips orientation
  scene.pedestrian_crossings.emplace(5, pc);
  const ValidationReport report = validate_scene(scene);
  const auto violations = report.by_rule("canonical-orientation");
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].severity == Severity::kWarning);
  // Shoelace sign confirms the flag.
  CHECK(signed_area(crossing_polygon(pc)) < 0.0);
}

TEST_CASE("validate: modified flag must match the history") {
  MapScene scene = chain_scene(1);
  scene.lane_segments.at(1).is_modified = true;
  CHECK(validate_scene(scene).by_rule("modified-flag-consistency").size() == 1);
}

TEST_CASE("crop: inside, outside, boundary") {
  MapScene scene;
  scene.scene_id = "s";
  scene.lane_segments.emplace(1, make_lane(1, -10.0, 10.0, 0.0, 3.0));   // inside
  scene.lane_segments.emplace(2, make_lane(2, 100.0, 120.0, 0.0, 3.0));  // outside
  scene.lane_segments.emplace(3, make_lane(3, -10.0, 100.0, 5.0, 8.0));  // crossing
  const EgoPose pose{0, 0.0, 0.0, 0.0};
  const MapScene patch = crop_patch(scene, pose, 50.0);

  REQUIRE(patch.lane_segments.count(1) == 1);
  CHECK(patch.lane_segments.count(2) == 0);
  REQUIRE(patch.lane_segments.count(3) == 1);

  // Fully-inside element passes through unmodified.
  CHECK(patch.lane_segments.at(1).centerline == scene.lane_segments.at(1).centerline);

  // Clipped element stays within the box (+1e-9 slack), densely checked.
  const LaneSegment& clipped = patch.lane_segments.at(3);
  for (const Polyline2D* p :
       {&clipped.left_boundary, &clipped.right_boundary, &clipped.centerline}) {
    const Polyline2D dense = resample_polyline(*p, 200);
    for (const Vec2& v : dense.points) {
      CHECK(std::abs(v.x) <= 25.0 + 1e-9);
      CHECK(std::abs(v.y) <= 25.0 + 1e-9);
    }
  }
}

TEST_CASE("crop: rotated frame and idempotence") {
  MapScene scene;
  scene.scene_id = "s";
  scene.lane_segments.emplace(1, make_lane(1, -40.0, 40.0, -2.0, 2.0, 9));
  const EgoPose pose{0, 5.0, 1.0, 0.3};
  const MapScene patch = crop_patch(scene, pose, 30.0);
  REQUIRE(patch.lane_segments.count(1) == 1);

  // The patch is in its own ego frame; cropping again from the origin with
  // the same extent changes nothing.
  const EgoPose origin{0, 0.0, 0.0, 0.0};
  const MapScene again = crop_patch(patch, origin, 30.0);
  CHECK(serialize_map(again) == serialize_map(patch));
}

TEST_CASE("crop: connectivity restricted to retained elements") {
  MapScene scene = chain_scene(3, 30.0);  // segments span x in [0, 90]
  const EgoPose pose{0, 15.0, 1.75, 0.0};
  const MapScene patch = crop_patch(scene, pose, 40.0);
  REQUIRE(patch.lane_segments.count(1) == 1);
  REQUIRE(patch.lane_segments.count(2) == 1);
  CHECK(patch.lane_segments.count(3) == 0);
  CHECK(patch.lane_segments.at(2).successors.empty());
  CHECK(patch.lane_segments.at(2).predecessors == std::vector<ElementId>{1});
}

TEST_CASE("lane graph: chain, fork, isolated") {
  // Chain of 2: 3 vertices, 2 edges.
  {
    const LaneGraph g = build_lane_graph(chain_scene(2));
    CHECK(g.edge_count() == 2);
    CHECK(g.vertex_count() == 3);
  }
  // Fork: one segment with two successors -> 3 edges, 4 vertices, fork
  // vertex of degree 3.
  {
    MapScene scene;
    scene.scene_id = "fork";
    scene.lane_segments.emplace(1, make_lane(1, 0.0, 10.0, 0.0, 3.0));
    scene.lane_segments.emplace(2, make_lane(2, 10.0, 20.0, 0.0, 3.0));
    scene.lane_segments.emplace(3, make_lane(3, 10.0, 20.0, 3.0, 6.0));
    link(scene, 1, 2);
    link(scene, 1, 3);
    const LaneGraph g = build_lane_graph(scene);
    CHECK(g.edge_count() == 3);
    CHECK(g.vertex_count() == 4);
    const int fork = g.vertex_of({1, EndpointSlot::kEnd});
    CHECK(g.degree(fork) == 3);
  }
  // Isolated segment: 2 vertices of degree 1.
  {
    MapScene scene;
    scene.scene_id = "iso";
    scene.lane_segments.emplace(1, make_lane(1, 0.0, 10.0, 0.0, 3.0));
    const LaneGraph g = build_lane_graph(scene);
    CHECK(g.edge_count() == 1);
    CHECK(g.vertex_count() == 2);
    CHECK(g.degree(0) == 1);
    CHECK(g.degree(1) == 1);
  }
}

TEST_CASE("lane graph: junction membership matches connectivity lists") {
  SeededRng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const MapScene scene = random_scene(rng);
    const LaneGraph g = build_lane_graph(scene);
    CHECK(g.edge_count() == scene.lane_segments.size());

    for (const auto& [id, ls] : scene.lane_segments) {
      const int sv = g.vertex_of({id, EndpointSlot::kStart});
      const int ev = g.vertex_of({id, EndpointSlot::kEnd});
      REQUIRE(sv >= 0);
      REQUIRE(ev >= 0);
      for (ElementId p : ls.predecessors) {
        CHECK(g.vertex_of({p, EndpointSlot::kEnd}) == sv);
      }
      for (ElementId s : ls.successors) {
        CHECK(g.vertex_of({s, EndpointSlot::kStart}) == ev);
      }
    }
  }
}

TEST_CASE("parse: mutated documents fail cleanly, never crash") {
  SeededRng rng(1717);
  const MapScene scene = random_scene(rng);
  const std::string canonical = serialize_map(scene);
  int parsed_ok = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::string doc = canonical;
    const int mode = static_cast<int>(rng.below(3));
    if (mode == 0) {
      doc.resize(rng.below(doc.size()));  // truncate
    } else if (mode == 1) {
      doc[rng.below(doc.size())] =
          static_cast<char>("{}[]:,x0\"."[rng.below(10)]);  // corrupt one byte
    } else {
      doc.insert(rng.below(doc.size()), "\"");  // unbalance a quote
    }
    try {
      parse_map(doc);
      ++parsed_ok;  // a benign mutation (e.g. inside a string) may survive
    } catch (const MapError&) {
      // SchemaError / IntegrityError / GeometryError are the contract.
    }
  }
  CHECK(parsed_ok < 400);  // the mutations did bite
}

TEST_CASE("poses: parse and strict ordering") {
  const auto poses = parse_poses(
      R"([{"timestamp_ns": 1, "x": 0.0, "y": 1.0, "heading_rad": 0.1},
          {"timestamp_ns": 2, "x": 5.0, "y": 1.0, "heading_rad": 0.1}])");
  REQUIRE(poses.size() == 2);
  CHECK(poses[1].x == 5.0);
  CHECK_THROWS_AS(
      parse_poses(R"([{"timestamp_ns": 2, "x": 0, "y": 0, "heading_rad": 0},
                      {"timestamp_ns": 1, "x": 1, "y": 0, "heading_rad": 0}])"),
      SchemaError);
}
