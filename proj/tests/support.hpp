// Shared fixtures: deterministic scene builders, randomized scene/frame
// generators, and the canonical-form annotation scenarios used by both the unit
// and acceptance suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lanekit/change.hpp"
#include "lanekit/diff.hpp"
#include "lanekit/eval.hpp"
#include "lanekit/json_io.hpp"
#include "lanekit/map.hpp"
#include "lanekit/rng.hpp"

namespace lanekit::testing {

inline double snap_mm(double v) { return std::round(v * 1000.0) / 1000.0; }

inline Polyline2D snap(Polyline2D p) {
  for (Vec2& v : p.points) {
    v.x = snap_mm(v.x);
    v.y = snap_mm(v.y);
  }
  return p;
}

// Straight polyline from (x0, y) to (x1, y) with n points.
inline Polyline2D straight(double x0, double x1, double y, int n = 4) {
  Polyline2D p;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    p.points.push_back({snap_mm(x0 + (x1 - x0) * t), snap_mm(y)});
  }
  return p;
}

// Lane along +x spanning y in [y_right, y_left] (left boundary is the upper
// one: driving direction +x has left = +y).
inline LaneSegment make_lane(ElementId id, double x0, double x1, double y_right,
                             double y_left, int n = 4) {
  LaneSegment ls;
  ls.id = id;
  ls.left_boundary = straight(x0, x1, y_left, n);
  ls.right_boundary = straight(x0, x1, y_right, n);
  ls.centerline = straight(x0, x1, (y_left + y_right) / 2.0, n);
  ls.left_mark = {MarkType::kDashed, MarkColor::kWhite};
  ls.right_mark = {MarkType::kSolid, MarkColor::kWhite};
  return ls;
}

inline PedestrianCrossing make_crossing(ElementId id, double x, double y0,
                                        double y1, double width = 3.0) {
  PedestrianCrossing pc;
  pc.id = id;
  // Crossing runs across the road (along +y); left of +y is -x.
  pc.centerline = Polyline2D{{{snap_mm(x), snap_mm(y0)}, {snap_mm(x), snap_mm(y1)}}};
  pc.left_boundary = Polyline2D{{{snap_mm(x - width / 2), snap_mm(y0)},
                                 {snap_mm(x - width / 2), snap_mm(y1)}}};
  pc.right_boundary = Polyline2D{{{snap_mm(x + width / 2), snap_mm(y0)},
                                  {snap_mm(x + width / 2), snap_mm(y1)}}};
  return pc;
}

inline void link(MapScene& scene, ElementId from, ElementId to) {
  auto& a = scene.lane_segments.at(from);
  auto& b = scene.lane_segments.at(to);
  if (std::find(a.successors.begin(), a.successors.end(), to) == a.successors.end()) {
    a.successors.push_back(to);
    std::sort(a.successors.begin(), a.successors.end());
  }
  if (std::find(b.predecessors.begin(), b.predecessors.end(), from) ==
      b.predecessors.end()) {
    b.predecessors.push_back(from);
    std::sort(b.predecessors.begin(), b.predecessors.end());
  }
}

inline void lateral(MapScene& scene, ElementId right_lane, ElementId left_lane) {
  scene.lane_segments.at(right_lane).left_neighbor = left_lane;
  scene.lane_segments.at(left_lane).right_neighbor = right_lane;
}

// Chain of n equal-property segments along +x.
inline MapScene chain_scene(int n, double segment_length = 10.0) {
  MapScene scene;
  scene.scene_id = "chain";
  for (int i = 0; i < n; ++i) {
    const double x0 = segment_length * i;
    scene.lane_segments.emplace(
        i + 1, make_lane(i + 1, x0, x0 + segment_length, 0.0, 3.5));
  }
  for (int i = 1; i < n; ++i) link(scene, i, i + 1);
  return scene;
}

struct RandomSceneOptions {
  int max_roads = 2;
  int max_lanes = 3;
  int min_chain = 1;
  int max_chain = 3;
  int max_crossings = 2;
  bool intersections = true;
};

// Structured random scene: parallel roads of lane chains with neighbor
// links, optional intersection columns and crossings. All coordinates on the
// millimeter grid, all invariants satisfied.
inline MapScene random_scene(SeededRng& rng, const RandomSceneOptions& opt = {}) {
  MapScene scene;
  scene.scene_id = "synthetic-" + std::to_string(rng.next_u64() % 100000);
  const int roads = 1 + static_cast<int>(rng.below(opt.max_roads));
  ElementId next_id = 1;
  const std::vector<LaneMarkType> marks = {
      {MarkType::kDashed, MarkColor::kWhite},
      {MarkType::kSolid, MarkColor::kWhite},
      {MarkType::kSolid, MarkColor::kYellow},
      {MarkType::kDoubleDashed, MarkColor::kWhite},
      {MarkType::kNone, MarkColor::kNonVisible},
  };
  for (int r = 0; r < roads; ++r) {
    const double base_y = 40.0 * r;
    const int lanes = 1 + static_cast<int>(rng.below(opt.max_lanes));
    const int chain =
        opt.min_chain +
        static_cast<int>(rng.below(opt.max_chain - opt.min_chain + 1));
    const double seg_len = 15.0 + 5.0 * static_cast<double>(rng.below(3));
    // One chain column may be an intersection region.
    const int intersection_col =
        opt.intersections && chain > 1 && rng.uniform() < 0.4
            ? static_cast<int>(rng.below(chain))
            : -1;
    std::vector<std::vector<ElementId>> grid(lanes, std::vector<ElementId>(chain));
    for (int l = 0; l < lanes; ++l) {
      for (int s = 0; s < chain; ++s) {
        const double x0 = seg_len * s;
        LaneSegment ls = make_lane(next_id, x0, x0 + seg_len, base_y + 3.5 * l,
                                   base_y + 3.5 * (l + 1),
                                   3 + static_cast<int>(rng.below(3)));
        ls.is_intersection = s == intersection_col;
        ls.lane_type = rng.uniform() < 0.1 ? LaneType::kBus : LaneType::kVehicle;
        ls.left_mark = marks[rng.below(marks.size())];
        ls.right_mark = l == 0 && rng.uniform() < 0.3
                            ? LaneMarkType{MarkType::kNone, MarkColor::kNonVisible}
                            : marks[rng.below(marks.size())];
        grid[l][s] = next_id;
        scene.lane_segments.emplace(next_id, std::move(ls));
        ++next_id;
      }
    }
    for (int l = 0; l < lanes; ++l) {
      for (int s = 0; s + 1 < chain; ++s) link(scene, grid[l][s], grid[l][s + 1]);
    }
    for (int l = 0; l + 1 < lanes; ++l) {
      for (int s = 0; s < chain; ++s) lateral(scene, grid[l][s], grid[l + 1][s]);
    }
    const int crossings = static_cast<int>(rng.below(opt.max_crossings + 1));
    for (int c = 0; c < crossings; ++c) {
      const double x = snap_mm(rng.uniform(2.0, seg_len * chain - 2.0));
      scene.pedestrian_crossings.emplace(
          next_id, make_crossing(next_id, x, base_y - 0.5,
                                 base_y + 3.5 * lanes + 0.5,
                                 snap_mm(rng.uniform(2.0, 4.0))));
      ++next_id;
    }
  }
  return scene;
}

// Straight drive along the first road's middle.
inline std::vector<EgoPose> straight_trajectory(double x0, double x1, double y,
                                                int count = 6) {
  std::vector<EgoPose> poses;
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / std::max(1, count - 1);
    poses.push_back({static_cast<std::int64_t>(i) * 100000000 + 1,
                     x0 + (x1 - x0) * t, y, 0.0});
  }
  return poses;
}

// --- annotation-path scenarios ----------------------------------------------

// Road widening fixture (2 lanes -> 3 lanes in the same corridor). The three
// annotation paths lead to geometrically identical final states but
// different id assignments:
//   top:     existing lanes shift left, the new rightmost lane is inserted
//   central: existing lanes shift right, the new leftmost lane is inserted
//   bottom:  everything is deleted and re-inserted
// Driving direction is +x, so "right" is -y; lanes are stacked bottom-up.
struct WideningScenario {
  MapScene prior;
  MapScene gt;
  ChangeSet cs;
};

inline MapScene widening_prior() {
  MapScene prior;
  prior.scene_id = "widening";
  prior.lane_segments.emplace(1, make_lane(1, 0.0, 30.0, 0.0, 3.0));
  prior.lane_segments.emplace(2, make_lane(2, 0.0, 30.0, 3.0, 6.0));
  lateral(prior, 1, 2);
  return prior;
}

inline MapScene widening_gt(const std::vector<ElementId>& ids_bottom_up) {
  MapScene gt;
  gt.scene_id = "widening";
  const double lane_width = 2.0;
  for (std::size_t i = 0; i < ids_bottom_up.size(); ++i) {
    const double y0 = lane_width * static_cast<double>(i);
    gt.lane_segments.emplace(ids_bottom_up[i],
                             make_lane(ids_bottom_up[i], 0.0, 30.0, y0,
                                       y0 + lane_width));
  }
  for (std::size_t i = 0; i + 1 < ids_bottom_up.size(); ++i) {
    lateral(gt, ids_bottom_up[i], ids_bottom_up[i + 1]);
  }
  return gt;
}

inline WideningScenario widening_top_path() {
  WideningScenario s;
  s.prior = widening_prior();
  s.gt = widening_gt({3, 1, 2});  // insertion takes the rightmost slot
  s.cs = diff_maps(s.prior, s.gt);
  return s;
}

inline WideningScenario widening_central_path() {
  WideningScenario s;
  s.prior = widening_prior();
  s.gt = widening_gt({1, 2, 3});  // insertion ends up leftmost
  s.cs = diff_maps(s.prior, s.gt);
  return s;
}

inline WideningScenario widening_bottom_path() {
  WideningScenario s;
  s.prior = widening_prior();
  s.gt = widening_gt({3, 4, 5});  // full replacement
  s.cs = diff_maps(s.prior, s.gt);
  return s;
}

// Bike-lane conversion: a bike lane turns into an additional vehicle lane via
// type + geometry edits on the bike lane and a marking edit on its neighbor.
struct BikeConversionScenario {
  MapScene prior;
  MapScene gt;
};

inline BikeConversionScenario bike_conversion() {
  BikeConversionScenario s;
  s.prior.scene_id = "bike-conversion";
  s.prior.lane_segments.emplace(1, make_lane(1, 0.0, 30.0, 0.0, 3.5));
  s.prior.lane_segments.emplace(2, make_lane(2, 0.0, 30.0, 3.5, 7.0));
  LaneSegment bike = make_lane(9, 0.0, 30.0, 7.0, 8.5);
  bike.lane_type = LaneType::kBike;
  s.prior.lane_segments.emplace(9, std::move(bike));
  lateral(s.prior, 1, 2);
  lateral(s.prior, 2, 9);

  s.gt = s.prior;
  LaneSegment& converted = s.gt.lane_segments.at(9);
  converted.lane_type = LaneType::kVehicle;
  converted.left_boundary = straight(0.0, 30.0, 10.5);  // widened
  converted.centerline = straight(0.0, 30.0, 8.75);
  // The old bike separator becomes a regular dashed lane divider.
  LaneSegment& neighbor = s.gt.lane_segments.at(2);
  neighbor.left_mark = {MarkType::kSolid, MarkColor::kYellow};
  return s;
}

// --- evaluation fixtures -----------------------------------------------

inline ElementGeometry random_geometry(SeededRng& rng, Vec2 anchor) {
  const double len = rng.uniform(5.0, 15.0);
  const double width = rng.uniform(2.5, 4.0);
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  const Vec2 dir{std::cos(angle), std::sin(angle)};
  const Vec2 normal{-dir.y, dir.x};
  ElementGeometry g;
  auto line = [&](double offset) {
    Polyline2D p;
    for (int i = 0; i < 10; ++i) {
      const double t = len * i / 9.0;
      p.points.push_back(anchor + dir * t + normal * offset);
    }
    return p;
  };
  g.left = line(width / 2.0);
  g.right = line(-width / 2.0);
  g.center = line(0.0);
  return g;
}

inline ElementGeometry jitter(const ElementGeometry& g, SeededRng& rng,
                              double sigma) {
  ElementGeometry out = g;
  const Vec2 drift{rng.normal(0.0, sigma), rng.normal(0.0, sigma)};
  for (Polyline2D* p : {&out.left, &out.right, &out.center}) {
    for (Vec2& v : p->points) v = v + drift;
  }
  return out;
}

inline ElementStatus random_status(SeededRng& rng) {
  ElementStatus st;
  const double u = rng.uniform();
  if (u < 0.45) {
    st.primary = ElementStatus::Primary::kNoChange;
  } else if (u < 0.6) {
    st.primary = ElementStatus::Primary::kInsertion;
  } else if (u < 0.75) {
    st.primary = ElementStatus::Primary::kDeletion;
  } else {
    st.primary = ElementStatus::Primary::kOther;
    st.geo = rng.uniform() < 0.7;
    st.mark = !st.geo || rng.uniform() < 0.5;
  }
  return st;
}

struct RandomFrameOptions {
  int max_elements = 8;      // ground-truth elements per frame
  double miss_rate = 0.2;    // gt without any prediction
  double spurious_rate = 0.2;  // predictions without gt
  double label_flip_rate = 0.15;
  double geometry_noise = 0.6;
};

inline FrameSample random_frame(SeededRng& rng, std::string frame_id,
                                const RandomFrameOptions& opt = {}) {
  FrameSample frame;
  frame.frame_id = std::move(frame_id);
  const int n = 1 + static_cast<int>(rng.below(opt.max_elements));
  for (int i = 0; i < n; ++i) {
    GtElement gt;
    gt.kind = rng.uniform() < 0.7 ? MapElementKind::kLaneSegment
                                  : MapElementKind::kPedestrianCrossing;
    gt.geometry = random_geometry(
        rng, {rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)});
    gt.status = random_status(rng);
    frame.ground_truth.push_back(gt);

    if (rng.uniform() >= opt.miss_rate) {
      PredictedElement pred;
      pred.kind = gt.kind;
      pred.geometry = jitter(gt.geometry, rng, opt.geometry_noise);
      pred.status = rng.uniform() < opt.label_flip_rate ? random_status(rng)
                                                        : gt.status;
      pred.confidence = rng.uniform(0.05, 1.0);
      frame.predictions.push_back(pred);
    }
  }
  const int spurious = static_cast<int>(rng.below(
      static_cast<std::uint64_t>(opt.spurious_rate * opt.max_elements) + 1));
  for (int i = 0; i < spurious; ++i) {
    PredictedElement pred;
    pred.kind = rng.uniform() < 0.7 ? MapElementKind::kLaneSegment
                                    : MapElementKind::kPedestrianCrossing;
    pred.geometry = random_geometry(
        rng, {rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)});
    pred.status = random_status(rng);
    pred.confidence = rng.uniform(0.05, 1.0);
    frame.predictions.push_back(pred);
  }
  return frame;
}

inline std::vector<FrameSample> random_frames(SeededRng& rng, int count,
                                              const RandomFrameOptions& opt = {}) {
  std::vector<FrameSample> frames;
  for (int i = 0; i < count; ++i) {
    frames.push_back(random_frame(rng, "f" + std::to_string(i), opt));
  }
  return frames;
}

// Perfect predictor: every gt element echoed with confidence 1.
inline std::vector<FrameSample> perfect_frames(const std::vector<FrameSample>& frames) {
  std::vector<FrameSample> out = frames;
  for (FrameSample& f : out) {
    f.predictions.clear();
    for (const GtElement& g : f.ground_truth) {
      f.predictions.push_back({g.kind, g.geometry, 1.0, g.status});
    }
  }
  return out;
}

// Scene equality ignoring is_modified/change_hist bookkeeping.
inline MapScene without_annotations(MapScene scene) {
  for (auto& [id, ls] : scene.lane_segments) {
    ls.is_modified = false;
    ls.change_hist.clear();
  }
  for (auto& [id, pc] : scene.pedestrian_crossings) {
    pc.is_modified = false;
    pc.change_hist.clear();
  }
  return scene;
}

inline bool equal_ignoring_annotations(const MapScene& a, const MapScene& b) {
  return serialize_map(without_annotations(a)) == serialize_map(without_annotations(b));
}

}  // namespace lanekit::testing
