// Test-only reference merger: applies one mergeable joint at a time in a
// caller-chosen order. Used to check order-permutation confluence of the
// library's one-pass merge.
#pragma once

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "lanekit/lane_graph.hpp"
#include "lanekit/map.hpp"

namespace lanekit::testing {

inline bool merge_properties_equal(const LaneSegment& a, const LaneSegment& b) {
  auto kinds = [](const std::vector<std::string>& hist) {
    return std::set<std::string>(hist.begin(), hist.end());
  };
  return a.lane_type == b.lane_type && a.left_mark == b.left_mark &&
         a.right_mark == b.right_mark && a.is_intersection == b.is_intersection &&
         kinds(a.change_hist) == kinds(b.change_hist);
}

inline std::vector<std::pair<ElementId, ElementId>> mergeable_joints(
    const MapScene& scene) {
  std::vector<std::pair<ElementId, ElementId>> joints;
  const LaneGraph g = build_lane_graph(scene);
  for (const auto& cls : g.vertices) {
    if (cls.size() != 2) continue;
    EndpointSlot first = cls[0];
    EndpointSlot second = cls[1];
    if (first.end == second.end) continue;
    if (first.end == EndpointSlot::kStart) std::swap(first, second);
    if (first.segment == second.segment) continue;
    if (merge_properties_equal(scene.lane_segments.at(first.segment),
                               scene.lane_segments.at(second.segment))) {
      joints.emplace_back(first.segment, second.segment);
    }
  }
  std::sort(joints.begin(), joints.end());
  return joints;
}

// Merges exactly the joint a -> b, keeping a's id.
inline MapScene merge_single_joint(MapScene scene, ElementId a_id, ElementId b_id) {
  LaneSegment a = scene.lane_segments.at(a_id);
  const LaneSegment b = scene.lane_segments.at(b_id);
  auto concat = [](Polyline2D& lhs, const Polyline2D& rhs) {
    std::size_t start = distance(lhs.back(), rhs.front()) <= 1e-6 ? 1 : 0;
    for (std::size_t i = start; i < rhs.size(); ++i) lhs.points.push_back(rhs[i]);
  };
  concat(a.left_boundary, b.left_boundary);
  concat(a.right_boundary, b.right_boundary);
  concat(a.centerline, b.centerline);
  a.successors = b.successors;
  scene.lane_segments.erase(b_id);
  scene.lane_segments.erase(a_id);
  for (auto& [id, ls] : scene.lane_segments) {
    for (auto* list : {&ls.successors, &ls.predecessors}) {
      for (ElementId& ref : *list) {
        if (ref == b_id) ref = a_id;
      }
      std::sort(list->begin(), list->end());
      list->erase(std::unique(list->begin(), list->end()), list->end());
    }
    if (ls.left_neighbor == b_id) ls.left_neighbor = a_id;
    if (ls.right_neighbor == b_id) ls.right_neighbor = a_id;
  }
  for (ElementId& s : a.successors) {
    if (s == b_id) s = a_id;
  }
  std::sort(a.successors.begin(), a.successors.end());
  scene.lane_segments.emplace(a_id, std::move(a));
  return scene;
}

}  // namespace lanekit::testing
