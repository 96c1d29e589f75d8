#include "lanekit/merge.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lanekit/errors.hpp"
#include "lanekit/lane_graph.hpp"

namespace lanekit {

namespace {

std::set<std::string> hist_kinds(const std::vector<std::string>& hist) {
  return {hist.begin(), hist.end()};
}

bool properties_match(const LaneSegment& a, const LaneSegment& b,
                      const MergePolicy& policy) {
  if (policy.require_lane_type && a.lane_type != b.lane_type) return false;
  if (policy.require_marks &&
      (a.left_mark != b.left_mark || a.right_mark != b.right_mark)) {
    return false;
  }
  if (policy.require_intersection_flag && a.is_intersection != b.is_intersection) {
    return false;
  }
  if (policy.require_change_status &&
      hist_kinds(a.change_hist) != hist_kinds(b.change_hist)) {
    return false;
  }
  return true;
}

Polyline2D concat_dropping_joint(const Polyline2D& a, const Polyline2D& b,
                                 double tol) {
  Polyline2D out = a;
  std::size_t start = 0;
  if (!a.empty() && !b.empty() && distance(a.back(), b.front()) <= tol) {
    start = 1;
  }
  for (std::size_t i = start; i < b.size(); ++i) out.points.push_back(b[i]);
  return out;
}

}  // namespace

MapScene merge_elements(const MapScene& scene, const MergePolicy& policy) {
  const LaneGraph graph = build_lane_graph(scene);

  // Mergeable joints: degree-2 junctions of the form end(a) ~ start(b) with
  // matching properties.
  std::map<ElementId, ElementId> next_of;  // a -> b across a mergeable joint
  std::map<ElementId, ElementId> prev_of;
  for (const auto& cls : graph.vertices) {
    if (cls.size() != 2) continue;
    EndpointSlot first = cls[0];
    EndpointSlot second = cls[1];
    if (first.end == second.end) continue;  // head-to-head or tail-to-tail
    if (first.end == EndpointSlot::kStart) std::swap(first, second);
    const ElementId a = first.segment;   // ends here
    const ElementId b = second.segment;  // starts here
    if (a == b) continue;                // self loop
    if (!properties_match(scene.lane_segments.at(a), scene.lane_segments.at(b),
                          policy)) {
      continue;
    }
    next_of[a] = b;
    prev_of[b] = a;
  }

  // Build maximal chains. A chain head has no mergeable incoming joint; pure
  // cycles are broken at their minimal id.
  std::map<ElementId, ElementId> chain_of;  // member -> head id
  std::vector<std::pair<ElementId, std::vector<ElementId>>> chains;
  std::set<ElementId> visited;
  for (const auto& [id, ls] : scene.lane_segments) {
    if (visited.count(id) > 0) continue;
    if (next_of.count(id) == 0 && prev_of.count(id) == 0) {
      visited.insert(id);
      continue;  // not part of any chain
    }
    // Walk back to the head (or detect a cycle).
    ElementId head = id;
    std::set<ElementId> seen{head};
    while (prev_of.count(head) > 0) {
      head = prev_of.at(head);
      if (!seen.insert(head).second) {
        // Cycle: break at the minimal id.
        head = *std::min_element(seen.begin(), seen.end());
        break;
      }
    }
    std::vector<ElementId> members{head};
    visited.insert(head);
    ElementId cur = head;
    while (next_of.count(cur) > 0) {
      const ElementId nxt = next_of.at(cur);
      if (nxt == head) break;  // closed the cycle
      members.push_back(nxt);
      visited.insert(nxt);
      cur = nxt;
    }
    chains.emplace_back(head, members);
    for (ElementId m : members) chain_of[m] = head;
  }

  // Identity mapping for untouched segments.
  std::map<ElementId, ElementId> new_id;
  for (const auto& [id, ls] : scene.lane_segments) {
    auto it = chain_of.find(id);
    new_id[id] = it == chain_of.end() ? id : it->second;
  }

  MapScene out;
  out.scene_id = scene.scene_id;
  out.extra = scene.extra;
  out.pedestrian_crossings = scene.pedestrian_crossings;

  auto map_ids = [&](const std::vector<ElementId>& ids) {
    std::vector<ElementId> mapped;
    for (ElementId id : ids) {
      const ElementId m = new_id.at(id);
      if (std::find(mapped.begin(), mapped.end(), m) == mapped.end()) {
        mapped.push_back(m);
      }
    }
    std::sort(mapped.begin(), mapped.end());
    return mapped;
  };
  // Members of a chain may disagree on their lateral neighbor; keep the
  // value only when unambiguous after id mapping.
  auto map_neighbor = [&](const std::vector<ElementId>& members,
                          bool left) -> std::optional<ElementId> {
    std::optional<ElementId> result;
    bool conflict = false;
    for (ElementId m : members) {
      const LaneSegment& ls = scene.lane_segments.at(m);
      const auto& n = left ? ls.left_neighbor : ls.right_neighbor;
      if (!n) continue;
      const ElementId mapped = new_id.at(*n);
      if (!result) {
        result = mapped;
      } else if (*result != mapped) {
        conflict = true;
      }
    }
    return conflict ? std::nullopt : result;
  };

  std::set<ElementId> chain_members;
  for (const auto& [head, members] : chains) {
    for (ElementId m : members) chain_members.insert(m);
  }

  for (const auto& [id, ls] : scene.lane_segments) {
    if (chain_members.count(id) > 0 && chain_of.at(id) != id) continue;
    if (chain_members.count(id) == 0) {
      LaneSegment copy = ls;
      copy.successors = map_ids(copy.successors);
      copy.predecessors = map_ids(copy.predecessors);
      if (copy.left_neighbor) copy.left_neighbor = new_id.at(*copy.left_neighbor);
      if (copy.right_neighbor) copy.right_neighbor = new_id.at(*copy.right_neighbor);
      out.lane_segments.emplace(id, std::move(copy));
      continue;
    }
    // id is a chain head: build the merged segment.
    const auto chain_it =
        std::find_if(chains.begin(), chains.end(),
                     [&](const auto& c) { return c.first == id; });
    const std::vector<ElementId>& members = chain_it->second;
    LaneSegment merged = ls;
    for (std::size_t i = 1; i < members.size(); ++i) {
      const LaneSegment& part = scene.lane_segments.at(members[i]);
      merged.left_boundary = concat_dropping_joint(
          merged.left_boundary, part.left_boundary, policy.joint_tolerance_m);
      merged.right_boundary = concat_dropping_joint(
          merged.right_boundary, part.right_boundary, policy.joint_tolerance_m);
      merged.centerline = concat_dropping_joint(merged.centerline, part.centerline,
                                                policy.joint_tolerance_m);
    }
    const LaneSegment& tail = scene.lane_segments.at(members.back());
    merged.successors = map_ids(tail.successors);
    merged.predecessors = map_ids(ls.predecessors);
    // A chain that closed into a cycle would reference itself; drop that.
    std::erase(merged.successors, id);
    std::erase(merged.predecessors, id);
    merged.left_neighbor = map_neighbor(members, true);
    merged.right_neighbor = map_neighbor(members, false);
    if (merged.left_neighbor == id) merged.left_neighbor.reset();
    if (merged.right_neighbor == id) merged.right_neighbor.reset();
    out.lane_segments.emplace(id, std::move(merged));
  }

  return out;
}

MapScene unify_crossing_orientation(const MapScene& scene) {
  MapScene out = scene;
  for (auto& [id, pc] : out.pedestrian_crossings) {
    if (pc.centerline.size() < 2 || pc.left_boundary.size() < 2 ||
        pc.right_boundary.size() < 2) {
      continue;
    }
    const Vec2 dir = pc.centerline.back() - pc.centerline.front();

    // Orient both boundaries along the centerline direction.
    auto align = [&](Polyline2D& b) {
      if (dot(b.back() - b.front(), dir) < 0.0) b = b.reversed();
    };
    align(pc.left_boundary);
    align(pc.right_boundary);

    // The left boundary must lie to the left of the centerline direction.
    const Vec2 left_mid = point_at_arc(pc.left_boundary, pc.left_boundary.arc_length() / 2.0);
    const Vec2 right_mid =
        point_at_arc(pc.right_boundary, pc.right_boundary.arc_length() / 2.0);
    if (cross(dir, left_mid - right_mid) < 0.0) {
      std::swap(pc.left_boundary, pc.right_boundary);
    }

    const std::vector<Vec2> ring = crossing_polygon(pc);
    if (!is_simple_polygon(ring)) {
      throw GeometryError("crossing " + std::to_string(id) +
                          " has a self-intersecting boundary polygon");
    }
  }
  return out;
}

}  // namespace lanekit
