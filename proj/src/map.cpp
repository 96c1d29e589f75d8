#include "lanekit/map.hpp"

#include <algorithm>

namespace lanekit {

std::vector<Vec2> crossing_polygon(const PedestrianCrossing& pc) {
  std::vector<Vec2> ring = pc.right_boundary.points;
  ring.insert(ring.end(), pc.left_boundary.points.rbegin(),
              pc.left_boundary.points.rend());
  return ring;
}

std::vector<Vec2> lane_polygon(const LaneSegment& ls) {
  std::vector<Vec2> ring = ls.right_boundary.points;
  ring.insert(ring.end(), ls.left_boundary.points.rbegin(),
              ls.left_boundary.points.rend());
  return ring;
}

ElementId MapScene::max_id() const {
  ElementId m = 0;
  if (!lane_segments.empty()) m = std::max(m, lane_segments.rbegin()->first);
  if (!pedestrian_crossings.empty()) {
    m = std::max(m, pedestrian_crossings.rbegin()->first);
  }
  return m;
}

bool ValidationReport::has_errors() const {
  return std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
    return v.severity == Severity::kError;
  });
}

std::vector<Violation> ValidationReport::by_rule(std::string_view rule) const {
  std::vector<Violation> out;
  for (const Violation& v : violations) {
    if (v.rule == rule) out.push_back(v);
  }
  return out;
}

namespace {

void check_polyline(const Polyline2D& p, ElementId id, const char* field,
                    ValidationReport& report) {
  if (auto why = p.invariant_violation()) {
    report.violations.push_back(
        {"polyline-structure", id, std::string(field) + ": " + *why,
         Severity::kError});
  }
}

void check_hist(const std::vector<std::string>& hist, bool is_modified,
                ElementId id, ValidationReport& report) {
  if (is_modified != !hist.empty()) {
    report.violations.push_back(
        {"modified-flag-consistency", id,
         "is_modified does not match change_hist emptiness", Severity::kError});
  }
  for (const std::string& tag : hist) {
    if (!is_valid_change_tag(tag)) {
      report.violations.push_back({"change-tag-validity", id,
                                   "unknown change tag '" + tag + "'",
                                   Severity::kError});
    }
  }
}

}  // namespace

ValidationReport validate_scene(const MapScene& scene) {
  ValidationReport report;

  for (const auto& [id, ls] : scene.lane_segments) {
    if (scene.pedestrian_crossings.count(id) > 0) {
      report.violations.push_back({"id-uniqueness", id,
                                   "id used by both a lane segment and a crossing",
                                   Severity::kError});
    }
    check_polyline(ls.left_boundary, id, "left_lane_boundary", report);
    check_polyline(ls.right_boundary, id, "right_lane_boundary", report);
    check_polyline(ls.centerline, id, "centerline", report);
    check_hist(ls.change_hist, ls.is_modified, id, report);

    auto check_ref = [&](ElementId ref, const char* field) {
      if (scene.lane_segments.count(ref) == 0) {
        report.violations.push_back(
            {"reference-resolution", id,
             std::string(field) + " references missing id " + std::to_string(ref),
             Severity::kError});
      }
    };
    for (ElementId s : ls.successors) check_ref(s, "successors");
    for (ElementId p : ls.predecessors) check_ref(p, "predecessors");
    if (ls.left_neighbor) check_ref(*ls.left_neighbor, "left_neighbor_id");
    if (ls.right_neighbor) check_ref(*ls.right_neighbor, "right_neighbor_id");

    for (ElementId s : ls.successors) {
      auto it = scene.lane_segments.find(s);
      if (it == scene.lane_segments.end()) continue;
      const auto& preds = it->second.predecessors;
      if (std::find(preds.begin(), preds.end(), id) == preds.end()) {
        report.violations.push_back(
            {"predecessor-successor-symmetry", id,
             "successor " + std::to_string(s) + " does not list " +
                 std::to_string(id) + " as predecessor",
             Severity::kError});
      }
    }
    for (ElementId p : ls.predecessors) {
      auto it = scene.lane_segments.find(p);
      if (it == scene.lane_segments.end()) continue;
      const auto& succs = it->second.successors;
      if (std::find(succs.begin(), succs.end(), id) == succs.end()) {
        report.violations.push_back(
            {"predecessor-successor-symmetry", id,
             "predecessor " + std::to_string(p) + " does not list " +
                 std::to_string(id) + " as successor",
             Severity::kError});
      }
    }
  }

  for (const auto& [id, pc] : scene.pedestrian_crossings) {
    check_polyline(pc.left_boundary, id, "left_lane_boundary", report);
    check_polyline(pc.right_boundary, id, "right_lane_boundary", report);
    check_polyline(pc.centerline, id, "centerline", report);
    check_hist(pc.change_hist, pc.is_modified, id, report);

    const std::vector<Vec2> ring = crossing_polygon(pc);
    if (ring.size() >= 3) {
      if (!is_simple_polygon(ring)) {
        report.violations.push_back({"crossing-polygon-simple", id,
                                     "boundary pair self-intersects",
                                     Severity::kError});
      } else if (signed_area(ring) < 0.0) {
        report.violations.push_back({"canonical-orientation", id,
                                     "crossing polygon is clockwise",
                                     Severity::kWarning});
      }
    }
  }

  return report;
}

ElementStatus status_from_hist(const std::vector<std::string>& change_hist) {
  ElementStatus st;
  bool geo = false;
  bool mark = false;
  bool other = false;
  for (const std::string& t : change_hist) {
    if (t == tag::kInsertion) {
      st.primary = ElementStatus::Primary::kInsertion;
      return st;
    }
    if (t == tag::kDeletion) {
      st.primary = ElementStatus::Primary::kDeletion;
      return st;
    }
    if (t == tag::kGeometry || t == tag::kReroute) geo = true;
    if (t == tag::kMarking) mark = true;
    other = true;
  }
  if (other) {
    st.primary = ElementStatus::Primary::kOther;
    st.geo = geo;
    st.mark = mark;
  }
  return st;
}

}  // namespace lanekit
