#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanekit/geometry.hpp"
#include "lanekit/types.hpp"

namespace lanekit {

struct EgoPose {
  std::int64_t timestamp_ns = 0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians

  bool operator==(const EgoPose&) const = default;
};

struct LaneSegment {
  ElementId id = 0;
  bool is_intersection = false;
  LaneType lane_type = LaneType::kVehicle;
  Polyline2D left_boundary;
  Polyline2D right_boundary;
  Polyline2D centerline;
  LaneMarkType left_mark;
  LaneMarkType right_mark;
  std::vector<ElementId> successors;    // kept sorted ascending
  std::vector<ElementId> predecessors;  // kept sorted ascending
  std::optional<ElementId> left_neighbor;
  std::optional<ElementId> right_neighbor;
  bool is_modified = false;
  std::vector<std::string> change_hist;
  nlohmann::json extra = nlohmann::json::object();  // unknown fields, verbatim

  bool operator==(const LaneSegment&) const = default;
};

struct PedestrianCrossing {
  ElementId id = 0;
  Polyline2D left_boundary;
  Polyline2D right_boundary;
  Polyline2D centerline;
  bool is_modified = false;
  std::vector<std::string> change_hist;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const PedestrianCrossing&) const = default;
};

// Closed ring spanned by a crossing's boundary pair: right boundary forward,
// left boundary backward. Counterclockwise exactly when the left boundary
// lies to the left of the centerline direction.
std::vector<Vec2> crossing_polygon(const PedestrianCrossing& pc);

// Ring covered by a lane segment's boundary pair, same convention.
std::vector<Vec2> lane_polygon(const LaneSegment& ls);

struct MapScene {
  std::string scene_id;
  std::map<ElementId, LaneSegment> lane_segments;
  std::map<ElementId, PedestrianCrossing> pedestrian_crossings;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const MapScene&) const = default;

  bool has_element(ElementId id) const {
    return lane_segments.count(id) > 0 || pedestrian_crossings.count(id) > 0;
  }
  ElementId max_id() const;
};

enum class Severity { kWarning, kError };

struct Violation {
  std::string rule;
  ElementId element_id = 0;
  std::string message;
  Severity severity = Severity::kError;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has_errors() const;
  std::vector<Violation> by_rule(std::string_view rule) const;
};

// Reports every invariant violation with element id and rule name. Violations
// are data; this never throws. Rules:
//   polyline-structure, reference-resolution, predecessor-successor-symmetry,
//   modified-flag-consistency, change-tag-validity, crossing-polygon-simple,
//   canonical-orientation (warning).
ValidationReport validate_scene(const MapScene& scene);

// Per-element change status derived from change_hist, shared by the frame
// labeling and evaluation paths.
struct ElementStatus {
  enum class Primary { kNoChange, kInsertion, kDeletion, kOther };
  Primary primary = Primary::kNoChange;
  bool geo = false;   // meaningful only when primary == kOther
  bool mark = false;  // meaningful only when primary == kOther

  bool operator==(const ElementStatus&) const = default;
  bool changed() const { return primary != Primary::kNoChange; }
};

ElementStatus status_from_hist(const std::vector<std::string>& change_hist);

}  // namespace lanekit
