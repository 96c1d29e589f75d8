#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lanekit/map.hpp"

namespace lanekit {

// Parses a UTF-8 JSON map document. Field names follow the on-disk schema:
// top-level "scene_id", "lane_segments" and "pedestrian_crossings" (maps of
// id string -> element object). Unknown fields are preserved verbatim and
// round-trip through serialize_map.
//
// Throws SchemaError (missing/mistyped field, with JSON path), IntegrityError
// (dangling id reference, duplicate id) or GeometryError (degenerate
// polyline).
MapScene parse_map(std::string_view bytes);

// Deterministic canonical serialization: object keys sorted, floats printed
// with exactly 3 decimal places (millimeters). parse_map(serialize_map(s))
// reproduces s for canonical documents.
std::string serialize_map(const MapScene& scene);

// serialize_map(parse_map(serialize_map(s))) == serialize_map(s); helper for
// comparing scenes by canonical bytes.
inline bool scenes_equal_canonical(const MapScene& a, const MapScene& b) {
  return serialize_map(a) == serialize_map(b);
}

// Canonical JSON printing used across all file formats: sorted keys, fixed
// 3-decimal floats, no insignificant whitespace.
std::string canonical_dump(const nlohmann::json& j);

// Fixed 3-decimal float formatting ("-0.000" normalized to "0.000").
std::string format_fixed3(double v);

// Pose trajectory: JSON array of {timestamp_ns, x, y, heading_rad} with
// strictly increasing timestamps.
std::vector<EgoPose> parse_poses(std::string_view bytes);
std::string serialize_poses(const std::vector<EgoPose>& poses);

// Building blocks shared with the changeset serializer.
nlohmann::json lane_segment_to_json(const LaneSegment& ls);
nlohmann::json crossing_to_json(const PedestrianCrossing& pc);
LaneSegment lane_segment_from_json(const nlohmann::json& j,
                                   const std::string& path);
PedestrianCrossing crossing_from_json(const nlohmann::json& j,
                                      const std::string& path);
nlohmann::json polyline_to_json(const Polyline2D& p);
Polyline2D polyline_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace lanekit
