#pragma once

#include "lanekit/map.hpp"

namespace lanekit {

// Map-frame point expressed in the ego frame of `pose` (translated to the
// pose, rotated so the heading points along +x).
Vec2 to_ego_frame(Vec2 p, const EgoPose& pose);
Polyline2D to_ego_frame(const Polyline2D& p, const EgoPose& pose);

// Crops the scene to the extent x extent square centered on the pose,
// axis-aligned in the heading-rotated ego frame. Output geometry is in ego
// coordinates; polylines are clipped with exact border intersection points.
// An element is retained only when all three of its polylines intersect the
// box non-degenerately; connectivity is restricted to retained elements and
// ids are preserved. Cropping the result again with the identity pose and
// the same extent is a no-op.
MapScene crop_patch(const MapScene& scene, const EgoPose& pose, double extent);

// True when any of the element's polylines enters the box (used for frame
// counting without materializing a crop).
bool lane_in_patch(const LaneSegment& ls, const EgoPose& pose, double extent);
bool crossing_in_patch(const PedestrianCrossing& pc, const EgoPose& pose,
                       double extent);

}  // namespace lanekit
