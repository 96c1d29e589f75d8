#pragma once

#include "lanekit/map.hpp"

namespace lanekit {

// Policy for joining consecutive lane segments. Two segments a -> b merge
// only when the shared junction has degree 2 and every listed property
// matches; the change-status comparison uses the set of change_hist kinds.
struct MergePolicy {
  bool require_lane_type = true;
  bool require_marks = true;
  bool require_intersection_flag = true;
  bool require_change_status = true;
  double joint_tolerance_m = 1e-6;  // duplicate-endpoint drop tolerance
};

// Collapses unnecessary breakpoints: chains of property-equal segments
// joined by degree-2 junctions become single segments whose polylines are
// concatenated (duplicated joint points dropped). The merged segment keeps
// the chain head's id; connectivity and neighbor links are rewired. The
// result is a fixed point: applying merge_elements again changes nothing.
MapScene merge_elements(const MapScene& scene, const MergePolicy& policy = {});

// Reorders/reverses every crossing's boundary pair so the induced polygon is
// counterclockwise and the left boundary lies to the left of the centerline
// direction. Geometry is set-equal to the input; idempotent. Throws
// GeometryError on a self-intersecting crossing polygon.
MapScene unify_crossing_orientation(const MapScene& scene);

}  // namespace lanekit
