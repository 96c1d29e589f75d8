#pragma once

#include "lanekit/change.hpp"
#include "lanekit/map.hpp"

namespace lanekit {

struct ApplyOptions {
  // Append the applied change kinds to the change_hist of touched elements
  // (and set is_modified). Disable for pure state transforms such as
  // involution checks.
  bool annotate = true;
};

// Applies a change set to a scene, returning the edited scene. Deletions run
// first and scrub dangling references; insertions then restore
// predecessor/successor symmetry implied by their payloads; field edits run
// last in canonical order.
//
// Throws TargetMissing, IdCollision, ConflictingChange (base scene mismatch
// or exclusivity violation) and IntegrityError (a change left a dangling
// reference).
MapScene apply_changeset(const MapScene& scene, const ChangeSet& cs,
                         const ApplyOptions& options = {});

// Minimal canonical diff between two scenes sharing an id-correspondence
// convention. Shared ids yield field-level changes (geometry compared by max
// pointwise deviation after 10-point resampling, threshold 1e-3 m); ids only
// in gt yield insertions; ids only in prior yield deletions. Annotation
// fields never participate in the comparison.
ChangeSet diff_maps(const MapScene& prior, const MapScene& gt);

// Geometry comparison used by diff_maps.
bool geometry_differs(const ElementGeometry& a, const ElementGeometry& b,
                      double tolerance_m = 1e-3);

// Swaps insertion<->deletion and before<->after on every record.
// apply(invert(cs), apply(cs, base)) == base (with annotation disabled).
ChangeSet invert_changeset(const ChangeSet& cs, const MapScene& base);

}  // namespace lanekit
