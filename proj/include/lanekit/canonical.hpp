#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lanekit/change.hpp"
#include "lanekit/map.hpp"

namespace lanekit {

// Topological role of a lane segment on the road graph: which entry lane
// feeds it (counted from the driving-direction right, rightmost = 1, 0 when
// it has no predecessor) and its turn class from the centerline heading
// delta (left > +30 deg, right < -30 deg, else straight).
struct TopoFunctionSignature {
  enum class Turn { kLeft, kStraight, kRight };

  int entry_ordinal_from_right = 0;
  Turn turn = Turn::kStraight;

  bool operator==(const TopoFunctionSignature&) const = default;
};

std::optional<TopoFunctionSignature> topo_function_signature(
    const MapScene& scene, ElementId id);

// Deletion/insertion pairs of intersection lane segments whose topological
// function matches between prior and gt; these are convertible to re-route
// geometry edits and are excluded from lane-number counting.
std::vector<std::pair<ElementId, ElementId>> reroute_pairs(
    const ChangeSet& cs, const MapScene& prior, const MapScene& gt);

// Canonical-form validation of a change set known to map prior onto gt.
// Rules, reported as violations (errors) or warnings:
//   replacement-without-topology-change  deletion+insertion pair although the
//                                        road graph is unchanged and an
//                                        in-place edit suffices
//   right-handside-rule                  ambiguous lane insertion that is not
//                                        the rightmost candidate
//   function-preserving-reroute          reroute-flagged geometry change whose
//                                        topological function differs between
//                                        prior and gt
//   insertion-deletion-exclusivity       inserted/deleted target carrying
//                                        co-changes
//   reroute-convertible-replacement      (warning) deletion+insertion pair of
//                                        intersection segments with matching
//                                        topological function
ValidationReport validate_canonical(const ChangeSet& cs, const MapScene& prior,
                                    const MapScene& gt);

}  // namespace lanekit
