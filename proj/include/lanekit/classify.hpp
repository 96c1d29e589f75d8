#pragma once

#include <map>
#include <set>
#include <vector>

#include "lanekit/change.hpp"
#include "lanekit/map.hpp"

namespace lanekit {

enum class MacroKind { kShape, kAppearance, kFunction, kLaneGraph, kLaneNumber };

std::string_view to_string(MacroKind k);

struct MacroModification {
  MacroKind kind = MacroKind::kShape;
  int lane_number_delta = 0;  // nonzero exactly when kind == kLaneNumber

  auto operator<=>(const MacroModification&) const = default;
};

// The constant table relating atomic change kinds (columns geo, mark, type,
// ins, del) to macro-modifications. Starred entries contribute only when the
// change also alters the lane-graph topology; the lane-number row counts
// insertions +1 and deletions -1.
struct MappingMatrixC {
  enum class Entry { kNo, kContributes, kContributesIfTopology, kPlusOne, kMinusOne };

  static Entry entry(MacroKind row, ChangeKind column);
};

// Macro-modifications produced by a change set between two scenes, derived
// through the mapping matrix:
//  - shape / appearance / function: in-place geometry / marking / type edits,
//    plus topology-altering insertions or deletions (starred entries);
//  - lane graph: insertions/deletions or connectivity edits that alter the
//    road-graph topology;
//  - lane number: signed count of lane-segment insertions minus deletions,
//    excluding reroute-convertible pairs; crossings never count.
// Throws InconsistentInput when the set references ids absent from both
// scenes.
std::set<MacroModification> classify_macro(const ChangeSet& cs,
                                           const MapScene& prior,
                                           const MapScene& gt);

// Frame-level change-presence labels y_c over the default class set
// {insertion, deletion, geometry, marking}, read from per-element change
// status. Type and connectivity tags mark an element as changed but have no
// dedicated class here.
struct FrameLabels {
  bool insertion = false;
  bool deletion = false;
  bool geometry = false;
  bool marking = false;

  bool operator==(const FrameLabels&) const = default;
};

FrameLabels frame_labels(const std::vector<ElementStatus>& elements);

// Labels for a cropped annotated scene; deleted elements do not appear in
// the ground-truth map, so their presence is passed separately.
FrameLabels frame_labels(const MapScene& patch, bool has_deleted_element);

// Finer-grained hierarchy derived from a change record, one string per leaf:
//   marking/mark-change/<side>, marking/color-change/<side>
//   geometry/width-change/<side>, geometry/border-shape/<side>
//   type/restriction (vehicle -> other), type/opening (other -> vehicle)
// Insertions and deletions refine no further; a pure rigid shift keeps the
// plain geometry tag without a finer label. Derived on demand, never stored
// as separate atomic kinds.
std::vector<std::string> sub_labels(const AtomicChange& change);

}  // namespace lanekit
