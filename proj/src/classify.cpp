#include "lanekit/classify.hpp"

#include "lanekit/canonical.hpp"
#include "lanekit/errors.hpp"
#include "lanekit/lane_graph.hpp"

namespace lanekit {

std::string_view to_string(MacroKind k) {
  switch (k) {
    case MacroKind::kShape: return "shape";
    case MacroKind::kAppearance: return "appearance";
    case MacroKind::kFunction: return "function";
    case MacroKind::kLaneGraph: return "lane_graph";
    case MacroKind::kLaneNumber: return "lane_number";
  }
  return "shape";
}

MappingMatrixC::Entry MappingMatrixC::entry(MacroKind row, ChangeKind column) {
  using E = Entry;
  const bool structural =
      column == ChangeKind::kInsertion || column == ChangeKind::kDeletion;
  switch (row) {
    case MacroKind::kShape:
      if (column == ChangeKind::kGeometry) return E::kContributes;
      return structural ? E::kContributesIfTopology : E::kNo;
    case MacroKind::kAppearance:
      if (column == ChangeKind::kMarking) return E::kContributes;
      return structural ? E::kContributesIfTopology : E::kNo;
    case MacroKind::kFunction:
      if (column == ChangeKind::kType) return E::kContributes;
      return structural ? E::kContributesIfTopology : E::kNo;
    case MacroKind::kLaneGraph:
      return structural ? E::kContributes : E::kNo;
    case MacroKind::kLaneNumber:
      if (column == ChangeKind::kInsertion) return E::kPlusOne;
      if (column == ChangeKind::kDeletion) return E::kMinusOne;
      return E::kNo;
  }
  return E::kNo;
}

std::set<MacroModification> classify_macro(const ChangeSet& cs,
                                           const MapScene& prior,
                                           const MapScene& gt) {
  bool any_geometry = false;
  bool any_marking = false;
  bool any_type = false;
  bool any_connectivity = false;
  int lane_insertions = 0;
  int lane_deletions = 0;
  bool any_lane_insdel = false;

  for (const AtomicChange& c : cs.changes()) {
    if (!prior.has_element(c.target_id) && !gt.has_element(c.target_id)) {
      throw InconsistentInput("change targets id " + std::to_string(c.target_id) +
                              " absent from both scenes");
    }
    switch (c.kind()) {
      case ChangeKind::kGeometry:
        any_geometry = true;
        break;
      case ChangeKind::kMarking:
        any_marking = true;
        break;
      case ChangeKind::kType:
        any_type = true;
        break;
      case ChangeKind::kConnectivity:
        any_connectivity = true;
        break;
      case ChangeKind::kInsertion:
        if (c.as<InsertionChange>()->element.is_lane()) {
          ++lane_insertions;
          any_lane_insdel = true;
        }
        break;
      case ChangeKind::kDeletion:
        if (c.as<DeletionChange>()->element.is_lane()) {
          ++lane_deletions;
          any_lane_insdel = true;
        }
        break;
    }
  }

  // Starred entries: insertions/deletions contribute only when the road
  // graph changes. An inserted or deleted lane segment always adds or
  // removes an edge, so any lane-segment insertion/deletion qualifies;
  // crossings never do.
  const bool starred = any_lane_insdel;

  std::set<MacroModification> out;
  if (any_geometry || starred) out.insert({MacroKind::kShape, 0});
  if (any_marking || starred) out.insert({MacroKind::kAppearance, 0});
  if (any_type || starred) out.insert({MacroKind::kFunction, 0});

  bool graph_changed = any_lane_insdel;
  if (!graph_changed && any_connectivity) {
    graph_changed = lane_graph_topology_changed(prior, gt);
  }
  if (graph_changed) out.insert({MacroKind::kLaneGraph, 0});

  // Reroute-convertible pairs keep the lane count; each pair cancels one
  // insertion against one deletion.
  const int pair_count = static_cast<int>(reroute_pairs(cs, prior, gt).size());
  const int delta =
      (lane_insertions - pair_count) - (lane_deletions - pair_count);
  if (delta != 0) out.insert({MacroKind::kLaneNumber, delta});
  return out;
}

FrameLabels frame_labels(const std::vector<ElementStatus>& elements) {
  FrameLabels labels;
  for (const ElementStatus& st : elements) {
    switch (st.primary) {
      case ElementStatus::Primary::kInsertion:
        labels.insertion = true;
        break;
      case ElementStatus::Primary::kDeletion:
        labels.deletion = true;
        break;
      case ElementStatus::Primary::kOther:
        labels.geometry |= st.geo;
        labels.marking |= st.mark;
        break;
      case ElementStatus::Primary::kNoChange:
        break;
    }
  }
  return labels;
}

namespace {

constexpr double kSubLabelTolM = 1e-3;
constexpr int kSubLabelSamples = 10;

bool polyline_moved(const Polyline2D& before, const Polyline2D& after) {
  const Polyline2D rb = resample_polyline(before, kSubLabelSamples);
  const Polyline2D ra = resample_polyline(after, kSubLabelSamples);
  for (int i = 0; i < kSubLabelSamples; ++i) {
    if (distance(rb[static_cast<std::size_t>(i)], ra[static_cast<std::size_t>(i)]) >
        kSubLabelTolM) {
      return true;
    }
  }
  return false;
}

// Did the boundary's form change, discounting a rigid translation?
bool polyline_reshaped(const Polyline2D& before, const Polyline2D& after) {
  const Polyline2D rb = resample_polyline(before, kSubLabelSamples);
  const Polyline2D ra = resample_polyline(after, kSubLabelSamples);
  Vec2 offset{0.0, 0.0};
  for (int i = 0; i < kSubLabelSamples; ++i) {
    offset = offset + (ra[static_cast<std::size_t>(i)] -
                       rb[static_cast<std::size_t>(i)]);
  }
  offset = offset * (1.0 / kSubLabelSamples);
  for (int i = 0; i < kSubLabelSamples; ++i) {
    const Vec2 residual = ra[static_cast<std::size_t>(i)] -
                          rb[static_cast<std::size_t>(i)] - offset;
    if (residual.norm() > kSubLabelTolM) return true;
  }
  return false;
}

bool width_profile_changed(const ElementGeometry& before,
                           const ElementGeometry& after) {
  const Polyline2D bl = resample_polyline(before.left, kSubLabelSamples);
  const Polyline2D br = resample_polyline(before.right, kSubLabelSamples);
  const Polyline2D al = resample_polyline(after.left, kSubLabelSamples);
  const Polyline2D ar = resample_polyline(after.right, kSubLabelSamples);
  for (int i = 0; i < kSubLabelSamples; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (std::abs(distance(al[k], ar[k]) - distance(bl[k], br[k])) > kSubLabelTolM) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<std::string> sub_labels(const AtomicChange& change) {
  std::vector<std::string> out;
  if (const auto* m = change.as<MarkingChange>()) {
    const std::string side(to_string(m->side));
    if (m->before.mark != m->after.mark) {
      out.push_back("marking/mark-change/" + side);
    }
    if (m->before.color != m->after.color) {
      out.push_back("marking/color-change/" + side);
    }
  } else if (const auto* g = change.as<GeometryChange>()) {
    const bool width_changed = width_profile_changed(g->before, g->after);
    struct Side {
      const char* name;
      const Polyline2D* before;
      const Polyline2D* after;
    };
    for (const Side& side : {Side{"left", &g->before.left, &g->after.left},
                             Side{"right", &g->before.right, &g->after.right}}) {
      if (!polyline_moved(*side.before, *side.after)) continue;
      if (width_changed) {
        out.push_back(std::string("geometry/width-change/") + side.name);
      }
      if (polyline_reshaped(*side.before, *side.after)) {
        out.push_back(std::string("geometry/border-shape/") + side.name);
      }
    }
  } else if (const auto* t = change.as<TypeChange>()) {
    if (t->before.lane_type != t->after.lane_type) {
      if (t->before.lane_type == LaneType::kVehicle) {
        out.push_back("type/restriction");
      } else if (t->after.lane_type == LaneType::kVehicle) {
        out.push_back("type/opening");
      }
    }
  }
  return out;
}

FrameLabels frame_labels(const MapScene& patch, bool has_deleted_element) {
  std::vector<ElementStatus> statuses;
  statuses.reserve(patch.lane_segments.size() + patch.pedestrian_crossings.size());
  for (const auto& [id, ls] : patch.lane_segments) {
    statuses.push_back(status_from_hist(ls.change_hist));
  }
  for (const auto& [id, pc] : patch.pedestrian_crossings) {
    statuses.push_back(status_from_hist(pc.change_hist));
  }
  FrameLabels labels = frame_labels(statuses);
  labels.deletion |= has_deleted_element;
  return labels;
}

}  // namespace lanekit
