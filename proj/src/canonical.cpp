#include "lanekit/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "lanekit/lane_graph.hpp"
#include "lanekit/metrics.hpp"

namespace lanekit {

namespace {

constexpr double kTurnThresholdRad = 30.0 * M_PI / 180.0;
// A deleted and an inserted lane closer than this are considered to occupy
// the same road space, i.e. replaceable by an in-place edit.
constexpr double kReplacementChamferM = 3.0;
// Crossings carry no graph structure; they count as the same road space only
// when their polygons materially overlap. Below this bound two crossings can
// legitimately coexist, so a deletion+insertion is not a replacement.
constexpr double kReplacementCrossingIou = 0.05;
constexpr int kMaxNeighborHops = 64;

int ordinal_from_right(const MapScene& scene, ElementId lane) {
  int ordinal = 1;
  ElementId cur = lane;
  for (int hop = 0; hop < kMaxNeighborHops; ++hop) {
    auto it = scene.lane_segments.find(cur);
    if (it == scene.lane_segments.end() || !it->second.right_neighbor) break;
    cur = *it->second.right_neighbor;
    if (cur == lane) break;  // neighbor cycle guard
    ++ordinal;
  }
  return ordinal;
}

}  // namespace

std::optional<TopoFunctionSignature> topo_function_signature(
    const MapScene& scene, ElementId id) {
  auto it = scene.lane_segments.find(id);
  if (it == scene.lane_segments.end()) return std::nullopt;
  const LaneSegment& ls = it->second;
  if (ls.centerline.size() < 2) return std::nullopt;

  TopoFunctionSignature sig;
  if (!ls.predecessors.empty()) {
    // Deterministic pick: the smallest-id entry lane.
    sig.entry_ordinal_from_right = ordinal_from_right(scene, ls.predecessors.front());
  }
  const double delta =
      normalize_angle(end_heading(ls.centerline) - start_heading(ls.centerline));
  if (delta > kTurnThresholdRad) {
    sig.turn = TopoFunctionSignature::Turn::kLeft;
  } else if (delta < -kTurnThresholdRad) {
    sig.turn = TopoFunctionSignature::Turn::kRight;
  } else {
    sig.turn = TopoFunctionSignature::Turn::kStraight;
  }
  return sig;
}

namespace {

std::vector<Vec2> polyline_points(const Polyline2D& p) { return p.points; }

double centerline_chamfer(const ElementGeometry& a, const ElementGeometry& b) {
  return chamfer(polyline_points(a.center), polyline_points(b.center));
}

struct StructuralRecord {
  ElementId id = 0;
  bool is_lane = false;
  ElementGeometry geometry;
};

std::vector<StructuralRecord> collect(const ChangeSet& cs, ChangeKind kind) {
  std::vector<StructuralRecord> out;
  for (const AtomicChange& c : cs.changes()) {
    if (c.kind() != kind) continue;
    const ElementPayload* payload = nullptr;
    if (const auto* ins = c.as<InsertionChange>()) payload = &ins->element;
    if (const auto* del = c.as<DeletionChange>()) payload = &del->element;
    if (!payload) continue;
    out.push_back({c.target_id, payload->is_lane(), payload->geometry()});
  }
  return out;
}

// Ids present in both scenes (the persisting elements).
std::set<ElementId> persisting_ids(const MapScene& prior, const MapScene& gt) {
  std::set<ElementId> out;
  for (const auto& [id, ls] : prior.lane_segments) {
    if (gt.lane_segments.count(id) > 0) out.insert(id);
  }
  for (const auto& [id, pc] : prior.pedestrian_crossings) {
    if (gt.pedestrian_crossings.count(id) > 0) out.insert(id);
  }
  return out;
}

// The persisting endpoint slots sharing the given segment-end's junction.
std::set<EndpointSlot> junction_signature(const LaneGraph& graph,
                                          const std::set<ElementId>& persisting,
                                          EndpointSlot slot) {
  std::set<EndpointSlot> out;
  const int v = graph.vertex_of(slot);
  if (v < 0) return out;
  for (const EndpointSlot& s : graph.vertices[static_cast<std::size_t>(v)]) {
    if (s.segment != slot.segment && persisting.count(s.segment) > 0) {
      out.insert(s);
    }
  }
  return out;
}

struct PairContext {
  LaneGraph prior_graph;
  LaneGraph gt_graph;
  std::set<ElementId> persisting;
};

std::vector<Vec2> footprint(const ElementGeometry& g) {
  std::vector<Vec2> ring = g.right.points;
  ring.insert(ring.end(), g.left.points.rbegin(), g.left.points.rend());
  return ring;
}

// True when assigning the deleted element's identity to the inserted one
// leaves the road graph unchanged: matching junction signatures (restricted
// to persisting elements) and overlapping road space.
bool in_place_edit_suffices(const PairContext& ctx, const StructuralRecord& del,
                            const StructuralRecord& ins) {
  if (del.is_lane != ins.is_lane) return false;
  if (!del.is_lane) {
    return polygon_iou(footprint(del.geometry), footprint(ins.geometry)) >=
           kReplacementCrossingIou;
  }
  if (centerline_chamfer(del.geometry, ins.geometry) > kReplacementChamferM) {
    return false;
  }
  const auto del_start = junction_signature(ctx.prior_graph, ctx.persisting,
                                            {del.id, EndpointSlot::kStart});
  const auto del_end = junction_signature(ctx.prior_graph, ctx.persisting,
                                          {del.id, EndpointSlot::kEnd});
  const auto ins_start = junction_signature(ctx.gt_graph, ctx.persisting,
                                            {ins.id, EndpointSlot::kStart});
  const auto ins_end = junction_signature(ctx.gt_graph, ctx.persisting,
                                          {ins.id, EndpointSlot::kEnd});
  return (del_start == ins_start && del_end == ins_end) ||
         (del_start == ins_end && del_end == ins_start);
}

// Greedy matching of deletions to insertions under a pair predicate,
// preferring geometrically closer pairs.
std::vector<std::pair<ElementId, ElementId>> match_pairs(
    const std::vector<StructuralRecord>& deletions,
    const std::vector<StructuralRecord>& insertions,
    const std::function<bool(const StructuralRecord&, const StructuralRecord&)>&
        compatible) {
  std::vector<std::pair<ElementId, ElementId>> pairs;
  std::vector<bool> used(insertions.size(), false);
  for (const StructuralRecord& del : deletions) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = insertions.size();
    for (std::size_t i = 0; i < insertions.size(); ++i) {
      if (used[i] || !compatible(del, insertions[i])) continue;
      const double d = centerline_chamfer(del.geometry, insertions[i].geometry);
      if (d < best) {
        best = d;
        best_idx = i;
      }
    }
    if (best_idx < insertions.size()) {
      used[best_idx] = true;
      pairs.emplace_back(del.id, insertions[best_idx].id);
    }
  }
  return pairs;
}

bool is_intersection_lane(const MapScene& scene, ElementId id) {
  auto it = scene.lane_segments.find(id);
  return it != scene.lane_segments.end() && it->second.is_intersection;
}

}  // namespace

std::vector<std::pair<ElementId, ElementId>> reroute_pairs(
    const ChangeSet& cs, const MapScene& prior, const MapScene& gt) {
  const auto deletions = collect(cs, ChangeKind::kDeletion);
  const auto insertions = collect(cs, ChangeKind::kInsertion);
  auto compatible = [&](const StructuralRecord& del, const StructuralRecord& ins) {
    if (!del.is_lane || !ins.is_lane) return false;
    if (!is_intersection_lane(prior, del.id) || !is_intersection_lane(gt, ins.id)) {
      return false;
    }
    const auto del_sig = topo_function_signature(prior, del.id);
    const auto ins_sig = topo_function_signature(gt, ins.id);
    return del_sig && ins_sig && *del_sig == *ins_sig;
  };
  return match_pairs(deletions, insertions, compatible);
}

namespace {

// Maximal left/right neighbor chain containing `id` in the scene, ordered
// rightmost first.
std::vector<ElementId> neighbor_group(const MapScene& scene, ElementId id) {
  std::vector<ElementId> group;
  ElementId cur = id;
  for (int hop = 0; hop < kMaxNeighborHops; ++hop) {
    auto it = scene.lane_segments.find(cur);
    if (it == scene.lane_segments.end() || !it->second.right_neighbor) break;
    const ElementId next = *it->second.right_neighbor;
    if (next == id) break;
    cur = next;
  }
  for (int hop = 0; hop < kMaxNeighborHops; ++hop) {
    group.push_back(cur);
    auto it = scene.lane_segments.find(cur);
    if (it == scene.lane_segments.end() || !it->second.left_neighbor) break;
    cur = *it->second.left_neighbor;
    if (std::find(group.begin(), group.end(), cur) != group.end()) break;
  }
  return group;
}

Vec2 centerline_centroid(const ElementGeometry& g) {
  Vec2 acc{0.0, 0.0};
  for (const Vec2& p : g.center.points) acc = acc + p;
  return acc * (1.0 / static_cast<double>(g.center.size()));
}

Vec2 group_direction(const MapScene& scene, const std::vector<ElementId>& group) {
  Vec2 acc{0.0, 0.0};
  for (ElementId id : group) {
    auto it = scene.lane_segments.find(id);
    if (it == scene.lane_segments.end() || it->second.centerline.size() < 2) continue;
    Vec2 d = it->second.centerline.back() - it->second.centerline.front();
    const double n = d.norm();
    if (n > 0.0) acc = acc + d * (1.0 / n);
  }
  const double n = acc.norm();
  return n > 0.0 ? acc * (1.0 / n) : Vec2{1.0, 0.0};
}

}  // namespace

ValidationReport validate_canonical(const ChangeSet& cs, const MapScene& prior,
                                    const MapScene& gt) {
  ValidationReport report;

  // (d) exclusivity. ChangeSet::add already refuses such sets when built
  // through the API; re-check here for sets assembled elsewhere.
  std::map<ElementId, int> structural_count;
  std::map<ElementId, int> total_count;
  for (const AtomicChange& c : cs.changes()) {
    ++total_count[c.target_id];
    if (c.kind() == ChangeKind::kInsertion || c.kind() == ChangeKind::kDeletion) {
      ++structural_count[c.target_id];
    }
  }
  for (const auto& [id, n] : structural_count) {
    if (total_count[id] > n || n > 1) {
      report.violations.push_back(
          {"insertion-deletion-exclusivity", id,
           "inserted/deleted element carries additional changes",
           Severity::kError});
    }
  }

  PairContext ctx{build_lane_graph(prior), build_lane_graph(gt),
                  persisting_ids(prior, gt)};
  const auto deletions = collect(cs, ChangeKind::kDeletion);
  const auto insertions = collect(cs, ChangeKind::kInsertion);

  // (a) replacement pairs although the road graph stays the same.
  const auto replacement = match_pairs(
      deletions, insertions,
      [&](const StructuralRecord& del, const StructuralRecord& ins) {
        return in_place_edit_suffices(ctx, del, ins);
      });
  for (const auto& [del_id, ins_id] : replacement) {
    report.violations.push_back(
        {"replacement-without-topology-change", ins_id,
         "deletion of " + std::to_string(del_id) + " + insertion of " +
             std::to_string(ins_id) +
             " leaves the road graph unchanged; use in-place edits",
         Severity::kError});
  }

  // Warning: replacement pairs inside intersections that keep the element's
  // topological function; the canonical annotation is a re-route geometry
  // edit.
  std::set<ElementId> already_flagged;
  for (const auto& [del_id, ins_id] : replacement) already_flagged.insert(ins_id);
  for (const auto& [del_id, ins_id] : reroute_pairs(cs, prior, gt)) {
    if (already_flagged.count(ins_id) > 0) continue;
    report.violations.push_back(
        {"reroute-convertible-replacement", ins_id,
         "deletion of " + std::to_string(del_id) + " + insertion of " +
             std::to_string(ins_id) +
             " preserves the topological function; prefer a reroute geometry edit",
         Severity::kWarning});
  }

  // (b) Right-Handside-Rule: an ambiguous lane insertion must take the
  // driving-direction-rightmost candidate position.
  std::map<ElementId, const GeometryChange*> geometry_changes;
  for (const AtomicChange& c : cs.changes()) {
    if (const auto* g = c.as<GeometryChange>()) geometry_changes[c.target_id] = g;
  }
  for (const StructuralRecord& ins : insertions) {
    if (!ins.is_lane || gt.lane_segments.count(ins.id) == 0) continue;
    const std::vector<ElementId> group = neighbor_group(gt, ins.id);
    const Vec2 dir = group_direction(gt, group);
    const Vec2 rightward = right_normal(dir);
    const double ins_offset = dot(centerline_centroid(ins.geometry), rightward);
    for (ElementId sibling : group) {
      if (sibling == ins.id) continue;
      auto gc = geometry_changes.find(sibling);
      if (gc == geometry_changes.end()) continue;
      // The sibling is a relabeling candidate only when moving it into the
      // inserted slot is no bigger an edit than its actual one (0.5 m slack).
      const double actual_move =
          centerline_chamfer(gc->second->before, gc->second->after);
      const double relabel_move = centerline_chamfer(gc->second->before, ins.geometry);
      if (relabel_move > actual_move + 0.5) continue;
      const double sibling_offset =
          dot(centerline_centroid(gc->second->after), rightward);
      if (sibling_offset > ins_offset + 1e-6) {
        report.violations.push_back(
            {"right-handside-rule", ins.id,
             "insertion of " + std::to_string(ins.id) +
                 " is not the rightmost candidate; lane " +
                 std::to_string(sibling) + " lies further right",
             Severity::kError});
        break;
      }
    }
  }

  // (c) reroute-flagged geometry changes must preserve the topological
  // function between prior and gt.
  for (const AtomicChange& c : cs.changes()) {
    const auto* g = c.as<GeometryChange>();
    if (!g || !g->reroute) continue;
    const bool in_intersection = is_intersection_lane(prior, c.target_id) ||
                                 is_intersection_lane(gt, c.target_id);
    if (!in_intersection) {
      report.violations.push_back({"function-preserving-reroute", c.target_id,
                                   "reroute flag outside an intersection",
                                   Severity::kError});
      continue;
    }
    const auto before_sig = topo_function_signature(prior, c.target_id);
    const auto after_sig = topo_function_signature(gt, c.target_id);
    if (!before_sig || !after_sig || !(*before_sig == *after_sig)) {
      report.violations.push_back(
          {"function-preserving-reroute", c.target_id,
           "reroute-flagged element changes its topological function",
           Severity::kError});
    }
  }

  return report;
}

}  // namespace lanekit
