#include "lanekit/diff.hpp"

#include <algorithm>
#include <cmath>

#include "lanekit/canonical.hpp"
#include "lanekit/errors.hpp"

namespace lanekit {

namespace {

void append_tag(std::vector<std::string>& hist, std::string_view tag) {
  if (std::find(hist.begin(), hist.end(), tag) == hist.end()) {
    hist.emplace_back(tag);
  }
}

template <typename T>
void annotate(T& element, std::string_view tag, const ApplyOptions& options) {
  if (!options.annotate) return;
  append_tag(element.change_hist, tag);
  element.is_modified = true;
}

void sorted_insert(std::vector<ElementId>& ids, ElementId id) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) ids.insert(it, id);
}

bool sorted_erase(std::vector<ElementId>& ids, ElementId id) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it != ids.end() && *it == id) {
    ids.erase(it);
    return true;
  }
  return false;
}

// Removes every reference to `deleted` from the scene, tagging touched
// elements with a connectivity change.
void scrub_references(MapScene& scene, ElementId deleted,
                      const ApplyOptions& options) {
  for (auto& [id, ls] : scene.lane_segments) {
    bool touched = false;
    touched |= sorted_erase(ls.successors, deleted);
    touched |= sorted_erase(ls.predecessors, deleted);
    if (ls.left_neighbor == deleted) {
      ls.left_neighbor.reset();
      touched = true;
    }
    if (ls.right_neighbor == deleted) {
      ls.right_neighbor.reset();
      touched = true;
    }
    if (touched) annotate(ls, tag::kConnectivity, options);
  }
}

void set_geometry(LaneSegment& ls, const ElementGeometry& g) {
  ls.left_boundary = g.left;
  ls.right_boundary = g.right;
  ls.centerline = g.center;
}

void set_geometry(PedestrianCrossing& pc, const ElementGeometry& g) {
  pc.left_boundary = g.left;
  pc.right_boundary = g.right;
  pc.centerline = g.center;
}

}  // namespace

MapScene apply_changeset(const MapScene& scene, const ChangeSet& cs,
                         const ApplyOptions& options) {
  if (cs.base_scene_id() != scene.scene_id) {
    throw ConflictingChange("changeset targets scene '" + cs.base_scene_id() +
                            "', got '" + scene.scene_id + "'");
  }

  MapScene out = scene;

  // Phase 1: deletions.
  for (const AtomicChange& c : cs.changes()) {
    const auto* del = c.as<DeletionChange>();
    if (!del) continue;
    const bool is_lane = del->element.is_lane();
    if (is_lane) {
      if (out.lane_segments.erase(c.target_id) == 0) {
        throw TargetMissing("deletion target " + std::to_string(c.target_id) +
                            " not in scene");
      }
    } else {
      if (out.pedestrian_crossings.erase(c.target_id) == 0) {
        throw TargetMissing("deletion target " + std::to_string(c.target_id) +
                            " not in scene");
      }
    }
    scrub_references(out, c.target_id, options);
  }

  // Phase 2: insertions, then predecessor/successor back-links.
  std::vector<ElementId> inserted_lanes;
  for (const AtomicChange& c : cs.changes()) {
    const auto* ins = c.as<InsertionChange>();
    if (!ins) continue;
    if (out.has_element(c.target_id)) {
      throw IdCollision("insertion reuses id " + std::to_string(c.target_id));
    }
    if (ins->element.is_lane()) {
      LaneSegment ls = std::get<LaneSegment>(ins->element.element);
      ls.is_modified = false;
      ls.change_hist.clear();
      annotate(ls, tag::kInsertion, options);
      out.lane_segments.emplace(c.target_id, std::move(ls));
      inserted_lanes.push_back(c.target_id);
    } else {
      PedestrianCrossing pc = std::get<PedestrianCrossing>(ins->element.element);
      pc.is_modified = false;
      pc.change_hist.clear();
      annotate(pc, tag::kInsertion, options);
      out.pedestrian_crossings.emplace(c.target_id, std::move(pc));
    }
  }
  for (ElementId id : inserted_lanes) {
    const LaneSegment& inserted = out.lane_segments.at(id);
    const auto preds = inserted.predecessors;
    const auto succs = inserted.successors;
    for (ElementId p : preds) {
      auto it = out.lane_segments.find(p);
      if (it == out.lane_segments.end()) continue;
      auto& list = it->second.successors;
      if (!std::binary_search(list.begin(), list.end(), id)) {
        sorted_insert(list, id);
        annotate(it->second, tag::kConnectivity, options);
      }
    }
    for (ElementId s : succs) {
      auto it = out.lane_segments.find(s);
      if (it == out.lane_segments.end()) continue;
      auto& list = it->second.predecessors;
      if (!std::binary_search(list.begin(), list.end(), id)) {
        sorted_insert(list, id);
        annotate(it->second, tag::kConnectivity, options);
      }
    }
  }

  // Phase 3: field-level edits, canonical order.
  for (const AtomicChange& c : cs.changes()) {
    const ChangeKind kind = c.kind();
    if (kind == ChangeKind::kInsertion || kind == ChangeKind::kDeletion) continue;

    LaneSegment* ls = nullptr;
    PedestrianCrossing* pc = nullptr;
    if (auto it = out.lane_segments.find(c.target_id); it != out.lane_segments.end()) {
      ls = &it->second;
    } else if (auto pit = out.pedestrian_crossings.find(c.target_id);
               pit != out.pedestrian_crossings.end()) {
      pc = &pit->second;
    } else {
      throw TargetMissing("change target " + std::to_string(c.target_id) +
                          " not in scene");
    }

    if (const auto* g = c.as<GeometryChange>()) {
      if (ls) {
        set_geometry(*ls, g->after);
        annotate(*ls, g->reroute ? tag::kReroute : tag::kGeometry, options);
      } else {
        set_geometry(*pc, g->after);
        annotate(*pc, g->reroute ? tag::kReroute : tag::kGeometry, options);
      }
    } else if (const auto* m = c.as<MarkingChange>()) {
      if (!ls) {
        throw ConflictingChange("marking change on pedestrian crossing " +
                                std::to_string(c.target_id));
      }
      (m->side == BoundarySide::kLeft ? ls->left_mark : ls->right_mark) = m->after;
      annotate(*ls, tag::kMarking, options);
    } else if (const auto* t = c.as<TypeChange>()) {
      if (!ls) {
        throw ConflictingChange("type change on pedestrian crossing " +
                                std::to_string(c.target_id));
      }
      ls->lane_type = t->after.lane_type;
      ls->is_intersection = t->after.is_intersection;
      annotate(*ls, tag::kType, options);
    } else if (const auto* cc = c.as<ConnectivityChange>()) {
      if (!ls) {
        throw ConflictingChange("connectivity change on pedestrian crossing " +
                                std::to_string(c.target_id));
      }
      switch (cc->field) {
        case ConnectivityField::kSuccessors:
          ls->successors = cc->after;
          break;
        case ConnectivityField::kPredecessors:
          ls->predecessors = cc->after;
          break;
        case ConnectivityField::kLeftNeighbor:
          ls->left_neighbor = cc->after.empty()
                                  ? std::nullopt
                                  : std::optional<ElementId>(cc->after.front());
          break;
        case ConnectivityField::kRightNeighbor:
          ls->right_neighbor = cc->after.empty()
                                   ? std::nullopt
                                   : std::optional<ElementId>(cc->after.front());
          break;
      }
      annotate(*ls, tag::kConnectivity, options);
    }
  }

  // Referential integrity must hold afterwards.
  for (const auto& [id, ls] : out.lane_segments) {
    auto check = [&](ElementId ref, const char* field) {
      if (out.lane_segments.count(ref) == 0) {
        throw IntegrityError(ref, "applying changeset left dangling " +
                                      std::string(field) + " on segment " +
                                      std::to_string(id));
      }
    };
    for (ElementId s : ls.successors) check(s, "successor");
    for (ElementId p : ls.predecessors) check(p, "predecessor");
    if (ls.left_neighbor) check(*ls.left_neighbor, "left neighbor");
    if (ls.right_neighbor) check(*ls.right_neighbor, "right neighbor");
  }

  return out;
}

bool geometry_differs(const ElementGeometry& a, const ElementGeometry& b,
                      double tolerance_m) {
  constexpr int kSampleCount = 10;
  auto max_deviation = [](const Polyline2D& p, const Polyline2D& q) {
    const Polyline2D rp = resample_polyline(p, kSampleCount);
    const Polyline2D rq = resample_polyline(q, kSampleCount);
    double worst = 0.0;
    for (int i = 0; i < kSampleCount; ++i) {
      worst = std::max(worst, distance(rp[static_cast<std::size_t>(i)],
                                       rq[static_cast<std::size_t>(i)]));
    }
    return worst;
  };
  return max_deviation(a.left, b.left) > tolerance_m ||
         max_deviation(a.right, b.right) > tolerance_m ||
         max_deviation(a.center, b.center) > tolerance_m;
}

namespace {

std::vector<ElementId> neighbor_as_list(const std::optional<ElementId>& n) {
  return n ? std::vector<ElementId>{*n} : std::vector<ElementId>{};
}

void diff_lane_pair(const LaneSegment& before, const LaneSegment& after,
                    const MapScene& prior, const MapScene& gt, ChangeSet& cs) {
  if (geometry_differs(geometry_of(before), geometry_of(after))) {
    GeometryChange g;
    g.before = geometry_of(before);
    g.after = geometry_of(after);
    // A geometry edit inside an intersection whose connections moved while
    // the element keeps its topological function is a re-route.
    const bool connectivity_moved = before.successors != after.successors ||
                                    before.predecessors != after.predecessors;
    if (before.is_intersection && after.is_intersection && connectivity_moved) {
      const auto before_sig = topo_function_signature(prior, before.id);
      const auto after_sig = topo_function_signature(gt, after.id);
      g.reroute = before_sig && after_sig && *before_sig == *after_sig;
    }
    cs.add({before.id, std::move(g)});
  }
  if (before.left_mark != after.left_mark) {
    cs.add({before.id,
            MarkingChange{BoundarySide::kLeft, before.left_mark, after.left_mark}});
  }
  if (before.right_mark != after.right_mark) {
    cs.add({before.id, MarkingChange{BoundarySide::kRight, before.right_mark,
                                     after.right_mark}});
  }
  if (before.lane_type != after.lane_type ||
      before.is_intersection != after.is_intersection) {
    cs.add({before.id,
            TypeChange{{before.lane_type, before.is_intersection},
                       {after.lane_type, after.is_intersection}}});
  }
  auto diff_conn = [&](ConnectivityField field, std::vector<ElementId> b,
                       std::vector<ElementId> a) {
    if (b != a) cs.add({before.id, ConnectivityChange{field, std::move(b), std::move(a)}});
  };
  diff_conn(ConnectivityField::kSuccessors, before.successors, after.successors);
  diff_conn(ConnectivityField::kPredecessors, before.predecessors,
            after.predecessors);
  diff_conn(ConnectivityField::kLeftNeighbor, neighbor_as_list(before.left_neighbor),
            neighbor_as_list(after.left_neighbor));
  diff_conn(ConnectivityField::kRightNeighbor,
            neighbor_as_list(before.right_neighbor),
            neighbor_as_list(after.right_neighbor));
}

}  // namespace

ChangeSet diff_maps(const MapScene& prior, const MapScene& gt) {
  ChangeSet cs(prior.scene_id);

  for (const auto& [id, before] : prior.lane_segments) {
    auto it = gt.lane_segments.find(id);
    if (it == gt.lane_segments.end()) {
      cs.add({id, DeletionChange{make_payload(before)}});
      continue;
    }
    diff_lane_pair(before, it->second, prior, gt, cs);
  }
  for (const auto& [id, after] : gt.lane_segments) {
    if (prior.lane_segments.count(id) == 0) {
      cs.add({id, InsertionChange{make_payload(after)}});
    }
  }

  for (const auto& [id, before] : prior.pedestrian_crossings) {
    auto it = gt.pedestrian_crossings.find(id);
    if (it == gt.pedestrian_crossings.end()) {
      cs.add({id, DeletionChange{make_payload(before)}});
      continue;
    }
    if (geometry_differs(geometry_of(before), geometry_of(it->second))) {
      GeometryChange g;
      g.before = geometry_of(before);
      g.after = geometry_of(it->second);
      cs.add({id, std::move(g)});
    }
  }
  for (const auto& [id, after] : gt.pedestrian_crossings) {
    if (prior.pedestrian_crossings.count(id) == 0) {
      cs.add({id, InsertionChange{make_payload(after)}});
    }
  }

  return cs;
}

ChangeSet invert_changeset(const ChangeSet& cs, const MapScene& base) {
  ChangeSet out(cs.base_scene_id());
  for (const AtomicChange& c : cs.changes()) {
    if (c.kind() != ChangeKind::kInsertion && !base.has_element(c.target_id)) {
      throw TargetMissing("invert: target " + std::to_string(c.target_id) +
                          " not in base scene");
    }
    AtomicChange inv;
    inv.target_id = c.target_id;
    if (const auto* g = c.as<GeometryChange>()) {
      inv.op = GeometryChange{g->after, g->before, g->reroute};
    } else if (const auto* m = c.as<MarkingChange>()) {
      inv.op = MarkingChange{m->side, m->after, m->before};
    } else if (const auto* t = c.as<TypeChange>()) {
      inv.op = TypeChange{t->after, t->before};
    } else if (const auto* conn = c.as<ConnectivityChange>()) {
      inv.op = ConnectivityChange{conn->field, conn->after, conn->before};
    } else if (const auto* ins = c.as<InsertionChange>()) {
      inv.op = DeletionChange{ins->element};
    } else if (const auto* del = c.as<DeletionChange>()) {
      inv.op = InsertionChange{del->element};
    }
    out.add(std::move(inv));
  }
  return out;
}

}  // namespace lanekit
