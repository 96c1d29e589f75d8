#include "lanekit/change.hpp"

#include <algorithm>
#include <tuple>

#include "lanekit/errors.hpp"
#include "lanekit/json_io.hpp"

namespace lanekit {

using nlohmann::json;

std::string_view to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::kGeometry: return "geometry";
    case ChangeKind::kMarking: return "marking";
    case ChangeKind::kType: return "type";
    case ChangeKind::kConnectivity: return "connectivity";
    case ChangeKind::kInsertion: return "insertion";
    case ChangeKind::kDeletion: return "deletion";
  }
  return "geometry";
}

std::string_view to_string(BoundarySide s) {
  return s == BoundarySide::kLeft ? "left" : "right";
}

std::string_view to_string(ConnectivityField f) {
  switch (f) {
    case ConnectivityField::kSuccessors: return "successors";
    case ConnectivityField::kPredecessors: return "predecessors";
    case ConnectivityField::kLeftNeighbor: return "left_neighbor";
    case ConnectivityField::kRightNeighbor: return "right_neighbor";
  }
  return "successors";
}

ElementGeometry geometry_of(const LaneSegment& ls) {
  return {ls.left_boundary, ls.right_boundary, ls.centerline};
}

ElementGeometry geometry_of(const PedestrianCrossing& pc) {
  return {pc.left_boundary, pc.right_boundary, pc.centerline};
}

ElementId ElementPayload::id() const {
  return std::visit([](const auto& e) { return e.id; }, element);
}

ElementGeometry ElementPayload::geometry() const {
  return std::visit([](const auto& e) { return geometry_of(e); }, element);
}

namespace {

template <typename T>
T cleared_annotations(T element) {
  element.is_modified = false;
  element.change_hist.clear();
  return element;
}

}  // namespace

ElementPayload make_payload(LaneSegment ls) {
  return ElementPayload{cleared_annotations(std::move(ls))};
}

ElementPayload make_payload(PedestrianCrossing pc) {
  return ElementPayload{cleared_annotations(std::move(pc))};
}

ChangeKind AtomicChange::kind() const {
  switch (op.index()) {
    case 0: return ChangeKind::kGeometry;
    case 1: return ChangeKind::kMarking;
    case 2: return ChangeKind::kType;
    case 3: return ChangeKind::kConnectivity;
    case 4: return ChangeKind::kInsertion;
    default: return ChangeKind::kDeletion;
  }
}

namespace {

// (target, kind rank, sub-key) — the canonical uniqueness key.
std::tuple<ElementId, int, int> sort_key(const AtomicChange& c) {
  int sub = 0;
  if (const auto* m = c.as<MarkingChange>()) sub = static_cast<int>(m->side);
  if (const auto* cc = c.as<ConnectivityChange>()) sub = static_cast<int>(cc->field);
  return {c.target_id, static_cast<int>(c.kind()), sub};
}

}  // namespace

void ChangeSet::add(AtomicChange change) {
  const ChangeKind kind = change.kind();
  if (kind == ChangeKind::kInsertion || kind == ChangeKind::kDeletion) {
    const auto* ins = change.as<InsertionChange>();
    const auto* del = change.as<DeletionChange>();
    const ElementId payload_id = ins ? ins->element.id() : del->element.id();
    if (payload_id != change.target_id) {
      throw ConflictingChange("payload id does not match target id " +
                              std::to_string(change.target_id));
    }
  }
  // Non-insert/delete kinds must actually change something.
  if (const auto* g = change.as<GeometryChange>()) {
    if (g->before == g->after) {
      throw ConflictingChange("geometry change with before == after");
    }
  } else if (const auto* m = change.as<MarkingChange>()) {
    if (m->before == m->after) {
      throw ConflictingChange("marking change with before == after");
    }
  } else if (const auto* t = change.as<TypeChange>()) {
    if (t->before == t->after) {
      throw ConflictingChange("type change with before == after");
    }
  } else if (const auto* c = change.as<ConnectivityChange>()) {
    if (c->before == c->after) {
      throw ConflictingChange("connectivity change with before == after");
    }
  }

  const auto key = sort_key(change);
  auto it = std::lower_bound(
      changes_.begin(), changes_.end(), key,
      [](const AtomicChange& a, const auto& k) { return sort_key(a) < k; });
  if (it != changes_.end() && sort_key(*it) == key) {
    throw ConflictingChange("duplicate change for target " +
                            std::to_string(change.target_id));
  }
  // An inserted or deleted target carries no other change kinds.
  for (const AtomicChange& existing : changes_) {
    if (existing.target_id != change.target_id) continue;
    const bool either_structural =
        existing.kind() == ChangeKind::kInsertion ||
        existing.kind() == ChangeKind::kDeletion ||
        kind == ChangeKind::kInsertion || kind == ChangeKind::kDeletion;
    if (either_structural) {
      throw ConflictingChange(
          "insertion/deletion target " + std::to_string(change.target_id) +
          " cannot carry additional changes");
    }
  }
  changes_.insert(it, std::move(change));
}

std::size_t ChangeSet::count(ChangeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(changes_.begin(), changes_.end(),
                    [&](const AtomicChange& c) { return c.kind() == kind; }));
}

std::vector<const AtomicChange*> ChangeSet::for_target(ElementId id) const {
  std::vector<const AtomicChange*> out;
  for (const AtomicChange& c : changes_) {
    if (c.target_id == id) out.push_back(&c);
  }
  return out;
}

namespace {

json geometry_to_json(const ElementGeometry& g) {
  return json{{"left_boundary", polyline_to_json(g.left)},
              {"right_boundary", polyline_to_json(g.right)},
              {"centerline", polyline_to_json(g.center)}};
}

ElementGeometry geometry_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected geometry object");
  ElementGeometry g;
  g.left = polyline_from_json(j.at("left_boundary"), path + "/left_boundary");
  g.right = polyline_from_json(j.at("right_boundary"), path + "/right_boundary");
  g.center = polyline_from_json(j.at("centerline"), path + "/centerline");
  return g;
}

json semantics_to_json(const LaneSemantics& s) {
  return json{{"lane_type", std::string(to_string(s.lane_type))},
              {"is_intersection", s.is_intersection}};
}

LaneSemantics semantics_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected semantics object");
  LaneSemantics s;
  const std::string type = j.at("lane_type").get<std::string>();
  const auto lt = lane_type_from_string(type);
  if (!lt) throw SchemaError(path + "/lane_type", "unknown lane type");
  s.lane_type = *lt;
  s.is_intersection = j.at("is_intersection").get<bool>();
  return s;
}

json mark_to_json2(const LaneMarkType& m) {
  return json{{"mark", std::string(to_string(m.mark))},
              {"color", std::string(to_string(m.color))}};
}

LaneMarkType mark_from_json2(const json& j, const std::string& path) {
  const auto m = mark_type_from_string(j.at("mark").get<std::string>());
  const auto c = mark_color_from_string(j.at("color").get<std::string>());
  if (!m || !c) throw SchemaError(path, "unknown mark type or color");
  return LaneMarkType{*m, *c};
}

json payload_to_json(const ElementPayload& p) {
  json j;
  if (p.is_lane()) {
    j["element_kind"] = "lane_segment";
    j["element"] = lane_segment_to_json(std::get<LaneSegment>(p.element));
  } else {
    j["element_kind"] = "pedestrian_crossing";
    j["element"] = crossing_to_json(std::get<PedestrianCrossing>(p.element));
  }
  return j;
}

ElementPayload payload_from_json(const json& j, const std::string& path) {
  const std::string kind = j.at("element_kind").get<std::string>();
  if (kind == "lane_segment") {
    return ElementPayload{lane_segment_from_json(j.at("element"), path + "/element")};
  }
  if (kind == "pedestrian_crossing") {
    return ElementPayload{crossing_from_json(j.at("element"), path + "/element")};
  }
  throw SchemaError(path + "/element_kind", "unknown element kind '" + kind + "'");
}

json ids_to_json(const std::vector<ElementId>& ids) {
  json arr = json::array();
  for (ElementId id : ids) arr.push_back(id);
  return arr;
}

std::vector<ElementId> ids_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected array of ids");
  std::vector<ElementId> ids;
  for (const json& v : j) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected integer id");
    ids.push_back(v.get<ElementId>());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

json changeset_to_json(const ChangeSet& cs) {
  json doc;
  doc["base_scene_id"] = cs.base_scene_id();
  json arr = json::array();
  for (const AtomicChange& c : cs.changes()) {
    json entry;
    entry["target_id"] = c.target_id;
    entry["kind"] = std::string(to_string(c.kind()));
    if (const auto* g = c.as<GeometryChange>()) {
      entry["before"] = geometry_to_json(g->before);
      entry["after"] = geometry_to_json(g->after);
      entry["reroute"] = g->reroute;
    } else if (const auto* m = c.as<MarkingChange>()) {
      entry["side"] = std::string(to_string(m->side));
      entry["before"] = mark_to_json2(m->before);
      entry["after"] = mark_to_json2(m->after);
    } else if (const auto* t = c.as<TypeChange>()) {
      entry["before"] = semantics_to_json(t->before);
      entry["after"] = semantics_to_json(t->after);
    } else if (const auto* cc = c.as<ConnectivityChange>()) {
      entry["field"] = std::string(to_string(cc->field));
      entry["before"] = ids_to_json(cc->before);
      entry["after"] = ids_to_json(cc->after);
    } else if (const auto* ins = c.as<InsertionChange>()) {
      entry.update(payload_to_json(ins->element));
    } else if (const auto* del = c.as<DeletionChange>()) {
      entry.update(payload_to_json(del->element));
    }
    arr.push_back(std::move(entry));
  }
  doc["changes"] = std::move(arr);
  return doc;
}

ChangeSet changeset_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "expected changeset object");
  ChangeSet cs(doc.at("base_scene_id").get<std::string>());
  const json& arr = doc.at("changes");
  if (!arr.is_array()) throw SchemaError("/changes", "expected array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& entry = arr[i];
    const std::string path = "/changes/" + std::to_string(i);
    AtomicChange c;
    c.target_id = entry.at("target_id").get<ElementId>();
    const std::string kind = entry.at("kind").get<std::string>();
    if (kind == "geometry") {
      GeometryChange g;
      g.before = geometry_from_json(entry.at("before"), path + "/before");
      g.after = geometry_from_json(entry.at("after"), path + "/after");
      g.reroute = entry.value("reroute", false);
      c.op = std::move(g);
    } else if (kind == "marking") {
      MarkingChange m;
      const std::string side = entry.at("side").get<std::string>();
      if (side == "left") {
        m.side = BoundarySide::kLeft;
      } else if (side == "right") {
        m.side = BoundarySide::kRight;
      } else {
        throw SchemaError(path + "/side", "expected 'left' or 'right'");
      }
      m.before = mark_from_json2(entry.at("before"), path + "/before");
      m.after = mark_from_json2(entry.at("after"), path + "/after");
      c.op = m;
    } else if (kind == "type") {
      TypeChange t;
      t.before = semantics_from_json(entry.at("before"), path + "/before");
      t.after = semantics_from_json(entry.at("after"), path + "/after");
      c.op = t;
    } else if (kind == "connectivity") {
      ConnectivityChange cc;
      const std::string field = entry.at("field").get<std::string>();
      if (field == "successors") {
        cc.field = ConnectivityField::kSuccessors;
      } else if (field == "predecessors") {
        cc.field = ConnectivityField::kPredecessors;
      } else if (field == "left_neighbor") {
        cc.field = ConnectivityField::kLeftNeighbor;
      } else if (field == "right_neighbor") {
        cc.field = ConnectivityField::kRightNeighbor;
      } else {
        throw SchemaError(path + "/field", "unknown connectivity field");
      }
      cc.before = ids_from_json(entry.at("before"), path + "/before");
      cc.after = ids_from_json(entry.at("after"), path + "/after");
      c.op = std::move(cc);
    } else if (kind == "insertion") {
      c.op = InsertionChange{payload_from_json(entry, path)};
    } else if (kind == "deletion") {
      c.op = DeletionChange{payload_from_json(entry, path)};
    } else {
      throw SchemaError(path + "/kind", "unknown change kind '" + kind + "'");
    }
    cs.add(std::move(c));
  }
  return cs;
}

std::string serialize_changeset(const ChangeSet& cs) {
  return canonical_dump(changeset_to_json(cs));
}

ChangeSet parse_changeset(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return changeset_from_json(doc);
}

}  // namespace lanekit
