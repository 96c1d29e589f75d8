#include "lanekit/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lanekit/errors.hpp"

namespace lanekit {

using nlohmann::json;

namespace {

const json& require_field(const json& obj, const char* key,
                          const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(path, std::string("missing field '") + key + "'");
  }
  return *it;
}

std::string get_string(const json& obj, const char* key,
                       const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_string()) {
    throw SchemaError(path + "/" + key, "expected string");
  }
  return v.get<std::string>();
}

bool get_bool(const json& obj, const char* key, const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_boolean()) {
    throw SchemaError(path + "/" + key, "expected boolean");
  }
  return v.get<bool>();
}

ElementId get_id(const json& v, const std::string& path) {
  if (!v.is_number_integer()) {
    throw SchemaError(path, "expected integer id");
  }
  return v.get<ElementId>();
}

std::vector<ElementId> get_id_list(const json& obj, const char* key,
                                   const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_array()) {
    throw SchemaError(path + "/" + key, "expected array of ids");
  }
  std::vector<ElementId> ids;
  ids.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    ids.push_back(get_id(v[i], path + "/" + key + "/" + std::to_string(i)));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::optional<ElementId> get_opt_id(const json& obj, const char* key,
                                    const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return get_id(*it, path + "/" + key);
}

LaneMarkType mark_from_json(const json& v, const std::string& path) {
  if (!v.is_object()) {
    throw SchemaError(path, "expected object with 'mark' and 'color'");
  }
  const std::string mark = get_string(v, "mark", path);
  const std::string color = get_string(v, "color", path);
  const auto m = mark_type_from_string(mark);
  if (!m) throw SchemaError(path + "/mark", "unknown mark type '" + mark + "'");
  const auto c = mark_color_from_string(color);
  if (!c) throw SchemaError(path + "/color", "unknown mark color '" + color + "'");
  return LaneMarkType{*m, *c};
}

json mark_to_json(const LaneMarkType& m) {
  return json{{"mark", std::string(to_string(m.mark))},
              {"color", std::string(to_string(m.color))}};
}

std::vector<std::string> get_change_hist(const json& obj,
                                         const std::string& path) {
  const json& v = require_field(obj, "change_hist", path);
  if (!v.is_array()) {
    throw SchemaError(path + "/change_hist", "expected array of strings");
  }
  std::vector<std::string> hist;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      throw SchemaError(path + "/change_hist/" + std::to_string(i),
                        "expected string");
    }
    std::string tag = v[i].get<std::string>();
    if (!is_valid_change_tag(tag)) {
      throw SchemaError(path + "/change_hist/" + std::to_string(i),
                        "unknown change tag '" + tag + "'");
    }
    hist.push_back(std::move(tag));
  }
  return hist;
}

json id_list_to_json(const std::vector<ElementId>& ids) {
  json arr = json::array();
  for (ElementId id : ids) arr.push_back(id);
  return arr;
}

constexpr const char* kLaneFields[] = {
    "id",
    "is_intersection",
    "lane_type",
    "left_lane_boundary",
    "right_lane_boundary",
    "centerline",
    "left_lane_mark_type",
    "right_lane_mark_type",
    "successors",
    "predecessors",
    "left_neighbor_id",
    "right_neighbor_id",
    "is_modified",
    "change_hist",
};

constexpr const char* kCrossingFields[] = {
    "id",          "left_lane_boundary", "right_lane_boundary",
    "centerline",  "is_modified",        "change_hist",
};

template <std::size_t N>
json collect_extra(const json& obj, const char* const (&known)[N]) {
  json extra = json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool is_known = false;
    for (const char* k : known) {
      if (it.key() == k) {
        is_known = true;
        break;
      }
    }
    if (!is_known) extra[it.key()] = it.value();
  }
  return extra;
}

}  // namespace

Polyline2D polyline_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected array of points");
  Polyline2D p;
  p.points.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& pt = j[i];
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() ||
        !pt[1].is_number()) {
      throw SchemaError(path + "/" + std::to_string(i), "expected [x, y]");
    }
    p.points.push_back({pt[0].get<double>(), pt[1].get<double>()});
  }
  if (auto why = p.invariant_violation()) {
    throw GeometryError(path + ": " + *why);
  }
  return p;
}

json polyline_to_json(const Polyline2D& p) {
  json arr = json::array();
  for (const Vec2& v : p.points) arr.push_back(json::array({v.x, v.y}));
  return arr;
}

LaneSegment lane_segment_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected object");
  LaneSegment ls;
  ls.id = get_id(require_field(j, "id", path), path + "/id");
  ls.is_intersection = get_bool(j, "is_intersection", path);
  const std::string type_str = get_string(j, "lane_type", path);
  const auto type = lane_type_from_string(type_str);
  if (!type) {
    throw SchemaError(path + "/lane_type", "unknown lane type '" + type_str + "'");
  }
  ls.lane_type = *type;
  ls.left_boundary = polyline_from_json(require_field(j, "left_lane_boundary", path),
                                        path + "/left_lane_boundary");
  ls.right_boundary = polyline_from_json(
      require_field(j, "right_lane_boundary", path), path + "/right_lane_boundary");
  ls.centerline =
      polyline_from_json(require_field(j, "centerline", path), path + "/centerline");
  ls.left_mark = mark_from_json(require_field(j, "left_lane_mark_type", path),
                                path + "/left_lane_mark_type");
  ls.right_mark = mark_from_json(require_field(j, "right_lane_mark_type", path),
                                 path + "/right_lane_mark_type");
  ls.successors = get_id_list(j, "successors", path);
  ls.predecessors = get_id_list(j, "predecessors", path);
  ls.left_neighbor = get_opt_id(j, "left_neighbor_id", path);
  ls.right_neighbor = get_opt_id(j, "right_neighbor_id", path);
  ls.is_modified = get_bool(j, "is_modified", path);
  ls.change_hist = get_change_hist(j, path);
  ls.extra = collect_extra(j, kLaneFields);
  return ls;
}

PedestrianCrossing crossing_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected object");
  PedestrianCrossing pc;
  pc.id = get_id(require_field(j, "id", path), path + "/id");
  pc.left_boundary = polyline_from_json(require_field(j, "left_lane_boundary", path),
                                        path + "/left_lane_boundary");
  pc.right_boundary = polyline_from_json(
      require_field(j, "right_lane_boundary", path), path + "/right_lane_boundary");
  pc.centerline =
      polyline_from_json(require_field(j, "centerline", path), path + "/centerline");
  pc.is_modified = get_bool(j, "is_modified", path);
  pc.change_hist = get_change_hist(j, path);
  pc.extra = collect_extra(j, kCrossingFields);
  return pc;
}

json lane_segment_to_json(const LaneSegment& ls) {
  json j = ls.extra.is_object() ? ls.extra : json::object();
  j["id"] = ls.id;
  j["is_intersection"] = ls.is_intersection;
  j["lane_type"] = std::string(to_string(ls.lane_type));
  j["left_lane_boundary"] = polyline_to_json(ls.left_boundary);
  j["right_lane_boundary"] = polyline_to_json(ls.right_boundary);
  j["centerline"] = polyline_to_json(ls.centerline);
  j["left_lane_mark_type"] = mark_to_json(ls.left_mark);
  j["right_lane_mark_type"] = mark_to_json(ls.right_mark);
  j["successors"] = id_list_to_json(ls.successors);
  j["predecessors"] = id_list_to_json(ls.predecessors);
  j["left_neighbor_id"] = ls.left_neighbor ? json(*ls.left_neighbor) : json();
  j["right_neighbor_id"] = ls.right_neighbor ? json(*ls.right_neighbor) : json();
  j["is_modified"] = ls.is_modified;
  j["change_hist"] = ls.change_hist;
  return j;
}

json crossing_to_json(const PedestrianCrossing& pc) {
  json j = pc.extra.is_object() ? pc.extra : json::object();
  j["id"] = pc.id;
  j["left_lane_boundary"] = polyline_to_json(pc.left_boundary);
  j["right_lane_boundary"] = polyline_to_json(pc.right_boundary);
  j["centerline"] = polyline_to_json(pc.centerline);
  j["is_modified"] = pc.is_modified;
  j["change_hist"] = pc.change_hist;
  return j;
}

MapScene parse_map(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "expected top-level object");

  MapScene scene;
  scene.scene_id = get_string(doc, "scene_id", "");

  const json& ls_map = require_field(doc, "lane_segments", "");
  if (!ls_map.is_object()) throw SchemaError("/lane_segments", "expected object");
  for (auto it = ls_map.begin(); it != ls_map.end(); ++it) {
    const std::string path = "/lane_segments/" + it.key();
    LaneSegment ls = lane_segment_from_json(it.value(), path);
    ElementId key_id = 0;
    try {
      key_id = std::stoll(it.key());
    } catch (...) {
      throw SchemaError(path, "key is not an integer id");
    }
    if (key_id != ls.id) {
      throw SchemaError(path + "/id", "id does not match its map key");
    }
    if (!scene.lane_segments.emplace(ls.id, std::move(ls)).second) {
      throw IntegrityError(key_id, "duplicate lane segment id");
    }
  }

  const json& pc_map = require_field(doc, "pedestrian_crossings", "");
  if (!pc_map.is_object()) {
    throw SchemaError("/pedestrian_crossings", "expected object");
  }
  for (auto it = pc_map.begin(); it != pc_map.end(); ++it) {
    const std::string path = "/pedestrian_crossings/" + it.key();
    PedestrianCrossing pc = crossing_from_json(it.value(), path);
    ElementId key_id = 0;
    try {
      key_id = std::stoll(it.key());
    } catch (...) {
      throw SchemaError(path, "key is not an integer id");
    }
    if (key_id != pc.id) {
      throw SchemaError(path + "/id", "id does not match its map key");
    }
    if (scene.lane_segments.count(pc.id) > 0) {
      throw IntegrityError(pc.id, "id used by both a lane segment and a crossing");
    }
    if (!scene.pedestrian_crossings.emplace(pc.id, std::move(pc)).second) {
      throw IntegrityError(key_id, "duplicate pedestrian crossing id");
    }
  }

  constexpr const char* kTopFields[] = {"scene_id", "lane_segments",
                                        "pedestrian_crossings"};
  scene.extra = collect_extra(doc, kTopFields);

  // Referential integrity across the whole scene.
  for (const auto& [id, ls] : scene.lane_segments) {
    auto check = [&](ElementId ref, const char* field) {
      if (scene.lane_segments.count(ref) == 0) {
        throw IntegrityError(ref, "lane segment " + std::to_string(id) + " " +
                                      field + " references missing id");
      }
    };
    for (ElementId s : ls.successors) check(s, "successors");
    for (ElementId p : ls.predecessors) check(p, "predecessors");
    if (ls.left_neighbor) check(*ls.left_neighbor, "left_neighbor_id");
    if (ls.right_neighbor) check(*ls.right_neighbor, "right_neighbor_id");
  }

  return scene;
}

std::string format_fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

namespace {

void dump_impl(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case json::value_t::number_float:
      out += format_fixed3(j.get<double>());
      break;
    case json::value_t::string:
      out += json(j.get<std::string>()).dump();
      break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const json& v : j) {
        if (!first) out += ',';
        first = false;
        dump_impl(v, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      // nlohmann object iteration is already key-sorted.
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_impl(it.value(), out);
      }
      out += '}';
      break;
    }
    default:
      out += "null";
      break;
  }
}

}  // namespace

std::string canonical_dump(const json& j) {
  std::string out;
  dump_impl(j, out);
  out += '\n';
  return out;
}

std::string serialize_map(const MapScene& scene) {
  json doc = scene.extra.is_object() ? scene.extra : json::object();
  doc["scene_id"] = scene.scene_id;
  json ls_map = json::object();
  for (const auto& [id, ls] : scene.lane_segments) {
    ls_map[std::to_string(id)] = lane_segment_to_json(ls);
  }
  doc["lane_segments"] = std::move(ls_map);
  json pc_map = json::object();
  for (const auto& [id, pc] : scene.pedestrian_crossings) {
    pc_map[std::to_string(id)] = crossing_to_json(pc);
  }
  doc["pedestrian_crossings"] = std::move(pc_map);
  return canonical_dump(doc);
}

std::vector<EgoPose> parse_poses(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw SchemaError("", "expected array of poses");
  std::vector<EgoPose> poses;
  poses.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& p = doc[i];
    const std::string path = "/" + std::to_string(i);
    if (!p.is_object()) throw SchemaError(path, "expected pose object");
    EgoPose pose;
    const json& ts = require_field(p, "timestamp_ns", path);
    if (!ts.is_number_integer()) {
      throw SchemaError(path + "/timestamp_ns", "expected integer");
    }
    pose.timestamp_ns = ts.get<std::int64_t>();
    for (const char* key : {"x", "y", "heading_rad"}) {
      const json& v = require_field(p, key, path);
      if (!v.is_number()) {
        throw SchemaError(path + "/" + key, "expected number");
      }
    }
    pose.x = p["x"].get<double>();
    pose.y = p["y"].get<double>();
    pose.heading = p["heading_rad"].get<double>();
    if (!std::isfinite(pose.x) || !std::isfinite(pose.y) ||
        !std::isfinite(pose.heading)) {
      throw SchemaError(path, "non-finite pose value");
    }
    if (!poses.empty() && pose.timestamp_ns <= poses.back().timestamp_ns) {
      throw SchemaError(path + "/timestamp_ns",
                        "timestamps must be strictly increasing");
    }
    poses.push_back(pose);
  }
  return poses;
}

std::string serialize_poses(const std::vector<EgoPose>& poses) {
  json arr = json::array();
  for (const EgoPose& p : poses) {
    arr.push_back(json{{"timestamp_ns", p.timestamp_ns},
                       {"x", p.x},
                       {"y", p.y},
                       {"heading_rad", p.heading}});
  }
  return canonical_dump(arr);
}

}  // namespace lanekit
