#include "lanekit/stats.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lanekit/crop.hpp"

namespace lanekit {

const std::vector<std::string>& stats_row_labels() {
  static const std::vector<std::string> kLabels = {
      "total",        "changed",      "ls/geometry", "ls/mark",
      "ls/insertion", "ls/deletion",  "ls/topology", "ls/type",
      "pc/geometry",  "pc/insertion", "pc/deletion",
  };
  return kLabels;
}

namespace {

// Category rows an element's change tags fall into.
std::vector<std::string> categories_for(bool is_lane,
                                        const std::vector<std::string>& hist) {
  std::vector<std::string> rows;
  auto add = [&](std::string_view row) { rows.emplace_back(row); };
  const std::string prefix = is_lane ? "ls/" : "pc/";
  for (const std::string& t : hist) {
    if (t == tag::kGeometry) add(prefix + "geometry");
    if (t == tag::kReroute && is_lane) add("ls/topology");
    if (t == tag::kMarking && is_lane) add("ls/mark");
    if (t == tag::kType && is_lane) add("ls/type");
    if (t == tag::kInsertion) add(prefix + "insertion");
    if (t == tag::kDeletion) add(prefix + "deletion");
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

struct StatElement {
  bool is_lane = false;
  std::vector<Polyline2D> polylines;
  std::vector<std::string> categories;
  bool changed = false;
};

bool element_in_frame(const StatElement& e, const EgoPose& pose, double extent) {
  const double half = extent / 2.0;
  for (const Polyline2D& p : e.polylines) {
    if (!clip_polyline_to_box(to_ego_frame(p, pose), half).empty()) return true;
  }
  return false;
}

}  // namespace

StatsTable compute_stats(const std::vector<StatsInput>& inputs, double extent) {
  StatsTable table;

  for (const StatsInput& input : inputs) {
    auto& rows = table.splits[input.split];
    for (const std::string& label : stats_row_labels()) rows[label];

    // Materialize all countable elements: the scene's elements plus the
    // deleted ones carried by the change set.
    std::vector<StatElement> elements;
    for (const auto& [id, ls] : input.scene.lane_segments) {
      StatElement e;
      e.is_lane = true;
      e.polylines = {ls.left_boundary, ls.right_boundary, ls.centerline};
      e.categories = categories_for(true, ls.change_hist);
      e.changed = !ls.change_hist.empty();
      elements.push_back(std::move(e));
    }
    for (const auto& [id, pc] : input.scene.pedestrian_crossings) {
      StatElement e;
      e.is_lane = false;
      e.polylines = {pc.left_boundary, pc.right_boundary, pc.centerline};
      e.categories = categories_for(false, pc.change_hist);
      e.changed = !pc.change_hist.empty();
      elements.push_back(std::move(e));
    }
    if (input.changes) {
      for (const AtomicChange& c : input.changes->changes()) {
        const auto* del = c.as<DeletionChange>();
        if (!del) continue;
        StatElement e;
        e.is_lane = del->element.is_lane();
        const ElementGeometry g = del->element.geometry();
        e.polylines = {g.left, g.right, g.center};
        e.categories = {std::string(e.is_lane ? "ls/" : "pc/") + "deletion"};
        e.changed = true;
        elements.push_back(std::move(e));
      }
    }

    // Element level.
    rows["total"].element += static_cast<std::int64_t>(elements.size());
    std::set<std::string> scene_rows;
    for (const StatElement& e : elements) {
      if (e.changed) {
        rows["changed"].element += 1;
        scene_rows.insert("changed");
      }
      for (const std::string& cat : e.categories) {
        rows[cat].element += 1;
        scene_rows.insert(cat);
      }
    }

    // Global level: one per scene.
    rows["total"].global += 1;
    for (const std::string& row : scene_rows) rows[row].global += 1;

    // Frame level: one candidate frame per pose.
    for (const EgoPose& pose : input.trajectory) {
      rows["total"].frame += 1;
      std::set<std::string> frame_rows;
      for (const StatElement& e : elements) {
        if (e.categories.empty() && !e.changed) continue;
        if (!element_in_frame(e, pose, extent)) continue;
        if (e.changed) frame_rows.insert("changed");
        for (const std::string& cat : e.categories) frame_rows.insert(cat);
      }
      for (const std::string& row : frame_rows) rows[row].frame += 1;
    }
  }

  return table;
}

nlohmann::json stats_to_json(const StatsTable& table) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [split, rows] : table.splits) {
    nlohmann::json split_json = nlohmann::json::object();
    for (const std::string& label : stats_row_labels()) {
      const StatsCell cell =
          rows.count(label) > 0 ? rows.at(label) : StatsCell{};
      split_json[label] = nlohmann::json{
          {"global", cell.global}, {"frame", cell.frame}, {"element", cell.element}};
    }
    doc[split] = std::move(split_json);
  }
  return doc;
}

std::string render_stats_table(const StatsTable& table) {
  std::ostringstream out;
  out << "  category     ";
  for (const auto& [split, rows] : table.splits) {
    out.width(30);
    out << std::left << (split + " (global/frame/element)");
  }
  out << "\n";
  for (const std::string& label : stats_row_labels()) {
    out << "  ";
    out.width(13);
    out << std::left << label;
    for (const auto& [split, rows] : table.splits) {
      const StatsCell cell = rows.count(label) > 0 ? rows.at(label) : StatsCell{};
      std::ostringstream cellstr;
      cellstr << cell.global << " / " << cell.frame << " / " << cell.element;
      out.width(30);
      out << std::left << cellstr.str();
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace lanekit
