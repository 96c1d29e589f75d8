// Second-pass recount oracle for compute_stats: independent direct scans.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lanekit/crop.hpp"
#include "lanekit/stats.hpp"

namespace lanekit::testing {

inline std::map<std::string, StatsCell> recount_split(
    const std::vector<StatsInput>& inputs, const std::string& split,
    double extent) {
  std::map<std::string, StatsCell> rows;
  for (const std::string& label : stats_row_labels()) rows[label];

  for (const StatsInput& input : inputs) {
    if (input.split != split) continue;
    struct Item {
      std::vector<Polyline2D> lines;
      std::set<std::string> cats;
      bool changed = false;
    };
    std::vector<Item> items;
    for (const auto& [id, ls] : input.scene.lane_segments) {
      Item item;
      item.lines = {ls.left_boundary, ls.right_boundary, ls.centerline};
      for (const std::string& t : ls.change_hist) {
        if (t == "geometry") item.cats.insert("ls/geometry");
        if (t == "reroute") item.cats.insert("ls/topology");
        if (t == "marking") item.cats.insert("ls/mark");
        if (t == "type") item.cats.insert("ls/type");
        if (t == "insertion") item.cats.insert("ls/insertion");
      }
      item.changed = !ls.change_hist.empty();
      items.push_back(item);
    }
    for (const auto& [id, pc] : input.scene.pedestrian_crossings) {
      Item item;
      item.lines = {pc.left_boundary, pc.right_boundary, pc.centerline};
      for (const std::string& t : pc.change_hist) {
        if (t == "geometry") item.cats.insert("pc/geometry");
        if (t == "insertion") item.cats.insert("pc/insertion");
      }
      item.changed = !pc.change_hist.empty();
      items.push_back(item);
    }
    if (input.changes) {
      for (const AtomicChange& c : input.changes->changes()) {
        if (const auto* del = c.as<DeletionChange>()) {
          Item item;
          const ElementGeometry g = del->element.geometry();
          item.lines = {g.left, g.right, g.center};
          item.cats.insert(del->element.is_lane() ? "ls/deletion" : "pc/deletion");
          item.changed = true;
          items.push_back(item);
        }
      }
    }

    rows["total"].global += 1;
    rows["total"].element += static_cast<std::int64_t>(items.size());
    std::set<std::string> scene_cats;
    for (const Item& item : items) {
      if (item.changed) {
        rows["changed"].element += 1;
        scene_cats.insert("changed");
      }
      for (const auto& cat : item.cats) {
        rows[cat].element += 1;
        scene_cats.insert(cat);
      }
    }
    for (const auto& cat : scene_cats) rows[cat].global += 1;

    for (const EgoPose& pose : input.trajectory) {
      rows["total"].frame += 1;
      std::set<std::string> frame_cats;
      for (const Item& item : items) {
        if (!item.changed) continue;
        bool in_frame = false;
        for (const Polyline2D& line : item.lines) {
          if (!clip_polyline_to_box(to_ego_frame(line, pose), extent / 2.0)
                   .empty()) {
            in_frame = true;
            break;
          }
        }
        if (!in_frame) continue;
        frame_cats.insert("changed");
        for (const auto& cat : item.cats) frame_cats.insert(cat);
      }
      for (const auto& cat : frame_cats) rows[cat].frame += 1;
    }
  }
  return rows;
}

}  // namespace lanekit::testing
