#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanekit/change.hpp"
#include "lanekit/map.hpp"

namespace lanekit {

// One annotated scene of a split: the ground-truth map (change_hist
// populated), the change set whose deletion payloads supply the removed
// elements, and the ego trajectory defining the frames.
struct StatsInput {
  std::string split;
  MapScene scene;
  std::optional<ChangeSet> changes;
  std::vector<EgoPose> trajectory;
};

struct StatsCell {
  std::int64_t global = 0;   // scenes with >= 1 such element
  std::int64_t frame = 0;    // frames (ego patches) with >= 1 such element
  std::int64_t element = 0;  // elements

  bool operator==(const StatsCell&) const = default;
};

// Fixed row labels: "total", "changed", then per element kind and change
// category ("ls/geometry", "ls/mark", "ls/insertion", "ls/deletion",
// "ls/topology", "ls/type", "pc/geometry", "pc/insertion", "pc/deletion").
const std::vector<std::string>& stats_row_labels();

struct StatsTable {
  // split -> row label -> cell; every split carries every row.
  std::map<std::string, std::map<std::string, StatsCell>> splits;

  bool operator==(const StatsTable&) const = default;
};

// Counts change annotations at global (scene), frame (extent x extent ego
// patch) and element level, split by category, matching the fixed row
// labels. Deleted elements come from the change sets' deletion payloads and
// are located by their payload geometry.
StatsTable compute_stats(const std::vector<StatsInput>& inputs,
                         double extent = 50.0);

nlohmann::json stats_to_json(const StatsTable& table);
std::string render_stats_table(const StatsTable& table);

}  // namespace lanekit
