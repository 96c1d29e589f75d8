#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "lanekit/map.hpp"

namespace lanekit {

// One endpoint of a lane segment: (id, kStart) or (id, kEnd).
struct EndpointSlot {
  ElementId segment = 0;
  enum End : int { kStart = 0, kEnd = 1 } end = kStart;

  auto operator<=>(const EndpointSlot&) const = default;
};

// Non-directional road graph: junctions are vertices, lane segments are
// edges. Vertices are the equivalence classes of segment endpoints joined by
// predecessor/successor links; pedestrian crossings are not part of the
// graph.
struct LaneGraph {
  struct Edge {
    ElementId segment = 0;
    int start_vertex = 0;
    int end_vertex = 0;
  };

  std::vector<std::vector<EndpointSlot>> vertices;  // slots per vertex, sorted
  std::vector<Edge> edges;                          // one per lane segment

  int vertex_of(EndpointSlot slot) const;
  int degree(int vertex) const;
  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t edge_count() const { return edges.size(); }

  // slot -> minimal slot of its equivalence class; equal maps mean equal
  // junction structure.
  std::map<EndpointSlot, EndpointSlot> partition_map() const;
};

LaneGraph build_lane_graph(const MapScene& scene);

// True when the junction partitions over the segments shared by both scenes
// differ, or the lane-segment edge sets differ. This is the topology gate
// used by macro classification and canonical-form validation.
bool lane_graph_topology_changed(const MapScene& before, const MapScene& after);

}  // namespace lanekit
