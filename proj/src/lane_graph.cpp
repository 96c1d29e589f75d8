#include "lanekit/lane_graph.hpp"

#include <algorithm>
#include <numeric>

namespace lanekit {

namespace {

// Minimal union-find over endpoint slots.
class SlotUnion {
 public:
  explicit SlotUnion(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::map<EndpointSlot, EndpointSlot> partition_for(
    const std::map<ElementId, LaneSegment>& segments,
    const std::vector<ElementId>& ids) {
  std::vector<EndpointSlot> slots;
  slots.reserve(ids.size() * 2);
  std::map<EndpointSlot, std::size_t> index;
  for (ElementId id : ids) {
    for (auto end : {EndpointSlot::kStart, EndpointSlot::kEnd}) {
      index[{id, end}] = slots.size();
      slots.push_back({id, end});
    }
  }
  SlotUnion uf(slots.size());
  for (ElementId id : ids) {
    const LaneSegment& ls = segments.at(id);
    for (ElementId succ : ls.successors) {
      auto it = index.find({succ, EndpointSlot::kStart});
      if (it != index.end()) {
        uf.unite(index.at({id, EndpointSlot::kEnd}), it->second);
      }
    }
    for (ElementId pred : ls.predecessors) {
      auto it = index.find({pred, EndpointSlot::kEnd});
      if (it != index.end()) {
        uf.unite(index.at({id, EndpointSlot::kStart}), it->second);
      }
    }
  }
  // Representative of a class is its minimal slot; slot order matches the
  // union-find index order, so find() of the minimal index is the root.
  std::map<EndpointSlot, EndpointSlot> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    out[slots[i]] = slots[uf.find(i)];
  }
  return out;
}

}  // namespace

int LaneGraph::vertex_of(EndpointSlot slot) const {
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (std::binary_search(vertices[v].begin(), vertices[v].end(), slot)) {
      return static_cast<int>(v);
    }
  }
  return -1;
}

int LaneGraph::degree(int vertex) const {
  int d = 0;
  for (const Edge& e : edges) {
    if (e.start_vertex == vertex) ++d;
    if (e.end_vertex == vertex) ++d;
  }
  return d;
}

std::map<EndpointSlot, EndpointSlot> LaneGraph::partition_map() const {
  std::map<EndpointSlot, EndpointSlot> out;
  for (const auto& cls : vertices) {
    for (const EndpointSlot& slot : cls) out[slot] = cls.front();
  }
  return out;
}

LaneGraph build_lane_graph(const MapScene& scene) {
  std::vector<ElementId> ids;
  ids.reserve(scene.lane_segments.size());
  for (const auto& [id, ls] : scene.lane_segments) ids.push_back(id);

  const auto part = partition_for(scene.lane_segments, ids);

  LaneGraph g;
  std::map<EndpointSlot, int> vertex_index;
  for (const auto& [slot, rep] : part) {
    if (vertex_index.count(rep) == 0) {
      vertex_index[rep] = static_cast<int>(g.vertices.size());
      g.vertices.emplace_back();
    }
    g.vertices[vertex_index[rep]].push_back(slot);
  }
  for (auto& cls : g.vertices) std::sort(cls.begin(), cls.end());

  for (ElementId id : ids) {
    const auto start_rep = part.at({id, EndpointSlot::kStart});
    const auto end_rep = part.at({id, EndpointSlot::kEnd});
    g.edges.push_back({id, vertex_index.at(start_rep), vertex_index.at(end_rep)});
  }
  return g;
}

bool lane_graph_topology_changed(const MapScene& before, const MapScene& after) {
  std::vector<ElementId> before_ids;
  for (const auto& [id, ls] : before.lane_segments) before_ids.push_back(id);
  std::vector<ElementId> after_ids;
  for (const auto& [id, ls] : after.lane_segments) after_ids.push_back(id);
  if (before_ids != after_ids) return true;

  const auto before_part = partition_for(before.lane_segments, before_ids);
  const auto after_part = partition_for(after.lane_segments, after_ids);
  return before_part != after_part;
}

}  // namespace lanekit
