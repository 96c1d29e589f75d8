#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lanekit/map.hpp"

namespace lanekit {

enum class ChangeKind {
  kGeometry,
  kMarking,
  kType,
  kConnectivity,
  kInsertion,
  kDeletion,
};

std::string_view to_string(ChangeKind k);

enum class BoundarySide { kLeft, kRight };
enum class ConnectivityField { kSuccessors, kPredecessors, kLeftNeighbor, kRightNeighbor };

std::string_view to_string(BoundarySide s);
std::string_view to_string(ConnectivityField f);

// The three polylines describing an element's footprint.
struct ElementGeometry {
  Polyline2D left;
  Polyline2D right;
  Polyline2D center;

  bool operator==(const ElementGeometry&) const = default;
};

ElementGeometry geometry_of(const LaneSegment& ls);
ElementGeometry geometry_of(const PedestrianCrossing& pc);

// Lane semantics covered by a type change: the lane's usage class plus its
// intersection membership.
struct LaneSemantics {
  LaneType lane_type = LaneType::kVehicle;
  bool is_intersection = false;

  bool operator==(const LaneSemantics&) const = default;
};

struct GeometryChange {
  ElementGeometry before;
  ElementGeometry after;
  bool reroute = false;  // function-preserving intersection edit

  bool operator==(const GeometryChange&) const = default;
};

struct MarkingChange {
  BoundarySide side = BoundarySide::kLeft;
  LaneMarkType before;
  LaneMarkType after;

  bool operator==(const MarkingChange&) const = default;
};

struct TypeChange {
  LaneSemantics before;
  LaneSemantics after;

  bool operator==(const TypeChange&) const = default;
};

struct ConnectivityChange {
  ConnectivityField field = ConnectivityField::kSuccessors;
  std::vector<ElementId> before;  // neighbor fields use 0- or 1-element lists
  std::vector<ElementId> after;

  bool operator==(const ConnectivityChange&) const = default;
};

// Full element payload carried by insertions and deletions so change sets
// are self-contained and invertible. Annotation fields (is_modified,
// change_hist) are stored cleared.
struct ElementPayload {
  std::variant<LaneSegment, PedestrianCrossing> element;

  bool operator==(const ElementPayload&) const = default;
  bool is_lane() const { return std::holds_alternative<LaneSegment>(element); }
  ElementId id() const;
  ElementGeometry geometry() const;
};

ElementPayload make_payload(LaneSegment ls);
ElementPayload make_payload(PedestrianCrossing pc);

struct InsertionChange {
  ElementPayload element;
  bool operator==(const InsertionChange&) const = default;
};

struct DeletionChange {
  ElementPayload element;
  bool operator==(const DeletionChange&) const = default;
};

struct AtomicChange {
  ElementId target_id = 0;
  std::variant<GeometryChange, MarkingChange, TypeChange, ConnectivityChange,
               InsertionChange, DeletionChange>
      op;

  bool operator==(const AtomicChange&) const = default;
  ChangeKind kind() const;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&op);
  }
};

// Order-free set of atomic changes against a base scene. Stored in canonical
// order (target id, kind, sub-key), so equal sets compare equal regardless of
// insertion order. At most one change per (target, kind, side/field);
// violating that throws ConflictingChange, as does combining an insertion or
// deletion with any other change on the same target.
class ChangeSet {
 public:
  ChangeSet() = default;
  explicit ChangeSet(std::string base_scene_id)
      : base_scene_id_(std::move(base_scene_id)) {}

  const std::string& base_scene_id() const { return base_scene_id_; }
  void set_base_scene_id(std::string id) { base_scene_id_ = std::move(id); }

  void add(AtomicChange change);
  const std::vector<AtomicChange>& changes() const { return changes_; }
  bool empty() const { return changes_.empty(); }
  std::size_t size() const { return changes_.size(); }

  bool operator==(const ChangeSet&) const = default;

  std::size_t count(ChangeKind kind) const;
  std::vector<const AtomicChange*> for_target(ElementId id) const;

 private:
  std::string base_scene_id_;
  std::vector<AtomicChange> changes_;  // canonically sorted
};

// JSON sidecar format: {"base_scene_id", "changes": [...]}.
nlohmann::json changeset_to_json(const ChangeSet& cs);
ChangeSet changeset_from_json(const nlohmann::json& j);
std::string serialize_changeset(const ChangeSet& cs);
ChangeSet parse_changeset(std::string_view bytes);

}  // namespace lanekit
