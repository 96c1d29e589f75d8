#include "lanekit/crop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lanekit {

Vec2 to_ego_frame(Vec2 p, const EgoPose& pose) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  const Vec2 d{p.x - pose.x, p.y - pose.y};
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Polyline2D to_ego_frame(const Polyline2D& p, const EgoPose& pose) {
  Polyline2D out;
  out.points.reserve(p.size());
  for (const Vec2& v : p.points) out.points.push_back(to_ego_frame(v, pose));
  return out;
}

namespace {

std::optional<Polyline2D> clip_in_ego(const Polyline2D& p, const EgoPose& pose,
                                      double half) {
  return clip_polyline_to_box_single(to_ego_frame(p, pose), half);
}

void restrict_connectivity(MapScene& scene) {
  for (auto& [id, ls] : scene.lane_segments) {
    auto keep = [&](ElementId ref) { return scene.lane_segments.count(ref) > 0; };
    std::erase_if(ls.successors, [&](ElementId r) { return !keep(r); });
    std::erase_if(ls.predecessors, [&](ElementId r) { return !keep(r); });
    if (ls.left_neighbor && !keep(*ls.left_neighbor)) ls.left_neighbor.reset();
    if (ls.right_neighbor && !keep(*ls.right_neighbor)) ls.right_neighbor.reset();
  }
}

}  // namespace

MapScene crop_patch(const MapScene& scene, const EgoPose& pose, double extent) {
  if (extent <= 0.0) throw std::invalid_argument("crop extent must be positive");
  const double half = extent / 2.0;

  MapScene out;
  out.scene_id = scene.scene_id;
  out.extra = scene.extra;

  for (const auto& [id, ls] : scene.lane_segments) {
    auto left = clip_in_ego(ls.left_boundary, pose, half);
    auto right = clip_in_ego(ls.right_boundary, pose, half);
    auto center = clip_in_ego(ls.centerline, pose, half);
    if (!left || !right || !center) continue;
    LaneSegment clipped = ls;
    clipped.left_boundary = std::move(*left);
    clipped.right_boundary = std::move(*right);
    clipped.centerline = std::move(*center);
    out.lane_segments.emplace(id, std::move(clipped));
  }
  for (const auto& [id, pc] : scene.pedestrian_crossings) {
    auto left = clip_in_ego(pc.left_boundary, pose, half);
    auto right = clip_in_ego(pc.right_boundary, pose, half);
    auto center = clip_in_ego(pc.centerline, pose, half);
    if (!left || !right || !center) continue;
    PedestrianCrossing clipped = pc;
    clipped.left_boundary = std::move(*left);
    clipped.right_boundary = std::move(*right);
    clipped.centerline = std::move(*center);
    out.pedestrian_crossings.emplace(id, std::move(clipped));
  }

  restrict_connectivity(out);
  return out;
}

namespace {

bool polyline_in_patch(const Polyline2D& p, const EgoPose& pose, double half) {
  return !clip_polyline_to_box(to_ego_frame(p, pose), half).empty();
}

}  // namespace

bool lane_in_patch(const LaneSegment& ls, const EgoPose& pose, double extent) {
  const double half = extent / 2.0;
  return polyline_in_patch(ls.left_boundary, pose, half) ||
         polyline_in_patch(ls.right_boundary, pose, half) ||
         polyline_in_patch(ls.centerline, pose, half);
}

bool crossing_in_patch(const PedestrianCrossing& pc, const EgoPose& pose,
                       double extent) {
  const double half = extent / 2.0;
  return polyline_in_patch(pc.left_boundary, pose, half) ||
         polyline_in_patch(pc.right_boundary, pose, half) ||
         polyline_in_patch(pc.centerline, pose, half);
}

}  // namespace lanekit
