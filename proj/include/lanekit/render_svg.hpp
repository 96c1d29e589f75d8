#pragma once

#include <optional>
#include <string>

#include "lanekit/change.hpp"
#include "lanekit/eval.hpp"
#include "lanekit/map.hpp"

namespace lanekit {

struct RenderOptions {
  // Drawing box; when unset, the scene's bounding box plus a margin.
  std::optional<double> extent;  // square side, centered on the content
  double stroke_width = 0.15;    // meters
};

// Deterministic SVG: lane segments as boundary pairs, crossings as filled
// polygons, change classes color-coded (light green insertions, red
// deletions, dark green geometry edits, purple marking changes); elements
// with several change classes are striped. Deleted elements are drawn from
// the change set's deletion payloads.
std::string render_svg(const MapScene& scene,
                       const std::optional<ChangeSet>& changes = std::nullopt,
                       const RenderOptions& options = {});

// Frame view: ground-truth elements color-coded by change class, predictions
// as neutral dashed outlines with confidence-scaled opacity.
std::string render_svg(const FrameSample& frame, const RenderOptions& options = {});

}  // namespace lanekit
