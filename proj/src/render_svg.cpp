#include "lanekit/render_svg.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "lanekit/json_io.hpp"

namespace lanekit {

namespace {

constexpr const char* kColorUnchanged = "#9e9e9e";
constexpr const char* kColorInsertion = "#90ee90";
constexpr const char* kColorDeletion = "#ff0000";
constexpr const char* kColorGeometry = "#006400";
constexpr const char* kColorMarking = "#800080";

// Color per change class, one entry per class present on the element.
std::vector<std::string> colors_for(const std::vector<std::string>& hist) {
  std::set<std::string> colors;
  for (const std::string& t : hist) {
    if (t == tag::kInsertion) colors.insert(kColorInsertion);
    if (t == tag::kDeletion) colors.insert(kColorDeletion);
    if (t == tag::kGeometry || t == tag::kReroute) colors.insert(kColorGeometry);
    if (t == tag::kMarking) colors.insert(kColorMarking);
  }
  if (colors.empty()) return {kColorUnchanged};
  return {colors.begin(), colors.end()};
}

std::vector<std::string> colors_for(const ElementStatus& status) {
  std::set<std::string> colors;
  switch (status.primary) {
    case ElementStatus::Primary::kInsertion:
      colors.insert(kColorInsertion);
      break;
    case ElementStatus::Primary::kDeletion:
      colors.insert(kColorDeletion);
      break;
    case ElementStatus::Primary::kOther:
      if (status.geo) colors.insert(kColorGeometry);
      if (status.mark) colors.insert(kColorMarking);
      break;
    case ElementStatus::Primary::kNoChange:
      break;
  }
  if (colors.empty()) return {kColorUnchanged};
  return {colors.begin(), colors.end()};
}

std::string stripe_pattern_id(const std::vector<std::string>& colors) {
  std::string id = "stripe";
  for (const std::string& c : colors) {
    id += "-";
    id += c.substr(1);  // drop '#'
  }
  return id;
}

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(const Polyline2D& p) {
    for (const Vec2& v : p.points) {
      min_x = std::min(min_x, v.x);
      min_y = std::min(min_y, v.y);
      max_x = std::max(max_x, v.x);
      max_y = std::max(max_y, v.y);
    }
  }
  bool empty() const { return min_x > max_x; }
};

std::string fmt(double v) { return format_fixed3(v); }

// SVG y grows downward; flip around the box.
std::string path_data(const Polyline2D& p, double flip_y) {
  std::string d;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d += i == 0 ? "M" : " L";
    d += fmt(p[i].x);
    d += ",";
    d += fmt(flip_y - p[i].y);
  }
  return d;
}

struct Drawable {
  ElementId id = 0;
  bool is_crossing = false;
  std::vector<Polyline2D> outlines;  // boundaries; crossings close a polygon
  Polyline2D centerline;
  std::vector<std::string> colors;
};

// Neutral dashed outlines for predicted elements in frame views.
struct PredOverlay {
  bool is_crossing = false;
  std::vector<Polyline2D> outlines;
  Polyline2D centerline;
  double confidence = 1.0;
};

std::string render_impl(std::vector<Drawable> drawables,
                        const std::vector<PredOverlay>& overlays,
                        const RenderOptions& options);

}  // namespace

std::string render_svg(const MapScene& scene,
                       const std::optional<ChangeSet>& changes,
                       const RenderOptions& options) {
  std::vector<Drawable> drawables;
  for (const auto& [id, ls] : scene.lane_segments) {
    Drawable d;
    d.id = id;
    d.outlines = {ls.left_boundary, ls.right_boundary};
    d.centerline = ls.centerline;
    d.colors = colors_for(ls.change_hist);
    drawables.push_back(std::move(d));
  }
  for (const auto& [id, pc] : scene.pedestrian_crossings) {
    Drawable d;
    d.id = id;
    d.is_crossing = true;
    d.outlines = {pc.left_boundary, pc.right_boundary};
    d.centerline = pc.centerline;
    d.colors = colors_for(pc.change_hist);
    drawables.push_back(std::move(d));
  }
  if (changes) {
    for (const AtomicChange& c : changes->changes()) {
      const auto* del = c.as<DeletionChange>();
      if (!del) continue;
      Drawable d;
      d.id = c.target_id;
      d.is_crossing = !del->element.is_lane();
      const ElementGeometry g = del->element.geometry();
      d.outlines = {g.left, g.right};
      d.centerline = g.center;
      d.colors = {kColorDeletion};
      drawables.push_back(std::move(d));
    }
  }
  return render_impl(std::move(drawables), {}, options);
}

std::string render_svg(const FrameSample& frame, const RenderOptions& options) {
  std::vector<Drawable> drawables;
  for (std::size_t i = 0; i < frame.ground_truth.size(); ++i) {
    const GtElement& g = frame.ground_truth[i];
    Drawable d;
    d.id = static_cast<ElementId>(i);
    d.is_crossing = g.kind == MapElementKind::kPedestrianCrossing;
    d.outlines = {g.geometry.left, g.geometry.right};
    d.centerline = g.geometry.center;
    d.colors = colors_for(g.status);
    drawables.push_back(std::move(d));
  }
  std::vector<PredOverlay> overlays;
  for (const PredictedElement& p : frame.predictions) {
    PredOverlay overlay;
    overlay.is_crossing = p.kind == MapElementKind::kPedestrianCrossing;
    overlay.outlines = {p.geometry.left, p.geometry.right};
    overlay.centerline = p.geometry.center;
    overlay.confidence = p.confidence;
    overlays.push_back(std::move(overlay));
  }
  return render_impl(std::move(drawables), overlays, options);
}

namespace {

std::string render_impl(std::vector<Drawable> drawables,
                        const std::vector<PredOverlay>& overlays,
                        const RenderOptions& options) {
  std::stable_sort(drawables.begin(), drawables.end(),
                   [](const Drawable& a, const Drawable& b) { return a.id < b.id; });

  Bounds bounds;
  for (const Drawable& d : drawables) {
    for (const Polyline2D& p : d.outlines) bounds.add(p);
    bounds.add(d.centerline);
  }
  for (const PredOverlay& o : overlays) {
    for (const Polyline2D& p : o.outlines) bounds.add(p);
    bounds.add(o.centerline);
  }

  double min_x, min_y, side;
  if (options.extent) {
    const double cx = bounds.empty() ? 0.0 : (bounds.min_x + bounds.max_x) / 2.0;
    const double cy = bounds.empty() ? 0.0 : (bounds.min_y + bounds.max_y) / 2.0;
    side = *options.extent;
    min_x = cx - side / 2.0;
    min_y = cy - side / 2.0;
  } else if (bounds.empty()) {
    min_x = min_y = 0.0;
    side = 10.0;
  } else {
    const double margin = 2.0;
    side = std::max(bounds.max_x - bounds.min_x, bounds.max_y - bounds.min_y) +
           2.0 * margin;
    min_x = (bounds.min_x + bounds.max_x - side) / 2.0;
    min_y = (bounds.min_y + bounds.max_y - side) / 2.0;
  }
  const double flip_y = 2.0 * min_y + side;  // maps y -> (min_y + side) - (y - min_y)

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(min_x)
      << " " << fmt(min_y) << " " << fmt(side) << " " << fmt(side)
      << "\" width=\"800\" height=\"800\">\n";

  // One stripe pattern per multi-color combination in use.
  std::set<std::string> emitted_patterns;
  std::ostringstream defs;
  for (const Drawable& d : drawables) {
    if (d.colors.size() < 2) continue;
    const std::string pid = stripe_pattern_id(d.colors);
    if (!emitted_patterns.insert(pid).second) continue;
    const double band = 0.6;
    defs << "  <pattern id=\"" << pid << "\" patternUnits=\"userSpaceOnUse\" width=\""
         << fmt(band * static_cast<double>(d.colors.size())) << "\" height=\""
         << fmt(band * static_cast<double>(d.colors.size()))
         << "\" patternTransform=\"rotate(45)\">\n";
    for (std::size_t i = 0; i < d.colors.size(); ++i) {
      defs << "    <rect x=\"" << fmt(band * static_cast<double>(i))
           << "\" y=\"0\" width=\"" << fmt(band) << "\" height=\""
           << fmt(band * static_cast<double>(d.colors.size())) << "\" fill=\""
           << d.colors[i] << "\"/>\n";
    }
    defs << "  </pattern>\n";
  }
  const std::string defs_str = defs.str();
  if (!defs_str.empty()) svg << " <defs>\n" << defs_str << " </defs>\n";

  // Frame box.
  svg << " <rect x=\"" << fmt(min_x) << "\" y=\"" << fmt(min_y) << "\" width=\""
      << fmt(side) << "\" height=\"" << fmt(side)
      << "\" fill=\"white\" stroke=\"#202020\" stroke-width=\""
      << fmt(options.stroke_width) << "\"/>\n";

  for (const Drawable& d : drawables) {
    const std::string paint = d.colors.size() == 1
                                  ? d.colors.front()
                                  : "url(#" + stripe_pattern_id(d.colors) + ")";
    svg << " <g data-element-id=\"" << d.id << "\">\n";
    if (d.is_crossing) {
      // Closed polygon: right boundary forward, left boundary backward.
      Polyline2D ring = d.outlines[1];
      ring.points.insert(ring.points.end(), d.outlines[0].points.rbegin(),
                         d.outlines[0].points.rend());
      svg << "  <path d=\"" << path_data(ring, flip_y)
          << " Z\" fill=\"" << paint << "\" fill-opacity=\"0.55\" stroke=\""
          << paint << "\" stroke-width=\"" << fmt(options.stroke_width) << "\"/>\n";
    } else {
      for (const Polyline2D& boundary : d.outlines) {
        svg << "  <path d=\"" << path_data(boundary, flip_y)
            << "\" fill=\"none\" stroke=\"" << paint << "\" stroke-width=\""
            << fmt(options.stroke_width) << "\"/>\n";
      }
      svg << "  <path d=\"" << path_data(d.centerline, flip_y)
          << "\" fill=\"none\" stroke=\"" << paint << "\" stroke-width=\""
          << fmt(options.stroke_width / 2.0) << "\" stroke-dasharray=\"0.5,0.5\"/>\n";
    }
    svg << " </g>\n";
  }

  for (const PredOverlay& o : overlays) {
    svg << " <g data-prediction=\"1\" stroke=\"#3060c0\" stroke-opacity=\""
        << fmt(o.confidence) << "\" fill=\"none\" stroke-dasharray=\"0.8,0.4\">\n";
    for (const Polyline2D& outline : o.outlines) {
      svg << "  <path d=\"" << path_data(outline, flip_y) << "\" stroke-width=\""
          << fmt(options.stroke_width) << "\"/>\n";
    }
    svg << "  <path d=\"" << path_data(o.centerline, flip_y)
        << "\" stroke-width=\"" << fmt(options.stroke_width / 2.0) << "\"/>\n";
    svg << " </g>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

}  // namespace lanekit
