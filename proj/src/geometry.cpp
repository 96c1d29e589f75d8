#include "lanekit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lanekit/errors.hpp"

namespace lanekit {

namespace {
constexpr double kDuplicateTol = 1e-9;
}

double Polyline2D::arc_length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    len += distance(points[i - 1], points[i]);
  }
  return len;
}

Polyline2D Polyline2D::reversed() const {
  Polyline2D out = *this;
  std::reverse(out.points.begin(), out.points.end());
  return out;
}

std::optional<std::string> Polyline2D::invariant_violation() const {
  if (points.size() < 2) return "polyline has fewer than 2 points";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
      return "non-finite coordinate at index " + std::to_string(i);
    }
    if (i > 0 && distance(points[i - 1], points[i]) <= kDuplicateTol) {
      return "consecutive duplicate points at index " + std::to_string(i);
    }
  }
  return std::nullopt;
}

Vec2 point_at_arc(const Polyline2D& p, double s) {
  if (p.size() < 2) throw DegenerateInput("point_at_arc on empty polyline");
  if (s <= 0.0) return p.front();
  double acc = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double seg = distance(p[i - 1], p[i]);
    if (acc + seg >= s) {
      const double t = seg > 0.0 ? (s - acc) / seg : 0.0;
      return p[i - 1] + (p[i] - p[i - 1]) * t;
    }
    acc += seg;
  }
  return p.back();
}

Vec2 direction_at_arc(const Polyline2D& p, double s) {
  if (p.size() < 2) throw DegenerateInput("direction_at_arc on empty polyline");
  double acc = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double seg = distance(p[i - 1], p[i]);
    if (acc + seg >= s || i + 1 == p.size()) {
      Vec2 d = p[i] - p[i - 1];
      const double n = d.norm();
      return n > 0.0 ? d * (1.0 / n) : Vec2{1.0, 0.0};
    }
    acc += seg;
  }
  Vec2 d = p.back() - p[p.size() - 2];
  const double n = d.norm();
  return n > 0.0 ? d * (1.0 / n) : Vec2{1.0, 0.0};
}

Polyline2D resample_polyline(const Polyline2D& p, int n) {
  if (n < 2) throw std::invalid_argument("resample_polyline requires n >= 2");
  if (p.size() < 2) throw DegenerateInput("resample of degenerate polyline");
  const double total = p.arc_length();
  if (total <= 0.0) throw DegenerateInput("resample of zero-length polyline");

  Polyline2D out;
  out.points.reserve(static_cast<std::size_t>(n));
  out.points.push_back(p.front());
  const double step = total / static_cast<double>(n - 1);

  // Walk the segments once, emitting interior samples in order.
  std::size_t seg = 1;
  double seg_start = 0.0;
  double seg_len = distance(p[0], p[1]);
  for (int k = 1; k < n - 1; ++k) {
    const double s = step * static_cast<double>(k);
    while (seg + 1 < p.size() && seg_start + seg_len < s) {
      seg_start += seg_len;
      ++seg;
      seg_len = distance(p[seg - 1], p[seg]);
    }
    const double t = seg_len > 0.0 ? (s - seg_start) / seg_len : 0.0;
    out.points.push_back(p[seg - 1] + (p[seg] - p[seg - 1]) * std::clamp(t, 0.0, 1.0));
  }
  out.points.push_back(p.back());
  return out;
}

double start_heading(const Polyline2D& p) {
  if (p.size() < 2) throw DegenerateInput("heading of degenerate polyline");
  const Vec2 d = p[1] - p[0];
  return std::atan2(d.y, d.x);
}

double end_heading(const Polyline2D& p) {
  if (p.size() < 2) throw DegenerateInput("heading of degenerate polyline");
  const Vec2 d = p[p.size() - 1] - p[p.size() - 2];
  return std::atan2(d.y, d.x);
}

double normalize_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

double signed_area(const std::vector<Vec2>& ring) {
  double acc = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * acc;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 1e-12) return 1;
  if (v < -1e-12) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
         std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool is_simple_polygon(const std::vector<Vec2>& ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (they share an endpoint).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const Vec2 c = ring[j];
      const Vec2 d = ring[(j + 1) % n];
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject,
                              const std::vector<Vec2>& clip) {
  std::vector<Vec2> output = subject;
  const std::size_t m = clip.size();
  for (std::size_t i = 0; i < m && !output.empty(); ++i) {
    const Vec2 a = clip[i];
    const Vec2 b = clip[(i + 1) % m];
    std::vector<Vec2> input;
    input.swap(output);
    const std::size_t n = input.size();
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 cur = input[j];
      const Vec2 prev = input[(j + n - 1) % n];
      const double cur_side = cross(b - a, cur - a);
      const double prev_side = cross(b - a, prev - a);
      const bool cur_in = cur_side >= -1e-12;
      const bool prev_in = prev_side >= -1e-12;
      if (cur_in) {
        if (!prev_in) {
          const double t = prev_side / (prev_side - cur_side);
          output.push_back(prev + (cur - prev) * t);
        }
        output.push_back(cur);
      } else if (prev_in) {
        const double t = prev_side / (prev_side - cur_side);
        output.push_back(prev + (cur - prev) * t);
      }
    }
  }
  return output;
}

double polygon_iou(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.size() < 3 || b.size() < 3) return 0.0;
  std::vector<Vec2> clip = b;
  if (signed_area(clip) < 0.0) std::reverse(clip.begin(), clip.end());
  const std::vector<Vec2> inter = clip_convex(a, clip);
  const double ia = inter.size() >= 3 ? std::abs(signed_area(inter)) : 0.0;
  const double ua = std::abs(signed_area(a)) + std::abs(signed_area(b)) - ia;
  return ua > 0.0 ? ia / ua : 0.0;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

double polyline_distance(const Polyline2D& a, const Polyline2D& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < a.size(); ++i) {
    for (std::size_t j = 1; j < b.size(); ++j) {
      if (segments_intersect(a[i - 1], a[i], b[j - 1], b[j])) return 0.0;
      best = std::min(best, point_segment_distance(a[i - 1], b[j - 1], b[j]));
      best = std::min(best, point_segment_distance(a[i], b[j - 1], b[j]));
      best = std::min(best, point_segment_distance(b[j - 1], a[i - 1], a[i]));
      best = std::min(best, point_segment_distance(b[j], a[i - 1], a[i]));
    }
  }
  return best;
}

namespace {

bool point_in_ring(const std::vector<Vec2>& ring, Vec2 p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xi = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < xi) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

double polygon_polyline_distance(const std::vector<Vec2>& ring,
                                 const Polyline2D& line) {
  if (ring.size() < 3 || line.size() < 2) {
    return std::numeric_limits<double>::infinity();
  }
  for (const Vec2& p : line.points) {
    if (point_in_ring(ring, p)) return 0.0;
  }
  Polyline2D closed;
  closed.points = ring;
  closed.points.push_back(ring.front());
  return polyline_distance(closed, line);
}

namespace {

// Liang-Barsky clip of segment p->q against [-half, half]^2. Returns the
// parameter range [t0, t1] of the inside portion, or nullopt.
std::optional<std::pair<double, double>> clip_segment_box(Vec2 p, Vec2 q,
                                                          double half) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  const double pvals[4] = {-dx, dx, -dy, dy};
  const double qvals[4] = {p.x + half, half - p.x, p.y + half, half - p.y};
  for (int i = 0; i < 4; ++i) {
    if (pvals[i] == 0.0) {
      if (qvals[i] < 0.0) return std::nullopt;
      continue;
    }
    const double r = qvals[i] / pvals[i];
    if (pvals[i] < 0.0) {
      if (r > t1) return std::nullopt;
      t0 = std::max(t0, r);
    } else {
      if (r < t0) return std::nullopt;
      t1 = std::min(t1, r);
    }
  }
  if (t0 > t1) return std::nullopt;
  return std::make_pair(t0, t1);
}

}  // namespace

std::vector<Polyline2D> clip_polyline_to_box(const Polyline2D& p, double half) {
  std::vector<Polyline2D> runs;
  Polyline2D current;
  auto flush = [&]() {
    if (current.size() >= 2 && current.arc_length() > kDuplicateTol) {
      runs.push_back(std::move(current));
    }
    current = Polyline2D{};
  };
  auto push = [&](Vec2 v) {
    if (current.empty() || distance(current.back(), v) > kDuplicateTol) {
      current.points.push_back(v);
    }
  };
  for (std::size_t i = 1; i < p.size(); ++i) {
    const Vec2 a = p[i - 1];
    const Vec2 b = p[i];
    const auto span = clip_segment_box(a, b, half);
    if (!span) {
      flush();
      continue;
    }
    const Vec2 entry = a + (b - a) * span->first;
    const Vec2 exit = a + (b - a) * span->second;
    if (!current.empty() && distance(current.back(), entry) > kDuplicateTol) {
      // The chain left the box and came back; start a fresh run.
      flush();
    }
    push(entry);
    push(exit);
    if (span->second < 1.0) flush();
  }
  flush();
  return runs;
}

std::optional<Polyline2D> clip_polyline_to_box_single(const Polyline2D& p,
                                                      double half) {
  std::vector<Polyline2D> runs = clip_polyline_to_box(p, half);
  if (runs.empty()) return std::nullopt;
  std::size_t best = 0;
  double best_len = runs[0].arc_length();
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const double len = runs[i].arc_length();
    if (len > best_len) {
      best = i;
      best_len = len;
    }
  }
  return runs[best];
}

}  // namespace lanekit
