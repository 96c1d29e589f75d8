#include "lanekit/prior_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "lanekit/diff.hpp"
#include "lanekit/errors.hpp"
#include "lanekit/rng.hpp"

namespace lanekit {

namespace {

// Stream ids carving one seed into independent draws per action family.
enum Stream : std::uint64_t {
  kStreamContinuous = 1,
  kStreamDiscrete = 2,
  kStreamCrossings = 3,
  kStreamMarkings = 4,
  kStreamBikeLanes = 5,
};

void strip_annotations(MapScene& scene) {
  for (auto& [id, ls] : scene.lane_segments) {
    ls.is_modified = false;
    ls.change_hist.clear();
  }
  for (auto& [id, pc] : scene.pedestrian_crossings) {
    pc.is_modified = false;
    pc.change_hist.clear();
  }
}

void noise_polyline(Polyline2D& p, double sigma, SeededRng& rng) {
  for (Vec2& v : p.points) {
    v.x += rng.normal(0.0, sigma);
    v.y += rng.normal(0.0, sigma);
  }
}

Polyline2D midpoints(const Polyline2D& a, const Polyline2D& b, int n) {
  const Polyline2D ra = resample_polyline(a, n);
  const Polyline2D rb = resample_polyline(b, n);
  Polyline2D out;
  out.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.points.push_back((ra[static_cast<std::size_t>(i)] +
                          rb[static_cast<std::size_t>(i)]) *
                         0.5);
  }
  return out;
}

}  // namespace

MapScene perturb_continuous(const MapScene& gt, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");
  if (sigma == 0.0) return gt;

  SeededRng rng(seed, kStreamContinuous);
  MapScene prior = gt;
  strip_annotations(prior);
  for (auto& [id, ls] : prior.lane_segments) {
    noise_polyline(ls.left_boundary, sigma, rng);
    noise_polyline(ls.right_boundary, sigma, rng);
    const int n = static_cast<int>(std::max<std::size_t>(ls.centerline.size(), 2));
    ls.centerline = midpoints(ls.left_boundary, ls.right_boundary, n);
  }
  for (auto& [id, pc] : prior.pedestrian_crossings) {
    noise_polyline(pc.left_boundary, sigma, rng);
    noise_polyline(pc.right_boundary, sigma, rng);
    const int n = static_cast<int>(std::max<std::size_t>(pc.centerline.size(), 2));
    pc.centerline = midpoints(pc.left_boundary, pc.right_boundary, n);
  }
  return prior;
}

namespace {

void shift_polyline(Polyline2D& p, Vec2 drift) {
  for (Vec2& v : p.points) v = v + drift;
}

}  // namespace

GeneratedPrior perturb_discrete(const MapScene& gt, double p_del, double p_shift,
                                double sigma, std::uint64_t seed) {
  if (p_del < 0.0 || p_shift < 0.0 || p_del + p_shift > 1.0) {
    throw std::invalid_argument("require p_del, p_shift >= 0 and p_del + p_shift <= 1");
  }
  SeededRng rng(seed, kStreamDiscrete);
  MapScene prior = gt;
  strip_annotations(prior);

  // Visit all elements in ascending id order so the draw sequence is stable.
  std::vector<ElementId> ids;
  for (const auto& [id, ls] : gt.lane_segments) ids.push_back(id);
  for (const auto& [id, pc] : gt.pedestrian_crossings) ids.push_back(id);
  std::sort(ids.begin(), ids.end());

  std::vector<ElementId> deleted;
  for (ElementId id : ids) {
    const double u = rng.uniform();
    if (u < p_del) {
      deleted.push_back(id);
      continue;
    }
    if (u < p_del + p_shift) {
      const Vec2 drift{rng.normal(0.0, sigma), rng.normal(0.0, sigma)};
      if (auto it = prior.lane_segments.find(id); it != prior.lane_segments.end()) {
        shift_polyline(it->second.left_boundary, drift);
        shift_polyline(it->second.right_boundary, drift);
        shift_polyline(it->second.centerline, drift);
      } else if (auto pit = prior.pedestrian_crossings.find(id);
                 pit != prior.pedestrian_crossings.end()) {
        shift_polyline(pit->second.left_boundary, drift);
        shift_polyline(pit->second.right_boundary, drift);
        shift_polyline(pit->second.centerline, drift);
      }
    }
  }

  for (ElementId id : deleted) {
    prior.lane_segments.erase(id);
    prior.pedestrian_crossings.erase(id);
  }
  // Scrub connectivity referring to removed elements.
  for (auto& [id, ls] : prior.lane_segments) {
    std::erase_if(ls.successors,
                  [&](ElementId r) { return !prior.lane_segments.count(r); });
    std::erase_if(ls.predecessors,
                  [&](ElementId r) { return !prior.lane_segments.count(r); });
    if (ls.left_neighbor && !prior.lane_segments.count(*ls.left_neighbor)) {
      ls.left_neighbor.reset();
    }
    if (ls.right_neighbor && !prior.lane_segments.count(*ls.right_neighbor)) {
      ls.right_neighbor.reset();
    }
  }

  return {prior, diff_maps(prior, gt)};
}

bool RuleBasedConfig::valid() const {
  return intersection_weight > 0.0 && width_mean > 0.0 && width_std > 0.0 &&
         width_clip_lo > 0.0 && width_clip_lo <= width_clip_hi &&
         min_height > 0.0 && max_iou > 0.0 && max_iterations_per_map > 0 &&
         trajectory_buffer > 0.0 && marking_run_length > 0 &&
         bike_run_length > 0 && max_bike_lanes >= 0 && marking_sequences >= 0;
}

RuleBasedConfig rule_based_config_from_json(const nlohmann::json& j) {
  RuleBasedConfig cfg;
  cfg.intersection_weight = j.value("intersection_weight", cfg.intersection_weight);
  cfg.width_mean = j.value("width_mean", cfg.width_mean);
  cfg.width_std = j.value("width_std", cfg.width_std);
  if (j.contains("width_clip")) {
    const auto& clip = j.at("width_clip");
    if (!clip.is_array() || clip.size() != 2) {
      throw SchemaError("/width_clip", "expected [lo, hi]");
    }
    cfg.width_clip_lo = clip[0].get<double>();
    cfg.width_clip_hi = clip[1].get<double>();
  }
  cfg.min_height = j.value("min_height", cfg.min_height);
  cfg.max_iou = j.value("max_iou", cfg.max_iou);
  cfg.max_iterations_per_map =
      j.value("max_iterations_per_map", cfg.max_iterations_per_map);
  cfg.trajectory_buffer = j.value("trajectory_buffer", cfg.trajectory_buffer);
  cfg.marking_run_length = j.value("marking_run_length", cfg.marking_run_length);
  cfg.bike_run_length = j.value("bike_run_length", cfg.bike_run_length);
  cfg.max_bike_lanes = j.value("max_bike_lanes", cfg.max_bike_lanes);
  cfg.marking_sequences = j.value("marking_sequences", cfg.marking_sequences);
  if (!cfg.valid()) throw SchemaError("", "invalid rule-based config values");
  return cfg;
}

nlohmann::json rule_based_config_to_json(const RuleBasedConfig& cfg) {
  return nlohmann::json{
      {"intersection_weight", cfg.intersection_weight},
      {"width_mean", cfg.width_mean},
      {"width_std", cfg.width_std},
      {"width_clip", nlohmann::json::array({cfg.width_clip_lo, cfg.width_clip_hi})},
      {"min_height", cfg.min_height},
      {"max_iou", cfg.max_iou},
      {"max_iterations_per_map", cfg.max_iterations_per_map},
      {"trajectory_buffer", cfg.trajectory_buffer},
      {"marking_run_length", cfg.marking_run_length},
      {"bike_run_length", cfg.bike_run_length},
      {"max_bike_lanes", cfg.max_bike_lanes},
      {"marking_sequences", cfg.marking_sequences},
  };
}

namespace {

Polyline2D trajectory_polyline(const std::vector<EgoPose>& trajectory) {
  Polyline2D p;
  for (const EgoPose& pose : trajectory) p.points.push_back({pose.x, pose.y});
  return p;
}

double distance_to_trajectory(const std::vector<Vec2>& ring,
                              const Polyline2D& traj) {
  if (traj.size() >= 2) return polygon_polyline_distance(ring, traj);
  if (traj.size() == 1) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ring.size(); ++i) {
      best = std::min(best, point_segment_distance(traj[0], ring[i],
                                                   ring[(i + 1) % ring.size()]));
    }
    return best;
  }
  return std::numeric_limits<double>::infinity();
}

double polyline_to_trajectory(const Polyline2D& line, const Polyline2D& traj) {
  if (traj.size() >= 2) return polyline_distance(line, traj);
  if (traj.size() == 1) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < line.size(); ++i) {
      best = std::min(best, point_segment_distance(traj[0], line[i - 1], line[i]));
    }
    return best;
  }
  return std::numeric_limits<double>::infinity();
}

// Inside-intervals of the road along waypoint + s*axis, from the union of
// the laterally adjacent lane polygons. Returns the connected interval
// containing s = 0, or nullopt.
std::optional<std::pair<double, double>> road_span(
    const MapScene& scene, ElementId lane, Vec2 waypoint, Vec2 axis) {
  // Collect the lateral neighbor chain both ways.
  std::vector<ElementId> lanes{lane};
  for (int dir = 0; dir < 2; ++dir) {
    ElementId cur = lane;
    for (int hop = 0; hop < 16; ++hop) {
      auto it = scene.lane_segments.find(cur);
      if (it == scene.lane_segments.end()) break;
      const auto& n = dir == 0 ? it->second.left_neighbor : it->second.right_neighbor;
      if (!n || std::find(lanes.begin(), lanes.end(), *n) != lanes.end()) break;
      lanes.push_back(*n);
      cur = *n;
    }
  }

  // Even-odd crossings of the line with each lane polygon give the inside
  // intervals; merge them and find the one containing 0.
  std::vector<std::pair<double, double>> intervals;
  for (ElementId id : lanes) {
    const std::vector<Vec2> ring = lane_polygon(scene.lane_segments.at(id));
    std::vector<double> hits;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = ring[i];
      const Vec2 b = ring[(i + 1) % n];
      // Solve waypoint + s*axis == a + t*(b-a).
      const Vec2 e = b - a;
      const double denom = cross(axis, e);
      if (std::abs(denom) < 1e-12) continue;
      const Vec2 w = a - waypoint;
      const double s = cross(w, e) / denom;
      const double t = cross(w, axis) / denom;
      if (t >= 0.0 && t < 1.0) hits.push_back(s);
    }
    std::sort(hits.begin(), hits.end());
    for (std::size_t i = 0; i + 1 < hits.size(); i += 2) {
      intervals.emplace_back(hits[i], hits[i + 1]);
    }
  }
  if (intervals.empty()) return std::nullopt;
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.first <= merged.back().second + 1e-9) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  for (const auto& iv : merged) {
    if (iv.first <= 0.0 && 0.0 <= iv.second) return iv;
  }
  return std::nullopt;
}

struct RuleBasedState {
  MapScene prior;
  Polyline2D trajectory;
  ElementId next_id = 0;
};

// Samples candidate crossings until one satisfies every constraint, bounded
// by max_iterations_per_map attempts; a map that admits none is left
// unchanged.
void insert_crossing(RuleBasedState& state, const RuleBasedConfig& cfg,
                     SeededRng& rng) {
  std::vector<ElementId> lane_ids;
  std::vector<double> weights;
  for (const auto& [id, ls] : state.prior.lane_segments) {
    lane_ids.push_back(id);
    weights.push_back(ls.is_intersection ? cfg.intersection_weight : 1.0);
  }
  if (lane_ids.empty()) return;

  for (int attempt = 0; attempt < cfg.max_iterations_per_map; ++attempt) {
    const ElementId lane = lane_ids[rng.weighted_pick(weights)];
    const LaneSegment& ls = state.prior.lane_segments.at(lane);
    const double total = ls.centerline.arc_length();
    if (total <= 0.0) continue;
    const double s = rng.uniform() * total;
    const Vec2 waypoint = point_at_arc(ls.centerline, s);
    const Vec2 driving = direction_at_arc(ls.centerline, s);
    const Vec2 axis = right_normal(driving);

    const auto span = road_span(state.prior, lane, waypoint, axis);
    if (!span) continue;
    const double height = span->second - span->first;
    if (height <= cfg.min_height) continue;

    const double width = std::clamp(rng.normal(cfg.width_mean, cfg.width_std),
                                    cfg.width_clip_lo, cfg.width_clip_hi);

    // Crossing runs across the road along the axis; its boundaries are the
    // axis span shifted by half the width along the driving direction.
    PedestrianCrossing pc;
    pc.id = state.next_id++;
    const Vec2 lo = waypoint + axis * span->first;
    const Vec2 hi = waypoint + axis * span->second;
    pc.centerline = Polyline2D{{lo, hi}};
    pc.left_boundary = Polyline2D{{lo + driving * (width / 2.0),
                                   hi + driving * (width / 2.0)}};
    pc.right_boundary = Polyline2D{{lo - driving * (width / 2.0),
                                    hi - driving * (width / 2.0)}};

    const std::vector<Vec2> ring = crossing_polygon(pc);
    bool overlaps = false;
    for (const auto& [id, other] : state.prior.pedestrian_crossings) {
      if (polygon_iou(crossing_polygon(other), ring) >= cfg.max_iou) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) continue;
    if (distance_to_trajectory(ring, state.trajectory) > cfg.trajectory_buffer) {
      continue;
    }

    state.prior.pedestrian_crossings.emplace(pc.id, std::move(pc));
    return;
  }
}

// Run of `length` segments connected by successor links starting at `start`.
// The `admit` predicate filters members; picks among multiple successors
// with the rng. Returns an empty vector when no full-length run exists.
template <typename Admit>
std::vector<ElementId> successor_run(const MapScene& scene, ElementId start,
                                     int length, SeededRng& rng, Admit admit) {
  std::vector<ElementId> run;
  ElementId cur = start;
  for (int i = 0; i < length; ++i) {
    auto it = scene.lane_segments.find(cur);
    if (it == scene.lane_segments.end() || !admit(it->second) ||
        std::find(run.begin(), run.end(), cur) != run.end()) {
      return {};
    }
    run.push_back(cur);
    if (i + 1 == length) break;
    const auto& succs = it->second.successors;
    if (succs.empty()) return {};
    cur = succs[rng.below(succs.size())];
  }
  return static_cast<int>(run.size()) == length ? run : std::vector<ElementId>{};
}

MarkType flip_mark(MarkType m) {
  switch (m) {
    case MarkType::kSolid: return MarkType::kDashed;
    case MarkType::kDashed: return MarkType::kSolid;
    case MarkType::kDoubleSolid: return MarkType::kDoubleDashed;
    case MarkType::kDoubleDashed: return MarkType::kDoubleSolid;
    case MarkType::kDashSolid: return MarkType::kSolidDash;
    case MarkType::kSolidDash: return MarkType::kDashSolid;
    default: return m;
  }
}

void perturb_markings(RuleBasedState& state, const RuleBasedConfig& cfg,
                      SeededRng& rng) {
  std::vector<ElementId> lane_ids;
  for (const auto& [id, ls] : state.prior.lane_segments) lane_ids.push_back(id);
  if (lane_ids.empty()) return;

  for (int seq = 0; seq < cfg.marking_sequences; ++seq) {
    const ElementId start = lane_ids[rng.below(lane_ids.size())];
    const BoundarySide side =
        rng.uniform() < 0.5 ? BoundarySide::kLeft : BoundarySide::kRight;
    // Only painted boundaries may change; implicit ones stay untouched.
    auto admit = [&](const LaneSegment& ls) {
      const LaneMarkType& mark =
          side == BoundarySide::kLeft ? ls.left_mark : ls.right_mark;
      return mark.painted() && mark.mark != MarkType::kUnknown &&
             polyline_to_trajectory(ls.centerline, state.trajectory) <=
                 cfg.trajectory_buffer;
    };
    const auto run =
        successor_run(state.prior, start, cfg.marking_run_length, rng, admit);
    if (run.empty()) continue;

    // Either flip the dash pattern or erase the painted boundary.
    const bool erase = rng.uniform() < 0.5;
    for (ElementId id : run) {
      LaneSegment& ls = state.prior.lane_segments.at(id);
      LaneMarkType& mark = side == BoundarySide::kLeft ? ls.left_mark : ls.right_mark;
      if (erase) {
        mark = LaneMarkType{MarkType::kNone, MarkColor::kNonVisible};
      } else {
        mark.mark = flip_mark(mark.mark);
      }
    }
  }
}

void insert_bike_lanes(RuleBasedState& state, const RuleBasedConfig& cfg,
                       SeededRng& rng) {
  std::set<ElementId> used;
  int inserted_runs = 0;
  // One sampling attempt per potential bike lane.
  for (int attempt = 0; attempt < cfg.max_bike_lanes && inserted_runs < cfg.max_bike_lanes;
       ++attempt) {
    std::vector<ElementId> candidates;
    for (const auto& [id, ls] : state.prior.lane_segments) {
      if (!ls.right_neighbor && ls.lane_type == LaneType::kVehicle &&
          used.count(id) == 0) {
        candidates.push_back(id);
      }
    }
    if (candidates.empty()) return;
    const ElementId start = candidates[rng.below(candidates.size())];
    auto admit = [&](const LaneSegment& ls) {
      return !ls.right_neighbor && ls.lane_type == LaneType::kVehicle &&
             used.count(ls.id) == 0 &&
             polyline_to_trajectory(ls.centerline, state.trajectory) <=
                 cfg.trajectory_buffer;
    };
    const auto run = successor_run(state.prior, start, cfg.bike_run_length, rng, admit);
    if (run.empty()) continue;

    // Divide each rightmost lane in half: the right half becomes the bike
    // lane, the left half keeps the vehicle lane's identity.
    std::vector<ElementId> bike_ids;
    for (ElementId id : run) {
      LaneSegment& ls = state.prior.lane_segments.at(id);
      const int n = static_cast<int>(std::max<std::size_t>(
          {ls.left_boundary.size(), ls.right_boundary.size(), 2}));
      const Polyline2D mid = midpoints(ls.left_boundary, ls.right_boundary, n);

      LaneSegment bike;
      bike.id = state.next_id++;
      bike.lane_type = LaneType::kBike;
      bike.is_intersection = ls.is_intersection;
      bike.left_boundary = mid;
      bike.right_boundary = ls.right_boundary;
      bike.centerline = midpoints(mid, ls.right_boundary, n);
      bike.left_mark = LaneMarkType{MarkType::kSolid, MarkColor::kWhite};
      bike.right_mark = LaneMarkType{MarkType::kSolid, MarkColor::kWhite};
      bike.left_neighbor = id;

      ls.right_boundary = mid;
      ls.centerline = midpoints(ls.left_boundary, mid, n);
      ls.right_mark = LaneMarkType{MarkType::kSolid, MarkColor::kWhite};
      ls.right_neighbor = bike.id;

      state.prior.lane_segments.emplace(bike.id, std::move(bike));
      bike_ids.push_back(state.next_id - 1);
      used.insert(id);
    }
    // Chain the bike segments along the run.
    for (std::size_t i = 0; i < bike_ids.size(); ++i) {
      LaneSegment& bike = state.prior.lane_segments.at(bike_ids[i]);
      if (i > 0) bike.predecessors = {bike_ids[i - 1]};
      if (i + 1 < bike_ids.size()) bike.successors = {bike_ids[i + 1]};
    }
    ++inserted_runs;
  }
}

}  // namespace

GeneratedPrior perturb_rulebased(const MapScene& gt,
                                 const std::vector<EgoPose>& trajectory,
                                 const RuleBasedConfig& cfg, std::uint64_t seed) {
  if (trajectory.empty()) throw EmptyInput("rule-based perturbation needs a trajectory");
  if (!cfg.valid()) throw std::invalid_argument("invalid rule-based config");

  RuleBasedState state;
  state.prior = gt;
  strip_annotations(state.prior);
  state.trajectory = trajectory_polyline(trajectory);
  state.next_id = gt.max_id() + 1;

  {
    SeededRng rng(seed, kStreamCrossings);
    insert_crossing(state, cfg, rng);
  }
  {
    SeededRng rng(seed, kStreamMarkings);
    perturb_markings(state, cfg, rng);
  }
  {
    SeededRng rng(seed, kStreamBikeLanes);
    insert_bike_lanes(state, cfg, rng);
  }

  return {state.prior, diff_maps(state.prior, gt)};
}

GapReport gap_compare(const EvalReport& val, const EvalReport& test) {
  if (val.classes.size() != test.classes.size()) {
    throw ClassMismatch("reports cover different class sets");
  }
  GapReport gap;
  for (std::size_t i = 0; i < val.classes.size(); ++i) {
    const ClassReport& v = val.classes[i];
    const ClassReport& t = test.classes[i];
    if (v.class_name != t.class_name) {
      throw ClassMismatch("class mismatch: '" + v.class_name + "' vs '" +
                          t.class_name + "'");
    }
    GapReport::ClassDelta delta;
    delta.class_name = v.class_name;
    if (v.map_c && t.map_c) delta.delta_map_c = *t.map_c - *v.map_c;
    if (v.macc_c && t.macc_c) delta.delta_macc_c = *t.macc_c - *v.macc_c;
    gap.classes.push_back(std::move(delta));
  }
  if (val.mapc && test.mapc) gap.delta_mapc = *test.mapc - *val.mapc;
  if (val.macc && test.macc) gap.delta_macc = *test.macc - *val.macc;
  if (val.map && test.map) gap.delta_map = *test.map - *val.map;
  return gap;
}

nlohmann::json gap_report_to_json(const GapReport& gap) {
  nlohmann::json doc;
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& d : gap.classes) {
    nlohmann::json j;
    j["class"] = d.class_name;
    j["delta_map_c"] = d.delta_map_c ? nlohmann::json(*d.delta_map_c) : nlohmann::json();
    j["delta_macc_c"] =
        d.delta_macc_c ? nlohmann::json(*d.delta_macc_c) : nlohmann::json();
    classes.push_back(std::move(j));
  }
  doc["classes"] = std::move(classes);
  doc["delta_mapc"] = gap.delta_mapc ? nlohmann::json(*gap.delta_mapc) : nlohmann::json();
  doc["delta_macc"] = gap.delta_macc ? nlohmann::json(*gap.delta_macc) : nlohmann::json();
  doc["delta_map"] = gap.delta_map ? nlohmann::json(*gap.delta_map) : nlohmann::json();
  return doc;
}

std::string render_gap_table(const GapReport& gap) {
  std::ostringstream out;
  auto cell = [](const std::optional<double>& v) -> std::string {
    if (!v) return "--";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.1f", *v);
    return buf;
  };
  out << "  class        d(mAP_c)  d(mAcc_c)\n";
  for (const auto& d : gap.classes) {
    out << "  ";
    out.width(12);
    out << std::left << d.class_name;
    out.width(9);
    out << std::right << cell(d.delta_map_c);
    out.width(11);
    out << std::right << cell(d.delta_macc_c) << "\n";
  }
  out << "  ----\n";
  out << "  dmAP " << cell(gap.delta_map) << "   dmAPC " << cell(gap.delta_mapc)
      << "   dmACC " << cell(gap.delta_macc) << "\n";
  return out.str();
}

}  // namespace lanekit
