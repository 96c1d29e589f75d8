#include "lanekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "lanekit/errors.hpp"
#include "lanekit/json_io.hpp"
#include "lanekit/metrics.hpp"

namespace lanekit {

using nlohmann::json;

std::string_view to_string(MapElementKind k) {
  return k == MapElementKind::kLaneSegment ? "lane_segment" : "pedestrian_crossing";
}

std::string_view to_string(ChangeClass c) {
  switch (c) {
    case ChangeClass::kAny: return "any";
    case ChangeClass::kChanged: return "changed";
    case ChangeClass::kNoChange: return "no_change";
    case ChangeClass::kInsertion: return "insertion";
    case ChangeClass::kDeletion: return "deletion";
    case ChangeClass::kGeometry: return "geometry";
    case ChangeClass::kMarking: return "marking";
  }
  return "any";
}

std::optional<ChangeClass> change_class_from_string(std::string_view s) {
  for (ChangeClass c :
       {ChangeClass::kAny, ChangeClass::kChanged, ChangeClass::kNoChange,
        ChangeClass::kInsertion, ChangeClass::kDeletion, ChangeClass::kGeometry,
        ChangeClass::kMarking}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

bool carries(const ElementStatus& status, ChangeClass c) {
  using P = ElementStatus::Primary;
  switch (c) {
    case ChangeClass::kAny: return true;
    case ChangeClass::kChanged: return status.primary != P::kNoChange;
    case ChangeClass::kNoChange: return status.primary == P::kNoChange;
    case ChangeClass::kInsertion: return status.primary == P::kInsertion;
    case ChangeClass::kDeletion: return status.primary == P::kDeletion;
    case ChangeClass::kGeometry: return status.primary == P::kOther && status.geo;
    case ChangeClass::kMarking: return status.primary == P::kOther && status.mark;
  }
  return false;
}

namespace {

std::vector<Vec2> boundary_points(const ElementGeometry& g) {
  std::vector<Vec2> pts = g.left.points;
  pts.insert(pts.end(), g.right.points.begin(), g.right.points.end());
  return pts;
}

}  // namespace

double lane_distance(const ElementGeometry& gt, const ElementGeometry& pred,
                     MapElementKind kind, bool class_match) {
  if (!class_match) return std::numeric_limits<double>::infinity();
  if (kind == MapElementKind::kPedestrianCrossing) {
    return chamfer(boundary_points(gt), boundary_points(pred));
  }
  return 0.5 * (chamfer(boundary_points(gt), boundary_points(pred)) +
                frechet(gt.center, pred.center));
}

namespace {

// Geometry distances are class-independent; compute them once per frame and
// kind, reuse across classes and thresholds.
struct FrameDistances {
  // dist[pred index][gt index], indices into the frame's raw vectors,
  // infinity for kind mismatches.
  std::vector<std::vector<double>> dist;
};

std::vector<FrameDistances> precompute_distances(
    const std::vector<FrameSample>& frames, int jobs) {
  std::vector<FrameDistances> out(frames.size());
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      const FrameSample& frame = frames[f];
      auto& d = out[f].dist;
      d.assign(frame.predictions.size(),
               std::vector<double>(frame.ground_truth.size(),
                                   std::numeric_limits<double>::infinity()));
      for (std::size_t p = 0; p < frame.predictions.size(); ++p) {
        for (std::size_t g = 0; g < frame.ground_truth.size(); ++g) {
          if (frame.predictions[p].kind != frame.ground_truth[g].kind) continue;
          d[p][g] = lane_distance(frame.ground_truth[g].geometry,
                                  frame.predictions[p].geometry,
                                  frame.predictions[p].kind, true);
        }
      }
    }
  };
  const int n_jobs = std::max(1, jobs);
  if (n_jobs == 1 || frames.size() < 2) {
    worker(0, frames.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (frames.size() + n_jobs - 1) / n_jobs;
    for (int t = 0; t < n_jobs; ++t) {
      const std::size_t begin = std::min(frames.size(), t * chunk);
      const std::size_t end = std::min(frames.size(), begin + chunk);
      if (begin < end) threads.emplace_back(worker, begin, end);
    }
    for (auto& th : threads) th.join();
  }
  return out;
}

struct PoolPred {
  double confidence = 0.0;
  std::size_t frame = 0;
  std::size_t index = 0;  // into frame.predictions
};

// All-point average precision from ordered hit flags.
double ap_from_flags(const std::vector<char>& tp, std::size_t gt_total) {
  const std::size_t n = tp.size();
  std::vector<double> precision(n);
  std::size_t tp_cum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tp[i]) ++tp_cum;
    precision[i] = static_cast<double>(tp_cum) / static_cast<double>(i + 1);
  }
  // Monotone envelope from the back, summed at each recall step.
  double envelope = 0.0;
  double ap = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    envelope = std::max(envelope, precision[i]);
    if (tp[i]) ap += envelope / static_cast<double>(gt_total);
  }
  return ap;
}

// Shared matching core: greedy over confidence-sorted pooled predictions.
// `pred_in_pool` / `gt_in_pool` gate membership.
template <typename PredGate, typename GtGate>
std::optional<double> ap_impl(const std::vector<FrameSample>& frames,
                              const std::vector<FrameDistances>& distances,
                              MapElementKind kind,
                              const std::vector<double>& thresholds,
                              PredGate pred_in_pool, GtGate gt_in_pool) {
  std::size_t gt_total = 0;
  for (const FrameSample& frame : frames) {
    for (const GtElement& g : frame.ground_truth) {
      if (g.kind == kind && gt_in_pool(g)) ++gt_total;
    }
  }
  if (gt_total == 0) return std::nullopt;

  std::vector<PoolPred> pool;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& preds = frames[f].predictions;
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (preds[p].kind == kind && pred_in_pool(preds[p])) {
        pool.push_back({preds[p].confidence, f, p});
      }
    }
  }
  std::stable_sort(pool.begin(), pool.end(), [](const PoolPred& a, const PoolPred& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.index < b.index;
  });

  double ap_sum = 0.0;
  for (const double tau : thresholds) {
    std::vector<std::vector<char>> matched(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) {
      matched[f].assign(frames[f].ground_truth.size(), 0);
    }
    std::vector<char> tp(pool.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const PoolPred& pp = pool[i];
      const FrameSample& frame = frames[pp.frame];
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_g = frame.ground_truth.size();
      for (std::size_t g = 0; g < frame.ground_truth.size(); ++g) {
        if (matched[pp.frame][g]) continue;
        const GtElement& gt = frame.ground_truth[g];
        if (gt.kind != kind || !gt_in_pool(gt)) continue;
        const double d = distances[pp.frame].dist[pp.index][g];
        if (d <= tau && d < best) {
          best = d;
          best_g = g;
        }
      }
      if (best_g < frame.ground_truth.size()) {
        matched[pp.frame][best_g] = 1;
        tp[i] = 1;
      }
    }
    ap_sum += ap_from_flags(tp, gt_total);
  }
  return 100.0 * ap_sum / static_cast<double>(thresholds.size());
}

}  // namespace

std::optional<double> ap_for_class(const std::vector<FrameSample>& frames,
                                   ChangeClass c, MapElementKind kind,
                                   const std::vector<double>& thresholds) {
  const auto distances = precompute_distances(frames, 1);
  return ap_impl(
      frames, distances, kind, thresholds,
      [c](const PredictedElement& p) { return carries(p.status, c); },
      [c](const GtElement& g) { return carries(g.status, c); });
}

namespace {

std::optional<double> mean_of_defined(
    const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

ClassReport& class_row(EvalReport& report, ChangeClass c) {
  const std::string name(to_string(c));
  for (ClassReport& row : report.classes) {
    if (row.class_name == name) return row;
  }
  report.classes.push_back(ClassReport{});
  report.classes.back().class_name = name;
  return report.classes.back();
}

}  // namespace

EvalReport evaluate_mapc(const std::vector<FrameSample>& frames,
                         const std::vector<ChangeClass>& classes,
                         const EvalOptions& options) {
  EvalReport report;
  const auto distances = precompute_distances(frames, options.jobs);
  std::vector<std::optional<double>> per_class;
  for (ChangeClass c : classes) {
    auto gate_pred = [c](const PredictedElement& p) { return carries(p.status, c); };
    auto gate_gt = [c](const GtElement& g) { return carries(g.status, c); };
    ClassReport& row = class_row(report, c);
    row.ap_ls = ap_impl(frames, distances, MapElementKind::kLaneSegment,
                        options.ls_thresholds, gate_pred, gate_gt);
    row.ap_pc = ap_impl(frames, distances, MapElementKind::kPedestrianCrossing,
                        options.pc_thresholds, gate_pred, gate_gt);
    row.map_c = mean_of_defined({row.ap_ls, row.ap_pc});
    per_class.push_back(row.map_c);
  }
  report.mapc = mean_of_defined(per_class);
  return report;
}

EvalReport evaluate_macc(const std::vector<FrameSample>& frames,
                         const std::vector<ChangeClass>& classes,
                         const EvalOptions& options) {
  EvalReport report;
  std::vector<std::optional<double>> per_class;
  for (ChangeClass c : classes) {
    std::size_t pos = 0, pos_hit = 0, neg = 0, neg_hit = 0;
    for (const FrameSample& frame : frames) {
      const bool y = std::any_of(
          frame.ground_truth.begin(), frame.ground_truth.end(),
          [&](const GtElement& g) { return carries(g.status, c); });
      const bool y_hat = std::any_of(
          frame.predictions.begin(), frame.predictions.end(),
          [&](const PredictedElement& p) {
            return p.confidence >= options.conf_threshold && carries(p.status, c);
          });
      if (y) {
        ++pos;
        if (y_hat) ++pos_hit;
      } else {
        ++neg;
        if (!y_hat) ++neg_hit;
      }
    }
    ClassReport& row = class_row(report, c);
    if (pos > 0) {
      row.acc_pos = 100.0 * static_cast<double>(pos_hit) / static_cast<double>(pos);
    }
    if (neg > 0) {
      row.acc_neg = 100.0 * static_cast<double>(neg_hit) / static_cast<double>(neg);
    }
    row.macc_c = mean_of_defined({row.acc_pos, row.acc_neg});
    row.acc_partial = row.macc_c.has_value() && (!row.acc_pos || !row.acc_neg);
    per_class.push_back(row.macc_c);
  }
  report.macc = mean_of_defined(per_class);
  return report;
}

EvalReport evaluate(const std::vector<FrameSample>& frames,
                    const std::vector<ChangeClass>& classes,
                    const EvalOptions& options) {
  EvalReport report = evaluate_mapc(frames, classes, options);
  const EvalReport acc = evaluate_macc(frames, classes, options);
  for (const ClassReport& row : acc.classes) {
    for (ClassReport& mine : report.classes) {
      if (mine.class_name == row.class_name) {
        mine.acc_pos = row.acc_pos;
        mine.acc_neg = row.acc_neg;
        mine.macc_c = row.macc_c;
        mine.acc_partial = row.acc_partial;
      }
    }
  }
  report.macc = acc.macc;
  report.map = evaluate_plain_map(frames, options);
  return report;
}

std::optional<double> evaluate_plain_map(const std::vector<FrameSample>& frames,
                                         const EvalOptions& options) {
  // Separate ungated path: plain detection AP per kind.
  const auto distances = precompute_distances(frames, options.jobs);
  auto all_preds = [](const PredictedElement&) { return true; };
  auto all_gts = [](const GtElement&) { return true; };
  const auto ap_ls = ap_impl(frames, distances, MapElementKind::kLaneSegment,
                             options.ls_thresholds, all_preds, all_gts);
  const auto ap_pc = ap_impl(frames, distances, MapElementKind::kPedestrianCrossing,
                             options.pc_thresholds, all_preds, all_gts);
  return mean_of_defined({ap_ls, ap_pc});
}

namespace {

json status_to_json(const ElementStatus& st) {
  json j;
  switch (st.primary) {
    case ElementStatus::Primary::kNoChange: j["primary_label"] = "no_change"; break;
    case ElementStatus::Primary::kInsertion: j["primary_label"] = "insertion"; break;
    case ElementStatus::Primary::kDeletion: j["primary_label"] = "deletion"; break;
    case ElementStatus::Primary::kOther: j["primary_label"] = "other"; break;
  }
  j["geo"] = st.geo;
  j["mark"] = st.mark;
  return j;
}

ElementStatus status_from_json(const json& j, const std::string& path) {
  ElementStatus st;
  const std::string primary = j.at("primary_label").get<std::string>();
  if (primary == "no_change") {
    st.primary = ElementStatus::Primary::kNoChange;
  } else if (primary == "insertion") {
    st.primary = ElementStatus::Primary::kInsertion;
  } else if (primary == "deletion") {
    st.primary = ElementStatus::Primary::kDeletion;
  } else if (primary == "other") {
    st.primary = ElementStatus::Primary::kOther;
  } else {
    throw SchemaError(path + "/primary_label", "unknown label '" + primary + "'");
  }
  st.geo = j.value("geo", false);
  st.mark = j.value("mark", false);
  if (st.primary != ElementStatus::Primary::kOther && (st.geo || st.mark)) {
    throw SchemaError(path, "secondary flags require primary_label 'other'");
  }
  return st;
}

MapElementKind kind_from_json(const json& j, const std::string& path) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lane_segment") return MapElementKind::kLaneSegment;
  if (kind == "pedestrian_crossing") return MapElementKind::kPedestrianCrossing;
  throw SchemaError(path + "/kind", "unknown element kind '" + kind + "'");
}

ElementGeometry geometry_from_frame_json(const json& j, const std::string& path) {
  ElementGeometry g;
  g.left = polyline_from_json(j.at("left_boundary"), path + "/left_boundary");
  g.right = polyline_from_json(j.at("right_boundary"), path + "/right_boundary");
  g.center = polyline_from_json(j.at("centerline"), path + "/centerline");
  // The protocol compares fixed 10-point geometries; inputs already at that
  // density pass through untouched.
  for (Polyline2D* p : {&g.left, &g.right, &g.center}) {
    if (p->size() != 10) *p = resample_polyline(*p, 10);
  }
  return g;
}

json geometry_to_frame_json(const ElementGeometry& g) {
  return json{{"left_boundary", polyline_to_json(g.left)},
              {"right_boundary", polyline_to_json(g.right)},
              {"centerline", polyline_to_json(g.center)}};
}

}  // namespace

std::vector<FrameSample> parse_frames_jsonl(std::string_view bytes) {
  std::vector<FrameSample> frames;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    const std::string_view line = bytes.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError("line " + std::to_string(line_no),
                        std::string("invalid JSON: ") + e.what());
    }
    const std::string path = "line " + std::to_string(line_no);
    FrameSample frame;
    frame.frame_id = doc.at("frame_id").get<std::string>();
    for (const json& p : doc.value("predictions", json::array())) {
      PredictedElement pred;
      pred.kind = kind_from_json(p, path);
      pred.geometry = geometry_from_frame_json(p, path);
      pred.confidence = p.at("confidence").get<double>();
      if (!(pred.confidence >= 0.0 && pred.confidence <= 1.0)) {
        throw SchemaError(path + "/confidence", "confidence must be in [0, 1]");
      }
      pred.status = status_from_json(p, path);
      frame.predictions.push_back(std::move(pred));
    }
    for (const json& g : doc.value("ground_truth", json::array())) {
      GtElement gt;
      gt.kind = kind_from_json(g, path);
      gt.geometry = geometry_from_frame_json(g, path);
      gt.status = status_from_json(g, path);
      frame.ground_truth.push_back(std::move(gt));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::string serialize_frames_jsonl(const std::vector<FrameSample>& frames) {
  std::string out;
  for (const FrameSample& frame : frames) {
    json doc;
    doc["frame_id"] = frame.frame_id;
    json preds = json::array();
    for (const PredictedElement& p : frame.predictions) {
      json j = geometry_to_frame_json(p.geometry);
      j["kind"] = std::string(to_string(p.kind));
      j["confidence"] = p.confidence;
      j.update(status_to_json(p.status));
      preds.push_back(std::move(j));
    }
    doc["predictions"] = std::move(preds);
    json gts = json::array();
    for (const GtElement& g : frame.ground_truth) {
      json j = geometry_to_frame_json(g.geometry);
      j["kind"] = std::string(to_string(g.kind));
      j.update(status_to_json(g.status));
      gts.push_back(std::move(j));
    }
    doc["ground_truth"] = std::move(gts);
    std::string line = canonical_dump(doc);
    out += line;  // canonical_dump already ends with '\n'
  }
  return out;
}

namespace {

json opt_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json();
}

std::optional<double> opt_from_json(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

json report_to_json(const EvalReport& report) {
  json doc;
  json classes = json::array();
  for (const ClassReport& row : report.classes) {
    json j;
    j["class"] = row.class_name;
    j["ap_ls"] = opt_to_json(row.ap_ls);
    j["ap_pc"] = opt_to_json(row.ap_pc);
    j["map_c"] = opt_to_json(row.map_c);
    j["acc_pos"] = opt_to_json(row.acc_pos);
    j["acc_neg"] = opt_to_json(row.acc_neg);
    j["macc_c"] = opt_to_json(row.macc_c);
    j["acc_partial"] = row.acc_partial;
    classes.push_back(std::move(j));
  }
  doc["classes"] = std::move(classes);
  doc["mapc"] = opt_to_json(report.mapc);
  doc["map"] = opt_to_json(report.map);
  doc["macc"] = opt_to_json(report.macc);
  return doc;
}

EvalReport report_from_json(const json& doc) {
  EvalReport report;
  for (const json& j : doc.at("classes")) {
    ClassReport row;
    row.class_name = j.at("class").get<std::string>();
    row.ap_ls = opt_from_json(j, "ap_ls");
    row.ap_pc = opt_from_json(j, "ap_pc");
    row.map_c = opt_from_json(j, "map_c");
    row.acc_pos = opt_from_json(j, "acc_pos");
    row.acc_neg = opt_from_json(j, "acc_neg");
    row.macc_c = opt_from_json(j, "macc_c");
    row.acc_partial = j.value("acc_partial", false);
    report.classes.push_back(std::move(row));
  }
  report.mapc = opt_from_json(doc, "mapc");
  report.map = opt_from_json(doc, "map");
  report.macc = opt_from_json(doc, "macc");
  return report;
}

std::string serialize_report(const EvalReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

EvalReport parse_report(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return report_from_json(doc);
}

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "--";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *v);
  return buf;
}

}  // namespace

std::string render_report_table(const EvalReport& report) {
  std::ostringstream out;
  auto row = [&](const std::string& a, const std::string& b, const std::string& c,
                 const std::string& d, const std::string& e, const std::string& f,
                 const std::string& g) {
    out << "  ";
    out.width(12);
    out << std::left << a;
    for (const std::string* s : {&b, &c, &d, &e, &f, &g}) {
      out.width(9);
      out << std::right << *s;
    }
    out << "\n";
  };
  row("class", "AP_ls", "AP_pc", "mAP_c", "Acc+", "Acc-", "mAcc_c");
  for (const ClassReport& r : report.classes) {
    row(r.class_name, cell(r.ap_ls), cell(r.ap_pc), cell(r.map_c), cell(r.acc_pos),
        cell(r.acc_neg), cell(r.macc_c));
  }
  out << "  ----\n";
  out << "  mAP " << cell(report.map) << "   mAPC " << cell(report.mapc)
      << "   mACC " << cell(report.macc) << "\n";
  return out.str();
}

std::vector<ChangeClass> class_set_from_name(std::string_view name) {
  if (name == "full") {
    return {ChangeClass::kInsertion, ChangeClass::kDeletion, ChangeClass::kGeometry,
            ChangeClass::kMarking};
  }
  if (name == "binary") {
    return {ChangeClass::kChanged, ChangeClass::kNoChange};
  }
  if (name == "any") {
    return {ChangeClass::kAny};
  }
  throw ClassMismatch("unknown class set '" + std::string(name) +
                      "' (expected full, binary or any)");
}

}  // namespace lanekit
