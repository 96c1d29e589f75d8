#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanekit/change.hpp"
#include "lanekit/map.hpp"

namespace lanekit {

enum class MapElementKind { kLaneSegment, kPedestrianCrossing };

std::string_view to_string(MapElementKind k);

// Change classes used for gating, AP pooling and frame labels. kAny gates
// nothing (plain detection); kChanged/kNoChange form the binary setting; the
// remaining four are the full atomic setting.
enum class ChangeClass {
  kAny,
  kChanged,
  kNoChange,
  kInsertion,
  kDeletion,
  kGeometry,
  kMarking,
};

std::string_view to_string(ChangeClass c);
std::optional<ChangeClass> change_class_from_string(std::string_view s);

// Whether an element's change status carries the class: exact primary match
// for insertion/deletion/no-change, secondary flags for geometry/marking.
bool carries(const ElementStatus& status, ChangeClass c);

struct PredictedElement {
  MapElementKind kind = MapElementKind::kLaneSegment;
  ElementGeometry geometry;  // resampled to 10 points per polyline
  double confidence = 0.0;
  ElementStatus status;
};

struct GtElement {
  MapElementKind kind = MapElementKind::kLaneSegment;
  ElementGeometry geometry;
  ElementStatus status;
};

struct FrameSample {
  std::string frame_id;
  std::vector<PredictedElement> predictions;
  std::vector<GtElement> ground_truth;
};

// Change-aware element distance: infinite unless the change statuses match;
// lane segments use 0.5*(Chamfer over the pooled boundary points + Frechet
// over the centerlines), crossings pure Chamfer over the boundary points.
double lane_distance(const ElementGeometry& gt, const ElementGeometry& pred,
                     MapElementKind kind, bool class_match);

struct EvalOptions {
  std::vector<double> ls_thresholds{1.0, 2.0, 3.0};
  std::vector<double> pc_thresholds{0.5, 1.0, 1.5};
  double conf_threshold = 0.5;  // frame-level decision threshold
  int jobs = 1;                 // parallel per-frame distance precompute
};

// Average precision for one class and element kind over all frames, at the
// given distance thresholds (averaged), reported x100. Matching is
// confidence-descending greedy with global pooling across frames, one-to-one
// per frame, nearest eligible ground truth first. Returns nullopt when no
// ground-truth instance of the class exists for this kind.
std::optional<double> ap_for_class(const std::vector<FrameSample>& frames,
                                   ChangeClass c, MapElementKind kind,
                                   const std::vector<double>& thresholds);

struct ClassReport {
  std::string class_name;
  std::optional<double> ap_ls;
  std::optional<double> ap_pc;
  std::optional<double> map_c;
  std::optional<double> acc_pos;
  std::optional<double> acc_neg;
  std::optional<double> macc_c;
  bool acc_partial = false;  // one accuracy side undefined, averaged over rest
};

struct EvalReport {
  std::vector<ClassReport> classes;
  std::optional<double> mapc;
  std::optional<double> map;  // class-agnostic mAP
  std::optional<double> macc;
};

// AP side: per class mAP_c (mean of the kinds that have instances), mAPC as
// the unweighted mean over classes.
EvalReport evaluate_mapc(const std::vector<FrameSample>& frames,
                         const std::vector<ChangeClass>& classes,
                         const EvalOptions& options = {});

// Accuracy side: per-frame labels y_c / y-hat_c (prediction confidence gated
// at conf_threshold), Acc+ on positive frames, Acc- on negative frames,
// mAcc_c averaging the defined sides, mACC over classes.
EvalReport evaluate_macc(const std::vector<FrameSample>& frames,
                         const std::vector<ChangeClass>& classes,
                         const EvalOptions& options = {});

// Both sides plus the class-agnostic mAP.
EvalReport evaluate(const std::vector<FrameSample>& frames,
                    const std::vector<ChangeClass>& classes,
                    const EvalOptions& options = {});

// Plain detection mAP with no change gating anywhere; independent of the
// class-aware path.
std::optional<double> evaluate_plain_map(const std::vector<FrameSample>& frames,
                                         const EvalOptions& options = {});

// Frame I/O: JSON lines, one FrameSample per line.
std::vector<FrameSample> parse_frames_jsonl(std::string_view bytes);
std::string serialize_frames_jsonl(const std::vector<FrameSample>& frames);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
std::string serialize_report(const EvalReport& report);
EvalReport parse_report(std::string_view bytes);

// Aligned text table, one row per class plus the aggregate line.
std::string render_report_table(const EvalReport& report);

// Named class sets: "full" = {insertion, deletion, geometry, marking},
// "binary" = {changed, no_change}, "any" = {any}.
std::vector<ChangeClass> class_set_from_name(std::string_view name);

}  // namespace lanekit
