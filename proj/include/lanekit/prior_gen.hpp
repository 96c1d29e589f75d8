#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "lanekit/change.hpp"
#include "lanekit/eval.hpp"
#include "lanekit/map.hpp"

namespace lanekit {

// A synthetically aged map plus the canonical change set restoring the
// ground truth: apply_changeset(prior, restore) reproduces gt (with change
// annotations describing the restoration).
struct GeneratedPrior {
  MapScene prior;
  ChangeSet restore;
};

// Gaussian vertex noise on every boundary; centerlines are recomputed as
// pointwise midpoints of the resampled boundaries. No change set: noise
// priors are not expressible as atomic changes. sigma == 0 returns the input
// unchanged. Deterministic in (scene, sigma, seed).
MapScene perturb_continuous(const MapScene& gt, double sigma, std::uint64_t seed);

// Per element: deleted with probability p_del, else rigidly shifted by one
// shared Gaussian drift vector with probability p_shift. Requires
// p_del + p_shift <= 1.
GeneratedPrior perturb_discrete(const MapScene& gt, double p_del, double p_shift,
                                double sigma, std::uint64_t seed);

// Knobs of the rule-based generator.
struct RuleBasedConfig {
  double intersection_weight = 4.5;  // lane-sampling bias toward intersections
  double width_mean = 3.5;           // crossing width prior, meters
  double width_std = 1.0;
  double width_clip_lo = 2.0;
  double width_clip_hi = 4.0;
  double min_height = 2.0;           // minimal crossing span across the road
  double max_iou = 0.05;             // against existing crossings
  int max_iterations_per_map = 20;   // crossing-insertion attempts
  double trajectory_buffer = 15.0;   // meters around the ego trajectory
  int marking_run_length = 3;        // consecutive segments per marking change
  int bike_run_length = 5;           // consecutive segments per bike lane
  int max_bike_lanes = 2;
  int marking_sequences = 4;         // attempted marking runs

  bool valid() const;
};

RuleBasedConfig rule_based_config_from_json(const nlohmann::json& j);
nlohmann::json rule_based_config_to_json(const RuleBasedConfig& cfg);

// Scripted edits: pedestrian-crossing insertion (intersection-biased lane
// sampling, centerline-normal axis, clipped-normal width, IoU and trajectory
// buffer checks, bounded attempts), lane-marking perturbation over
// fixed-length successor runs, bike-lane insertion by splitting the
// rightmost lane, and painted-boundary marking deletion. Emits the perturbed
// prior plus the restoring change set; maps without candidates yield an
// empty action, not a failure.
GeneratedPrior perturb_rulebased(const MapScene& gt,
                                 const std::vector<EgoPose>& trajectory,
                                 const RuleBasedConfig& cfg, std::uint64_t seed);

// Per-class metric deltas between two evaluation runs over the same class
// set: delta = test - val. Used to quantify the gap between synthetic
// validation and real-world test performance.
struct GapReport {
  struct ClassDelta {
    std::string class_name;
    std::optional<double> delta_map_c;
    std::optional<double> delta_macc_c;
  };
  std::vector<ClassDelta> classes;
  std::optional<double> delta_mapc;
  std::optional<double> delta_macc;
  std::optional<double> delta_map;
};

// Throws ClassMismatch when the reports cover different class sets.
GapReport gap_compare(const EvalReport& val, const EvalReport& test);

nlohmann::json gap_report_to_json(const GapReport& gap);
std::string render_gap_table(const GapReport& gap);

}  // namespace lanekit
