// Command-line front end: validate, diff, apply, invert, perturb, merge,
// crop, eval, stats, render, gap. Every command is a pure file -> file
// pipeline; identical inputs and flags produce identical outputs.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lanekit/canonical.hpp"
#include "lanekit/classify.hpp"
#include "lanekit/crop.hpp"
#include "lanekit/diff.hpp"
#include "lanekit/errors.hpp"
#include "lanekit/eval.hpp"
#include "lanekit/json_io.hpp"
#include "lanekit/merge.hpp"
#include "lanekit/prior_gen.hpp"
#include "lanekit/render_svg.hpp"
#include "lanekit/stats.hpp"

namespace {

using namespace lanekit;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
}

MapScene load_map(const std::string& path) { return parse_map(read_file(path)); }

int run(int argc, char** argv) {
  CLI::App app{"HD map change toolbox: diff, apply and score vectorized maps"};
  app.require_subcommand(1);

  // validate
  std::string val_map;
  bool val_strict = false;
  auto* validate_cmd = app.add_subcommand("validate", "check scene invariants");
  validate_cmd->add_option("--map", val_map, "map JSON")->required();
  validate_cmd->add_flag("--strict", val_strict, "fail on warnings too");

  // diff
  std::string diff_prior, diff_gt, diff_out = "-";
  bool diff_check_canonical = false;
  bool diff_sub_labels = false;
  auto* diff_cmd = app.add_subcommand("diff", "diff two maps into atomic changes");
  diff_cmd->add_option("--prior", diff_prior, "prior map JSON")->required();
  diff_cmd->add_option("--gt", diff_gt, "ground-truth map JSON")->required();
  diff_cmd->add_option("--out", diff_out, "output changeset JSON");
  diff_cmd->add_flag("--check-canonical", diff_check_canonical,
                     "also run canonical-form validation");
  diff_cmd->add_flag("--sub-labels", diff_sub_labels,
                     "print the hierarchical refinement of each change");

  // apply
  std::string apply_map, apply_changes, apply_out = "-";
  bool apply_no_annotate = false;
  auto* apply_cmd = app.add_subcommand("apply", "apply a changeset to a map");
  apply_cmd->add_option("--map", apply_map, "base map JSON")->required();
  apply_cmd->add_option("--changes", apply_changes, "changeset JSON")->required();
  apply_cmd->add_option("--out", apply_out, "output map JSON");
  apply_cmd->add_flag("--no-annotate", apply_no_annotate,
                      "do not append change_hist annotations");

  // invert
  std::string inv_changes, inv_base, inv_out = "-";
  auto* invert_cmd = app.add_subcommand("invert", "invert a changeset");
  invert_cmd->add_option("--changes", inv_changes, "changeset JSON")->required();
  invert_cmd->add_option("--base", inv_base, "base map JSON")->required();
  invert_cmd->add_option("--out", inv_out, "output changeset JSON");

  // perturb
  std::string pert_map, pert_mode = "continuous", pert_out = "-";
  std::string pert_changes_out, pert_config, pert_trajectory;
  std::uint64_t pert_seed = 0;
  double pert_sigma = 0.5, pert_p_del = 0.2, pert_p_shift = 0.2;
  auto* perturb_cmd = app.add_subcommand("perturb", "generate a synthetic prior");
  perturb_cmd->add_option("--map", pert_map, "ground-truth map JSON")->required();
  perturb_cmd->add_option("--mode", pert_mode, "continuous|discrete|rulebased")
      ->check(CLI::IsMember({"continuous", "discrete", "rulebased"}));
  perturb_cmd->add_option("--seed", pert_seed, "random seed");
  perturb_cmd->add_option("--sigma", pert_sigma, "noise/drift std (m)");
  perturb_cmd->add_option("--p-del", pert_p_del, "deletion probability");
  perturb_cmd->add_option("--p-shift", pert_p_shift, "shift probability");
  perturb_cmd->add_option("--config", pert_config, "rule-based config JSON");
  perturb_cmd->add_option("--trajectory", pert_trajectory, "pose file (rulebased)");
  perturb_cmd->add_option("--out", pert_out, "output prior map JSON");
  perturb_cmd->add_option("--changes-out", pert_changes_out,
                          "output restoring changeset JSON");

  // merge
  std::string merge_map, merge_out = "-";
  bool merge_unify = false;
  auto* merge_cmd = app.add_subcommand("merge", "merge consecutive lane segments");
  merge_cmd->add_option("--map", merge_map, "map JSON")->required();
  merge_cmd->add_option("--out", merge_out, "output map JSON");
  merge_cmd->add_flag("--unify-crossings", merge_unify,
                      "also unify crossing orientation");

  // crop
  std::string crop_map, crop_trajectory, crop_out = "-";
  double crop_x = 0.0, crop_y = 0.0, crop_heading = 0.0, crop_extent = 50.0;
  int crop_index = -1;
  auto* crop_cmd = app.add_subcommand("crop", "crop an ego-centric patch");
  crop_cmd->add_option("--map", crop_map, "map JSON")->required();
  crop_cmd->add_option("--x", crop_x, "ego x (m)");
  crop_cmd->add_option("--y", crop_y, "ego y (m)");
  crop_cmd->add_option("--heading", crop_heading, "ego heading (rad)");
  crop_cmd->add_option("--trajectory", crop_trajectory, "pose file");
  crop_cmd->add_option("--index", crop_index, "pose index into the trajectory");
  crop_cmd->add_option("--extent", crop_extent, "patch side length (m)");
  crop_cmd->add_option("--out", crop_out, "output map JSON");

  // eval
  std::string eval_pred, eval_gt, eval_classes = "full", eval_out;
  double eval_conf = 0.5;
  int eval_jobs = 1;
  bool eval_table = false;
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
  eval_cmd->add_option("--pred", eval_pred, "prediction frames (JSONL)")->required();
  eval_cmd->add_option("--gt", eval_gt,
                       "ground-truth frames (JSONL); defaults to --pred");
  eval_cmd->add_option("--classes", eval_classes, "full|binary|any");
  eval_cmd->add_option("--conf-threshold", eval_conf, "mACC confidence threshold");
  eval_cmd->add_option("--jobs", eval_jobs, "parallel frame workers");
  eval_cmd->add_option("--out", eval_out, "output report JSON");
  eval_cmd->add_flag("--table", eval_table, "print the report table");

  // stats
  std::string stats_manifest, stats_out;
  double stats_extent = 50.0;
  auto* stats_cmd = app.add_subcommand("stats", "change-annotation statistics");
  stats_cmd->add_option("--manifest", stats_manifest,
                        "JSON array of {split, map, changes?, trajectory?}")
      ->required();
  stats_cmd->add_option("--extent", stats_extent, "frame side length (m)");
  stats_cmd->add_option("--out", stats_out, "output stats JSON");

  // render
  std::string render_map, render_changes, render_frames, render_out = "-";
  double render_extent = 0.0;
  int render_frame_index = 0;
  auto* render_cmd =
      app.add_subcommand("render", "render a scene or frame to SVG");
  render_cmd->add_option("--map", render_map, "map JSON");
  render_cmd->add_option("--changes", render_changes,
                         "changeset JSON (draws deletions)");
  render_cmd->add_option("--frames", render_frames,
                         "frame JSONL (renders one frame instead of a map)");
  render_cmd->add_option("--index", render_frame_index, "frame index");
  render_cmd->add_option("--extent", render_extent, "fixed viewport side (m)");
  render_cmd->add_option("--out", render_out, "output SVG");

  // gap
  std::string gap_val, gap_test, gap_out;
  bool gap_table = false;
  auto* gap_cmd = app.add_subcommand("gap", "compare two evaluation reports");
  gap_cmd->add_option("--val", gap_val, "validation report JSON")->required();
  gap_cmd->add_option("--test", gap_test, "test report JSON")->required();
  gap_cmd->add_option("--out", gap_out, "output delta JSON");
  gap_cmd->add_flag("--table", gap_table, "print the delta table");

  CLI11_PARSE(app, argc, argv);

  if (validate_cmd->parsed()) {
    const MapScene scene = load_map(val_map);
    const ValidationReport report = validate_scene(scene);
    for (const Violation& v : report.violations) {
      std::cout << (v.severity == Severity::kError ? "error" : "warning") << " ["
                << v.rule << "] element " << v.element_id << ": " << v.message
                << "\n";
    }
    if (report.ok()) {
      std::cout << "ok: " << scene.lane_segments.size() << " lane segments, "
                << scene.pedestrian_crossings.size() << " crossings\n";
      return 0;
    }
    return (report.has_errors() || val_strict) ? 1 : 0;
  }

  if (diff_cmd->parsed()) {
    const MapScene prior = load_map(diff_prior);
    const MapScene gt = load_map(diff_gt);
    const ChangeSet cs = diff_maps(prior, gt);
    write_file(diff_out, serialize_changeset(cs));
    if (diff_sub_labels) {
      for (const AtomicChange& c : cs.changes()) {
        std::cout << c.target_id << " " << to_string(c.kind());
        for (const std::string& label : sub_labels(c)) std::cout << " " << label;
        std::cout << "\n";
      }
    }
    if (diff_check_canonical) {
      const ValidationReport report = validate_canonical(cs, prior, gt);
      for (const Violation& v : report.violations) {
        std::cerr << (v.severity == Severity::kError ? "error" : "warning") << " ["
                  << v.rule << "] element " << v.element_id << ": " << v.message
                  << "\n";
      }
    }
    return 0;
  }

  if (apply_cmd->parsed()) {
    const MapScene scene = load_map(apply_map);
    const ChangeSet cs = parse_changeset(read_file(apply_changes));
    ApplyOptions options;
    options.annotate = !apply_no_annotate;
    write_file(apply_out, serialize_map(apply_changeset(scene, cs, options)));
    return 0;
  }

  if (invert_cmd->parsed()) {
    const ChangeSet cs = parse_changeset(read_file(inv_changes));
    const MapScene base = load_map(inv_base);
    write_file(inv_out, serialize_changeset(invert_changeset(cs, base)));
    return 0;
  }

  if (perturb_cmd->parsed()) {
    const MapScene gt = load_map(pert_map);
    if (pert_mode == "continuous") {
      write_file(pert_out, serialize_map(perturb_continuous(gt, pert_sigma, pert_seed)));
      return 0;
    }
    GeneratedPrior result;
    if (pert_mode == "discrete") {
      result = perturb_discrete(gt, pert_p_del, pert_p_shift, pert_sigma, pert_seed);
    } else {
      if (pert_trajectory.empty()) {
        throw std::runtime_error("rulebased mode requires --trajectory");
      }
      RuleBasedConfig cfg;
      if (!pert_config.empty()) {
        cfg = rule_based_config_from_json(nlohmann::json::parse(read_file(pert_config)));
      }
      const std::vector<EgoPose> trajectory = parse_poses(read_file(pert_trajectory));
      result = perturb_rulebased(gt, trajectory, cfg, pert_seed);
    }
    write_file(pert_out, serialize_map(result.prior));
    if (!pert_changes_out.empty()) {
      write_file(pert_changes_out, serialize_changeset(result.restore));
    }
    return 0;
  }

  if (merge_cmd->parsed()) {
    MapScene scene = load_map(merge_map);
    scene = merge_elements(scene);
    if (merge_unify) scene = unify_crossing_orientation(scene);
    write_file(merge_out, serialize_map(scene));
    return 0;
  }

  if (crop_cmd->parsed()) {
    const MapScene scene = load_map(crop_map);
    EgoPose pose{0, crop_x, crop_y, crop_heading};
    if (!crop_trajectory.empty()) {
      const auto poses = parse_poses(read_file(crop_trajectory));
      if (crop_index < 0 || crop_index >= static_cast<int>(poses.size())) {
        throw std::runtime_error("--index out of range for trajectory");
      }
      pose = poses[static_cast<std::size_t>(crop_index)];
    }
    write_file(crop_out, serialize_map(crop_patch(scene, pose, crop_extent)));
    return 0;
  }

  if (eval_cmd->parsed()) {
    const auto pred_frames = parse_frames_jsonl(read_file(eval_pred));
    std::vector<FrameSample> frames = pred_frames;
    if (!eval_gt.empty()) {
      const auto gt_frames = parse_frames_jsonl(read_file(eval_gt));
      std::map<std::string, const FrameSample*> by_id;
      for (const FrameSample& f : gt_frames) by_id[f.frame_id] = &f;
      for (FrameSample& f : frames) {
        auto it = by_id.find(f.frame_id);
        if (it == by_id.end()) {
          throw ClassMismatch("no ground-truth frame for id '" + f.frame_id + "'");
        }
        f.ground_truth = it->second->ground_truth;
      }
    }
    EvalOptions options;
    options.conf_threshold = eval_conf;
    options.jobs = eval_jobs;
    const EvalReport report =
        evaluate(frames, class_set_from_name(eval_classes), options);
    if (!eval_out.empty()) write_file(eval_out, serialize_report(report));
    if (eval_table || eval_out.empty()) std::cout << render_report_table(report);
    return 0;
  }

  if (stats_cmd->parsed()) {
    const nlohmann::json manifest = nlohmann::json::parse(read_file(stats_manifest));
    if (!manifest.is_array()) throw SchemaError("", "manifest must be an array");
    std::vector<StatsInput> inputs;
    for (const nlohmann::json& entry : manifest) {
      StatsInput input;
      input.split = entry.at("split").get<std::string>();
      input.scene = load_map(entry.at("map").get<std::string>());
      if (entry.contains("changes") && !entry["changes"].is_null()) {
        input.changes = parse_changeset(read_file(entry["changes"].get<std::string>()));
      }
      if (entry.contains("trajectory") && !entry["trajectory"].is_null()) {
        input.trajectory = parse_poses(read_file(entry["trajectory"].get<std::string>()));
      }
      inputs.push_back(std::move(input));
    }
    const StatsTable table = compute_stats(inputs, stats_extent);
    if (!stats_out.empty()) {
      write_file(stats_out, canonical_dump(stats_to_json(table)));
    }
    std::cout << render_stats_table(table);
    return 0;
  }

  if (render_cmd->parsed()) {
    RenderOptions options;
    if (render_extent > 0.0) options.extent = render_extent;
    if (!render_frames.empty()) {
      const auto frames = parse_frames_jsonl(read_file(render_frames));
      if (render_frame_index < 0 ||
          render_frame_index >= static_cast<int>(frames.size())) {
        throw std::runtime_error("--index out of range for frames file");
      }
      write_file(render_out,
                 render_svg(frames[static_cast<std::size_t>(render_frame_index)],
                            options));
      return 0;
    }
    if (render_map.empty()) {
      throw std::runtime_error("render needs --map or --frames");
    }
    const MapScene scene = load_map(render_map);
    std::optional<ChangeSet> cs;
    if (!render_changes.empty()) cs = parse_changeset(read_file(render_changes));
    write_file(render_out, render_svg(scene, cs, options));
    return 0;
  }

  if (gap_cmd->parsed()) {
    const EvalReport val = parse_report(read_file(gap_val));
    const EvalReport test = parse_report(read_file(gap_test));
    const GapReport gap = gap_compare(val, test);
    if (!gap_out.empty()) write_file(gap_out, gap_report_to_json(gap).dump(2) + "\n");
    if (gap_table || gap_out.empty()) std::cout << render_gap_table(gap);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const MapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
