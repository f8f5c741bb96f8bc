// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparsecue/checkpoint.hpp"
#include "sparsecue/edit.hpp"
#include "sparsecue/error.hpp"
#include "sparsecue/hash.hpp"
#include "sparsecue/ingest.hpp"
#include "sparsecue/metrics.hpp"
#include "sparsecue/motion_io.hpp"
#include "sparsecue/rng.hpp"
#include "sparsecue/sampling.hpp"
#include "sparsecue/synth.hpp"
#include "sparsecue/trainer.hpp"

#ifndef SPARSECUE_VERSION
#define SPARSECUE_VERSION "0.0.0"
#endif

namespace sparsecue::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kOutDirEnv = "SPARSECUE_OUT_DIR";

// Flag map, or the "config" block of a run manifest, fed to one subcommand.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string subcommand) : sub_(std::move(subcommand)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("config: ") + e.what());
    }
    const json* flags = &doc;
    if (doc.is_object() && doc.contains("subcommand") && doc.contains("config")) {
      if (doc["subcommand"] != sub_) {
        throw ValidationError("config: manifest was written by '" + doc["subcommand"].get<std::string>() +
                              "', not '" + sub_ + "'");
      }
      flags = &doc["config"];
    }
    if (!flags->is_object()) throw ParseError("config: expected a JSON object of flag values");
    std::vector<CLI::ConfigItem> items;
    if (sub_.empty()) return items;
    for (const auto& [key, value] : flags->items()) {
      if (key == "out" || key == "config" || value.is_null()) continue;
      CLI::ConfigItem item;
      item.parents = {sub_};
      item.name = key;
      if (value.is_boolean()) {
        if (!value.get<bool>()) continue;
        item.inputs = {"true"};
      } else if (value.is_array()) {
        if (value.empty()) continue;
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs = {scalar(value)};
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw ParseError("config: flag values must be scalars or arrays of scalars");
  }

  std::string sub_;
};

json typed(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  const char* end = s.data() + s.size();
  long long i = 0;
  if (auto [p, ec] = std::from_chars(s.data(), end, i); ec == std::errc() && p == end) return i;
  unsigned long long u = 0;
  if (auto [p, ec] = std::from_chars(s.data(), end, u); ec == std::errc() && p == end) return u;
  double d = 0.0;
  if (auto [p, ec] = std::from_chars(s.data(), end, d); ec == std::errc() && p == end) return d;
  return s;
}

// Every option of `sub` with its effective value, keyed by long name.
json resolved_config(const CLI::App& sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "out" || name == "dump-config") continue;
    if (opt->get_items_expected_max() == 0) {
      cfg[name] = opt->count() > 0 && opt->as<bool>();
      continue;
    }
    const bool multi = opt->get_expected_max() > 1;
    if (multi) {
      json arr = json::array();
      if (opt->count() > 0) {
        for (const auto& v : opt->results()) arr.push_back(typed(v));
      }
      cfg[name] = std::move(arr);
    } else if (opt->count() > 0) {
      cfg[name] = typed(opt->results().back());
    } else if (!opt->get_default_str().empty()) {
      cfg[name] = typed(opt->get_default_str());
    }
  }
  return cfg;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path output_path(const std::string& p) {
  fs::path path(p);
  if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0' && path.is_relative()) {
    path = fs::path(dir) / path;
  }
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  return path;
}

fs::path side_path(const fs::path& out, std::string_view suffix) { return fs::path(out.string() + std::string(suffix)); }

// Everything one invocation records about itself.
struct Record {
  json seeds = json::object();
  json inputs = json::object();
  json outputs = json::object();
  json extra = json::object();

  void input(const std::string& role, const fs::path& p) {
    inputs[role] = {{"path", p.string()}, {"sha256", sha256_file(p)}};
  }
  void output(const std::string& role, const fs::path& p) {
    outputs[role] = {{"path", p.string()}, {"sha256", sha256_file(p)}};
  }
};

void write_manifest(const CLI::App& sub, const Record& rec, const fs::path& out) {
  json m;
  m["subcommand"] = sub.get_name();
  m["version"] = SPARSECUE_VERSION;
  m["timestamp"] = utc_timestamp();
  m["config"] = resolved_config(sub);
  m["seeds"] = rec.seeds;
  m["inputs"] = rec.inputs;
  m["outputs"] = rec.outputs;
  for (const auto& [k, v] : rec.extra.items()) m[k] = v;
  write_text_file(side_path(out, ".manifest.json"), m.dump(2) + "\n");
}

std::string read_kind(const std::string& text, const std::string& what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    throw ParseError(what + ": missing 'kind'");
  }
  return doc["kind"].get<std::string>();
}

AugmentConfig augment_from(const std::string& spec, Record& rec) {
  if (spec.empty() || spec == "off") return AugmentConfig::disabled();
  if (spec == "default") return AugmentConfig{};
  rec.input("augment", spec);
  return load_augment_config(spec);
}

CameraRanges ranges_from(const std::string& path, Record& rec) {
  if (path.empty()) return CameraRanges{};
  rec.input("camera-ranges", path);
  return parse_camera_ranges(read_text_file(path));
}

struct Command {
  CLI::App* app = nullptr;
  std::function<int()> handler;
};

// synth ----------------------------------------------------------------------

struct SynthOpts {
  std::string pattern;
  double amplitude = 0.0;
  SynthParams params;
  std::uint64_t seed = 0;
  std::string out;
  CLI::Option* amplitude_opt = nullptr;
};

Command add_synth(CLI::App& app, SynthOpts& o, std::ostream& out) {
  CLI::App* sub = app.add_subcommand("synth", "Procedural motion clip");
  sub->add_option("--pattern", o.pattern, "walk | jump | sway | static")
      ->required()
      ->check(CLI::IsMember({"walk", "jump", "sway", "static"}));
  o.amplitude_opt = sub->add_option("--amplitude", o.amplitude, "Step length, jump rise or sway excursion (m)");
  o.amplitude_opt->default_str("");
  sub->add_option("--period", o.params.period, "Cycle period (s)");
  sub->add_option("--duration", o.params.duration, "Clip length (s)");
  sub->add_option("--fps", o.params.fps, "Frame rate");
  sub->add_option("--seed", o.seed, "Root seed");
  sub->add_option("--out", o.out, "Motion file")->required();
  return {sub, [&app = *sub, &o, &out]() {
            if (o.amplitude_opt->count() > 0) o.params.amplitude = o.amplitude;
            const MotionPattern pattern = *parse_pattern(o.pattern);
            const MotionSequence motion = synth_motion(pattern, o.params, o.seed);
            const fs::path dst = output_path(o.out);
            save_motion(motion, dst);
            Record rec;
            rec.seeds["seed"] = o.seed;
            rec.output("motion", dst);
            write_manifest(app, rec, dst);
            out << "wrote " << dst.string() << " (" << motion.num_frames() << " frames)\n";
            return kOk;
          }};
}

// project --------------------------------------------------------------------

struct ProjectOpts {
  std::string motion;
  std::uint64_t camera_seed = 0;
  std::string augment = "off";
  std::string camera_ranges;
  std::string camera_out;
  std::string keypoints_out;
  PixelFrame pixels;
  std::string out;
};

Command add_project(CLI::App& app, ProjectOpts& o, std::ostream& out) {
  CLI::App* sub = app.add_subcommand("project", "Project a motion to normalized 2D cues under a sampled camera");
  sub->add_option("--motion", o.motion, "Input motion file")->required();
  sub->add_option("--camera-seed", o.camera_seed, "Seed for the camera and augmentation streams");
  sub->add_option("--augment", o.augment, "off | default | path to an augmentation config");
  sub->add_option("--camera-ranges", o.camera_ranges, "Camera sampling ranges file");
  sub->add_option("--camera-out", o.camera_out, "Also write the sampled camera track");
  sub->add_option("--keypoints-out", o.keypoints_out, "Also write the cue joints as pixel keypoints");
  sub->add_option("--pixel-scale", o.pixels.pixel_scale, "Pixels per normalized image unit");
  sub->add_option("--image-width", o.pixels.width, "Image width in pixels");
  sub->add_option("--image-height", o.pixels.height, "Image height in pixels");
  sub->add_option("--out", o.out, "Cue file")->required();
  return {sub, [&app = *sub, &o, &out]() {
            Record rec;
            const MotionSequence motion = load_motion(o.motion);
            rec.input("motion", o.motion);
            const CameraRanges ranges = ranges_from(o.camera_ranges, rec);
            const AugmentConfig aug = augment_from(o.augment, rec);
            const std::uint64_t cam_seed = derive_seed(o.camera_seed, "camera");
            const std::uint64_t aug_seed = derive_seed(o.camera_seed, "augment");
            rec.seeds = {{"camera-seed", o.camera_seed}, {"camera", cam_seed}, {"augment", aug_seed}};
            const CameraTrack cam =
                sample_camera(motion.num_frames(), motion.fps(), cam_seed, ranges, motion_centroid(motion));
            SparseCue2D cues = project(motion, cam);
            if (aug.any_enabled()) cues = augment(cues, aug, aug_seed);
            const fs::path dst = output_path(o.out);
            save_cues(cues, dst);
            rec.output("cues", dst);
            if (!o.camera_out.empty()) {
              const fs::path p = output_path(o.camera_out);
              save_camera(cam, p);
              rec.output("camera", p);
            }
            if (!o.keypoints_out.empty()) {
              const fs::path p = output_path(o.keypoints_out);
              save_keypoints(project_to_pixels(motion, cam, o.pixels), p);
              rec.output("keypoints", p);
            }
            write_manifest(app, rec, dst);
            out << "wrote " << dst.string() << "\n";
            return kOk;
          }};
}

// ingest ---------------------------------------------------------------------

struct IngestOpts {
  std::string keypoints;
  std::string mapping = "human17";
  double confidence_floor = 0.0;
  CLI::Option* floor_opt = nullptr;
  std::string out;
};

Command add_ingest(CLI::App& app, IngestOpts& o, std::ostream& out) {
  CLI::App* sub = app.add_subcommand("ingest", "Map estimated 2D keypoints to canonical cues");
  sub->add_option("--keypoints", o.keypoints, "Keypoint track file")->required();
  sub->add_option("--mapping", o.mapping, "human17 | quadruped | identity | path to a mapping file");
  o.floor_opt = sub->add_option("--confidence-floor", o.confidence_floor, "Override the mapping's confidence floor");
  o.floor_opt->default_str("");
  sub->add_option("--out", o.out, "Cue file")->required();
  return {sub, [&app = *sub, &o, &out]() {
            Record rec;
            const RawKeypointTrack track = load_keypoints(o.keypoints);
            rec.input("keypoints", o.keypoints);
            MappingConfig mapping;
            if (o.mapping == "human17") {
              mapping = MappingConfig::human17();
            } else if (o.mapping == "quadruped") {
              mapping = MappingConfig::quadruped();
            } else if (o.mapping == "identity") {
              mapping = MappingConfig::identity();
            } else {
              mapping = load_mapping(o.mapping);
              rec.input("mapping", o.mapping);
            }
            if (o.floor_opt->count() > 0) mapping.confidence_floor = o.confidence_floor;
            const SparseCue2D cues = map_to_canonical(track, mapping);
            const fs::path dst = output_path(o.out);
            save_cues(cues, dst);
            rec.output("cues", dst);
            write_manifest(app, rec, dst);
            out << "wrote " << dst.string() << "\n";
            return kOk;
          }};
}

// validate -------------------------------------------------------------------

struct ValidateOpts {
  std::string cues;
  double jump_threshold = kDefaultJumpThreshold;
  std::string out;
};

Command add_validate(CLI::App& app, ValidateOpts& o, std::ostream& out) {
  CLI::App* sub = app.add_subcommand("validate", "Check cue invariants and report diagnostics");
  sub->add_option("--cues", o.cues, "Cue file (2D or 3D)")->required();
  sub->add_option("--jump-threshold", o.jump_threshold, "Per-frame displacement flagged as an outlier");
  sub->add_option("--out", o.out, "Diagnostics report")->required();
  return {sub, [&app = *sub, &o, &out]() {
            Record rec;
            const std::string text = read_text_file(o.cues);
            rec.input("cues", o.cues);
            const std::string kind = read_kind(text, o.cues);
            CueDiagnostics diag;
            if (kind == "cues2d") {
              diag = validate_cues(parse_cues2d(text), o.jump_threshold);
            } else if (kind == "cues3d") {
              diag = validate_cues(parse_cues3d(text), o.jump_threshold);
            } else {
              throw ParseError(o.cues + ": kind '" + kind + "' is not a cue file");
            }
            const fs::path dst = output_path(o.out);
            write_text_file(dst, dump_diagnostics(diag));
            rec.output("diagnostics", dst);
            rec.extra["ok"] = diag.ok();
            write_manifest(app, rec, dst);
            if (diag.ok()) {
              out << "ok: norm " << diag.global_norm << ", " << diag.outliers.size() << " displacement outliers\n";
              return kOk;
            }
            out << "invalid: " << diag.violations.size() << " violations\n";
            return kValidation;
          }};
}

// train ----------------------------------------------------------------------

struct TrainOpts {
  TrainConfig cfg;
  std::string stage;
  std::string from;
  std::vector<std::string> ablate;
  std::string augment = "default";
  std::string camera_ranges;
  bool dump_config = false;
  std::string out;
};

std::map<std::string, std::string> hashes_of(const GeneratorParams& base,
                                             const std::map<std::string, AdapterParams>& adapters) {
  std::map<std::string, std::string> h{{"base", weights_hash(base)}};
  for (const auto& [role, a] : adapters) h[role] = weights_hash(a);
  return h;
}

json dump_with_sampling(const CLI::App& sub) {
  json cfg = resolved_config(sub);
  const SampleConfig sc;
  cfg["cfg-motion"] = sc.cfg_motion;
  cfg["cfg-text"] = sc.cfg_text;
  cfg["steps"] = sc.steps;
  return cfg;
}

Command add_train(CLI::App& app, TrainOpts& o, std::ostream& out) {
  CLI::App* sub = app.add_subcommand("train", "Base pretraining or one adapter stage");
  TrainConfig& c = o.cfg;
  sub->add_option("--stage", o.stage, "base | 3d | 2d")->check(CLI::IsMember({"base", "3d", "2d"}));
  sub->add_option("--from", o.from, "Checkpoint to start from (base for 3d, stage-1 result for 2d)");
  sub->add_option("--lr", c.learning_rate, "Learning rate");
  sub->add_option("--batch", c.batch_size, "Batch size");
  sub->add_option("--lambda1", c.lambda1, "Weight of the orthogonality term");
  sub->add_option("--lambda2", c.lambda2, "Weight of the 3D alignment term");
  sub->add_option("--epochs", c.epochs, "Total adapter epochs, split evenly between stages 3d and 2d");
  sub->add_option("--base-epochs", c.base_epochs, "Epochs of base pretraining");
  sub->add_option("--mask-ratio", c.mask_ratio, "Lower bound of the per-clip mask ratio");
  sub->add_option("--text-dropout", c.text_dropout, "Prompt dropout during base pretraining");
  sub->add_option("--global-dropout", c.global_dropout, "Chance of training a clip without 3D-GA");
  sub->add_option("--clips", c.data.num_clips, "Training clips");
  sub->add_option("--val-clips", c.data.val_clips, "Fixed validation clips");
  sub->add_option("--clip-frames", c.data.clip_frames, "Frames per clip");
  sub->add_option("--fps", c.data.fps, "Clip frame rate");
  sub->add_option("--width", c.model.width, "Network width (base stage only)");
  sub->add_option("--blocks", c.model.blocks, "Temporal blocks (base stage only)");
  sub->add_option("--max-frames", c.model.max_frames, "Longest sequence (base stage only)");
  sub->add_option("--ablate", o.ablate, "no-3dga | no-lo | no-l3d | freeze-3dga | use-3d-input")
      ->check(CLI::IsMember({"no-3dga", "no-lo", "no-l3d", "freeze-3dga", "use-3d-input"}));
  sub->add_flag("--allow-cold-start", c.allow_cold_start, "Let stage 2d start without a 3d-la (needs no-l3d)");
  sub->add_option("--augment", o.augment, "off | default | path to an augmentation config");
  sub->add_option("--camera-ranges", o.camera_ranges, "Camera sampling ranges file");
  sub->add_option("--seed", c.seed, "Root seed");
  sub->add_flag("--dump-config", o.dump_config, "Print the resolved configuration and exit");
  sub->add_option("--out", o.out, "Checkpoint file");
  return {sub, [&app = *sub, &o, &out]() {
            if (o.dump_config) {
              out << dump_with_sampling(app).dump(2) << "\n";
              return kOk;
            }
            if (o.out.empty()) throw ValidationError("train: --out is required");
            if (o.stage.empty()) throw ValidationError("train: --stage is required");
            TrainConfig cfg = o.cfg;
            for (const auto& a : o.ablate) {
              if (a == "no-3dga") cfg.ablate.no_3dga = true;
              if (a == "no-lo") cfg.ablate.no_lo = true;
              if (a == "no-l3d") cfg.ablate.no_l3d = true;
              if (a == "freeze-3dga") cfg.ablate.freeze_3dga = true;
              if (a == "use-3d-input") cfg.ablate.use_3d_input = true;
            }
            Record rec;
            cfg.augment = augment_from(o.augment, rec);
            cfg.camera = ranges_from(o.camera_ranges, rec);
            const Stage stage = *parse_stage(o.stage);
            rec.seeds["seed"] = cfg.seed;

            TrainState st;
            std::map<std::string, std::string> before;
            std::vector<std::string> frozen{"base"};
            if (stage == Stage::kBase) {
              st = train_base(cfg);
            } else {
              if (o.from.empty()) throw ValidationError("train: stage " + o.stage + " needs --from");
              const Checkpoint ck = load_checkpoint(o.from);
              rec.input("from", o.from);
              before = hashes_of(ck.base, ck.adapters);
              cfg.model = ck.base.config;
              if (stage == Stage::kStage3D) {
                st = train_stage_3d(ck.base, cfg);
              } else {
                const TrainState prev = TrainState::from_checkpoint(ck);
                st = train_stage_2d(ck.base, &prev, cfg);
                if (st.adapters.count(roles::kLocal3D) != 0) frozen.push_back(roles::kLocal3D);
                if (cfg.ablate.freeze_3dga && st.adapters.count(roles::kGlobal3D) != 0) {
                  frozen.push_back(roles::kGlobal3D);
                }
              }
            }
            const fs::path dst = output_path(o.out);
            Checkpoint ck = st.to_checkpoint();
            save_checkpoint(ck, dst);
            rec.output("checkpoint", dst);
            const fs::path losses = side_path(dst, ".loss.csv");
            write_text_file(losses, loss_table_csv(st.history));
            rec.output("loss_table", losses);
            const fs::path val = side_path(dst, ".val.csv");
            write_text_file(val, validation_csv(st.validation));
            rec.output("validation", val);

            const auto after = hashes_of(st.base, st.adapters);
            rec.extra["stage"] = o.stage;
            rec.extra["stage_epochs"] = cfg.stage_epochs(stage);
            rec.extra["epoch_split"] = {{"3d", cfg.stage_epochs(Stage::kStage3D)},
                                        {"2d", cfg.stage_epochs(Stage::kStage2D)}};
            rec.extra["weights"] = {{"before", before}, {"after", after}};
            json unchanged = json::object();
            if (!before.empty()) {
              for (const auto& role : frozen) {
                const auto b = before.find(role);
                unchanged[role] = b != before.end() && b->second == after.at(role);
              }
            }
            rec.extra["frozen_unchanged"] = unchanged;
            write_manifest(app, rec, dst);
            if (!st.validation.empty()) {
              const auto& v = st.validation.back();
              out << "stage " << o.stage << ": " << st.step << " steps, validation L_base " << v.l_base << " L_O "
                  << v.l_o << " L_3D " << v.l_3d << "\n";
            }
            return kOk;
          }};
}

// sample ---------------------------------------------------------------------

struct SampleOpts {
  SampleConfig cfg;
  std::string checkpoint;
  std::string adapter = roles::kLocal2D;
  std::string cues;
  std::string text;
  int text_id = kNullText;
  CLI::Option* text_id_opt = nullptr;
  bool dump_config = false;
  std::string out;
};

Command add_sample(CLI::App& app, SampleOpts& o, std::ostream& out) {
  CLI::App* sub = app.add_subcommand("sample", "Guided in-filling from a trained checkpoint");
  sub->add_option("--checkpoint", o.checkpoint, "Checkpoint file");
  sub->add_option("--adapter", o.adapter, "Adapter role used for the cues");
  sub->add_option("--cues", o.cues, "Cue file; omit for text-only or unconditional sampling");
  std::vector<std::string> prompts;
  for (const auto& p : text_vocabulary()) {
    if (!p.empty()) prompts.push_back(p);
  }
  sub->add_option("--text", o.text, "Prompt")->check(CLI::IsMember(prompts));
  o.text_id_opt = sub->add_option("--text-id", o.text_id, "Prompt id (0 is the empty prompt)");
  o.text_id_opt->default_str("");
  sub->add_option("--cfg-motion", o.cfg.cfg_motion, "Guidance scale of the cue condition");
  sub->add_option("--cfg-text", o.cfg.cfg_text, "Guidance scale of the prompt");
  sub->add_option("--steps", o.cfg.steps, "Unmasking steps");
  sub->add_option("--frames", o.cfg.num_frames, "Length when no cues are given");
  sub->add_option("--fps", o.cfg.fps, "Frame rate when no cues are given");
  sub->add_option("--seed", o.cfg.seed, "Root seed");
  sub->add_flag("--dump-config", o.dump_config, "Print the resolved configuration and exit");
  sub->add_option("--out", o.out, "Motion file");
  return {sub, [&app = *sub, &o, &out]() {
            if (o.dump_config) {
              out << resolved_config(app).dump(2) << "\n";
              return kOk;
            }
            if (o.out.empty()) throw ValidationError("sample: --out is required");
            if (o.checkpoint.empty()) throw ValidationError("sample: --checkpoint is required");
            Record rec;
            const Checkpoint ck = load_checkpoint(o.checkpoint);
            rec.input("checkpoint", o.checkpoint);
            int text = kNullText;
            if (!o.text.empty()) text = text_id(o.text);
            if (o.text_id_opt->count() > 0) {
              if (!o.text.empty() && o.text_id != text) throw ValidationError("sample: --text and --text-id disagree");
              if (o.text_id < 0 || o.text_id >= static_cast<int>(text_vocabulary().size())) {
                throw ValidationError("sample: --text-id out of range");
              }
              text = o.text_id;
            }
            std::optional<Condition> cond;
            const AdapterParams* adapter = nullptr;
            double fps = o.cfg.fps;
            if (!o.cues.empty()) {
              adapter = &ck.adapter(o.adapter);
              rec.input("cues", o.cues);
              if (adapter->kind == AdapterKind::kLocal2D) {
                SparseCue2D c = load_cues2d(o.cues);
                fps = c.fps();
                cond = std::move(c);
              } else if (adapter->kind == AdapterKind::kLocal3D) {
                SparseCue3D c = load_cues3d(o.cues);
                fps = c.fps();
                cond = std::move(c);
              } else {
                throw ValidationError("sample: adapter '" + o.adapter + "' does not take cues");
              }
            }
            rec.seeds["seed"] = o.cfg.seed;
            const Matrix poses = cfg_sample(ck.base, adapter, cond ? &*cond : nullptr, text, o.cfg);
            const MotionSequence motion = pose_motion(poses, fps);
            const fs::path dst = output_path(o.out);
            save_motion(motion, dst);
            rec.output("motion", dst);
            rec.extra["guidance"] = {{"formula", "p_uu + s_text (p_tu - p_uu) + s_motion (p_tc - p_tu)"},
                                     {"cfg-motion", o.cfg.cfg_motion},
                                     {"cfg-text", o.cfg.cfg_text}};
            write_manifest(app, rec, dst);
            out << "wrote " << dst.string() << " (" << motion.num_frames() << " frames)\n";
            return kOk;
          }};
}

// eval -----------------------------------------------------------------------

struct EvalOpts {
  std::string motion;
  std::string baseline;
  ContactModel model;
  std::string csv;
  std::string out;
};

Command add_eval(CLI::App& app, EvalOpts& o, std::ostream& out) {
  CLI::App* sub = app.add_subcommand("eval", "Physical plausibility metrics, optionally relative to a baseline");
  sub->add_option("--motion", o.motion, "Motion file")->required();
  sub->add_option("--baseline", o.baseline, "Baseline motion for relative metrics");
  sub->add_option("--contact-height", o.model.contact_height, "Toe height below which a foot is in contact (m)");
  sub->add_option("--skate-speed", o.model.skate_speed, "Horizontal contact speed counted as skating (m/s)");
  sub->add_option("--float-height", o.model.float_height, "Toe height above which a foot is unsupported (m)");
  sub->add_option("--csv", o.csv, "Also write a CSV row");
  sub->add_option("--out", o.out, "Report file")->required();
  return {sub, [&app = *sub, &o, &out]() {
            Record rec;
            const MotionSequence motion = load_motion(o.motion);
            rec.input("motion", o.motion);
            MetricReport report = evaluate_metrics(motion, o.model);
            std::map<std::string, std::string> hashes{{"motion", rec.inputs["motion"]["sha256"]}};
            if (!o.baseline.empty()) {
              const MotionSequence base = load_motion(o.baseline);
              rec.input("baseline", o.baseline);
              hashes["baseline"] = rec.inputs["baseline"]["sha256"];
              report = relative_report(report, evaluate_metrics(base, o.model));
            }
            const fs::path dst = output_path(o.out);
            write_text_file(dst, dump_report(report, hashes));
            rec.output("report", dst);
            if (!o.csv.empty()) {
              const fs::path p = output_path(o.csv);
              write_text_file(p, report_csv({{fs::path(o.motion).filename().string(), report}}));
              rec.output("csv", p);
            }
            write_manifest(app, rec, dst);
            out << "jitter " << report.jitter << " fsr " << report.fsr << " ffl " << report.ffl << " fsd "
                << report.fsd << "\n";
            return kOk;
          }};
}

// edit -----------------------------------------------------------------------

struct EditOpts {
  std::string motion;
  double scale_root_y = 1.0;
  double arm_spread = 0.0;
  CLI::Option* scale_opt = nullptr;
  CLI::Option* arm_opt = nullptr;
  std::string out;
};

Command add_edit(CLI::App& app, EditOpts& o, std::ostream& out) {
  CLI::App* sub = app.add_subcommand("edit", "Scale the vertical root offset, then set the arm spread");
  sub->add_option("--motion", o.motion, "Motion file")->required();
  o.scale_opt = sub->add_option("--scale-root-y", o.scale_root_y, "Factor on the root height above its minimum");
  o.scale_opt->default_str("");
  o.arm_opt = sub->add_option("--arm-spread", o.arm_spread, "Horizontal arm angle from forward (deg)");
  o.arm_opt->default_str("");
  sub->add_option("--out", o.out, "Motion file")->required();
  return {sub, [&app = *sub, &o, &out]() {
            if (o.scale_opt->count() == 0 && o.arm_opt->count() == 0) {
              throw ValidationError("edit: give --scale-root-y and/or --arm-spread");
            }
            Record rec;
            MotionSequence motion = load_motion(o.motion);
            rec.input("motion", o.motion);
            if (o.scale_opt->count() > 0) motion = edit_root_vertical(motion, o.scale_root_y);
            if (o.arm_opt->count() > 0) motion = edit_arm_spread(motion, o.arm_spread);
            const fs::path dst = output_path(o.out);
            save_motion(motion, dst);
            rec.output("motion", dst);
            write_manifest(app, rec, dst);
            out << "wrote " << dst.string() << "\n";
            return kOk;
          }};
}

std::string find_subcommand(const std::vector<std::string>& args, const std::vector<std::string>& names) {
  for (const auto& a : args) {
    if (std::find(names.begin(), names.end(), a) != names.end()) return a;
  }
  return {};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse motion cues: synthesis, projection, adapter training, guided sampling and metrics",
               "sparsecue"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", SPARSECUE_VERSION);
  app.set_config("--config", "", "JSON flag map or run manifest");
  app.allow_config_extras(false);

  SynthOpts synth;
  ProjectOpts proj;
  IngestOpts ingest;
  ValidateOpts validate;
  TrainOpts train;
  SampleOpts sample;
  EvalOpts eval;
  EditOpts edit;
  const std::vector<Command> commands = {
      add_synth(app, synth, out),   add_project(app, proj, out),   add_ingest(app, ingest, out),
      add_validate(app, validate, out), add_train(app, train, out), add_sample(app, sample, out),
      add_eval(app, eval, out),     add_edit(app, edit, out),
  };
  std::vector<std::string> names;
  for (const auto& c : commands) {
    c.app->fallthrough();
    names.push_back(c.app->get_name());
  }
  app.config_formatter(std::make_shared<JsonConfig>(find_subcommand(args, names)));

  try {
    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err) == 0 ? kOk : kValidation;
    }
    for (const auto& c : commands) {
      if (app.got_subcommand(c.app)) return c.handler();
    }
    err << "error: no subcommand\n";
    return kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace sparsecue::cli
