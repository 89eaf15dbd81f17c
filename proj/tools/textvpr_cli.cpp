// Copyright 2026 The textvpr Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// textvpr command line: synth, pretrain, train, spot, map, query, eval, bench.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "textvpr/core/error.hpp"
#include "textvpr/eval/detection.hpp"
#include "textvpr/eval/fps.hpp"
#include "textvpr/eval/report.hpp"
#include "textvpr/eval/vpr_eval.hpp"
#include "textvpr/io/annotations.hpp"
#include "textvpr/io/atomic_file.hpp"
#include "textvpr/io/checkpoint.hpp"
#include "textvpr/io/pgm.hpp"
#include "textvpr/io/place_map_io.hpp"
#include "textvpr/spotter/spot.hpp"
#include "textvpr/synth/scene.hpp"
#include "textvpr/training/fit.hpp"
#include "textvpr/training/pretrain.hpp"
#include "textvpr/vpr/vpr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace textvpr;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string config_path;
  json config = json::object();

  const json& section(const std::string& name) const {
    static const json empty = json::object();
    return config.contains(name) ? config.at(name) : empty;
  }
};

// Flag value wins; otherwise the config file's entry; otherwise the default.
template <typename V>
void layer(const CLI::Option* opt, const json& sec, const char* key, V& value) {
  if (opt->count() == 0 && sec.contains(key)) value = sec.at(key).get<V>();
}

json run_header(const Globals& g, const std::string& command, json params) {
  return json{{"tool", "textvpr"}, {"version", kVersion}, {"command", command}, {"seed", g.seed}, {"params", params}};
}

void require_out(const Globals& g, const std::string& what) {
  if (g.out.empty()) throw ContractError("--out is required (" + what + ")");
}

void ensure_parent(const std::string& path) {
  const fs::path p = fs::path(path).parent_path();
  if (p.empty()) return;
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory '" + p.string() + "': " + ec.message());
}

void write_json(const std::string& path, const json& j) {
  ensure_parent(path);
  io::write_file_atomic(path, j.dump(2) + "\n");
}

// Sidecar "<file>.run.json" echoing the configuration of a JSONL output.
void write_sidecar(const std::string& path, const json& header) { write_json(path + ".run.json", header); }

std::vector<Frame> load_frames(const std::string& annotations_path) {
  const auto records = io::read_annotations(annotations_path);
  const fs::path base = fs::path(annotations_path).parent_path();
  std::vector<Frame> frames;
  frames.reserve(records.size());
  for (const auto& r : records) {
    Frame f;
    f.id = r.frame_id;
    if (r.image_path.empty()) throw ValidationError("annotations: frame '" + r.frame_id + "' has no image_path");
    f.image = io::read_pgm((base / r.image_path).string());
    f.instances = r.instances;
    frames.push_back(std::move(f));
  }
  return frames;
}

std::string relative_to(const fs::path& file, const fs::path& dir) {
  const fs::path a = fs::absolute(file).lexically_normal();
  const fs::path b = fs::absolute(dir.empty() ? fs::path(".") : dir).lexically_normal();
  return a.lexically_relative(b).generic_string();
}

spotter::SpotterConfig model_config(const Globals& g) {
  spotter::SpotterConfig c;
  if (g.config.contains("model")) c = g.config.at("model").get<spotter::SpotterConfig>();
  c.validate();
  return c;
}

// ---------------------------------------------------------------- synth

struct SynthCmd {
  synth::TraversalConfig cfg;
  CLI::Option *places, *words, *perturb, *drop, *noise;

  void attach(CLI::App* app) {
    places = app->add_option("--places", cfg.n_places, "number of places (map frames)");
    words = app->add_option("--words-per-place", cfg.words_per_place, "words rendered per place");
    perturb = app->add_option("--perturbation", cfg.query_perturbation, "query viewpoint/photometric perturbation in [0,1]");
    drop = app->add_option("--drop-rate", cfg.drop_rate, "fraction of queries without a map counterpart");
    noise = app->add_option("--noise", cfg.noise_sigma, "Gaussian pixel noise sigma");
  }

  void run(const Globals& g) {
    const json& sec = g.section("synth");
    layer(places, sec, "places", cfg.n_places);
    layer(words, sec, "words_per_place", cfg.words_per_place);
    layer(perturb, sec, "perturbation", cfg.query_perturbation);
    layer(drop, sec, "drop_rate", cfg.drop_rate);
    layer(noise, sec, "noise", cfg.noise_sigma);
    require_out(g, "output directory");
    synth::validate(cfg);
    const auto pair = synth::generate_traversal(cfg, g.seed);

    const json params{{"places", cfg.n_places},
                      {"words_per_place", cfg.words_per_place},
                      {"perturbation", cfg.query_perturbation},
                      {"drop_rate", cfg.drop_rate},
                      {"noise", cfg.noise_sigma},
                      {"canvas", cfg.canvas}};
    const fs::path root(g.out);
    auto emit = [&](const std::vector<Frame>& frames, const std::string& split) {
      std::vector<io::AnnotationRecord> recs;
      for (const auto& f : frames) {
        const std::string rel = split + "/" + f.id + ".pgm";
        ensure_parent((root / rel).string());
        io::write_pgm(f.image, (root / rel).string());
        recs.push_back({f.id, rel, f.instances});
      }
      const std::string path = (root / (split + ".jsonl")).string();
      io::write_annotations(path, recs);
      write_sidecar(path, run_header(g, "synth", params));
    };
    emit(pair.map_frames, "map");
    emit(pair.query_frames, "query");

    json corr = json::array();
    for (std::size_t i = 0; i < pair.query_frames.size(); ++i) {
      const auto& c = pair.correspondence[i];
      corr.push_back({{"query_id", pair.query_frames[i].id}, {"map_index", c ? json(*c) : json(nullptr)}});
    }
    json map_ids = json::array();
    for (const auto& f : pair.map_frames) map_ids.push_back(f.id);
    write_json((root / "correspondence.json").string(), json{{"format", "tvpr-correspondence"},
                                                             {"version", 1},
                                                             {"run", run_header(g, "synth", params)},
                                                             {"map_ids", map_ids},
                                                             {"queries", corr}});
  }
};

// ---------------------------------------------------------------- training

struct PretrainCmd {
  std::vector<std::string> data;
  std::string init;
  std::string trace;
  training::PretrainConfig cfg;
  CLI::Option *steps, *lr, *batch;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "annotation JSONL file(s) whose images form the corpus")->required();
    app->add_option("--init", init, "checkpoint to start from (default: fresh model from --config/--seed)");
    app->add_option("--trace", trace, "write the per-step loss as CSV (step,mse)");
    steps = app->add_option("--steps", cfg.steps, "optimizer steps");
    lr = app->add_option("--lr", cfg.learning_rate, "learning rate");
    batch = app->add_option("--batch", cfg.batch_size, "images per step");
  }

  void run(const Globals& g) {
    const json& sec = g.section("pretrain");
    layer(steps, sec, "steps", cfg.steps);
    layer(lr, sec, "learning_rate", cfg.learning_rate);
    layer(batch, sec, "batch_size", cfg.batch_size);
    cfg.seed = g.seed;
    require_out(g, "checkpoint path");
    cfg.validate();

    std::optional<io::LoadedCheckpoint> start;
    if (!init.empty()) start.emplace(io::load_checkpoint(init));
    spotter::SpotterModel<float> model = start ? start->model : spotter::SpotterModel<float>(model_config(g), g.seed);
    const auto& mc = model.config();
    std::vector<Tensor<float>> images;
    for (const auto& path : data)
      for (const auto& f : load_frames(path)) {
        if (f.image.width != mc.image_size || f.image.height != mc.image_size)
          throw ValidationError("pretrain: frame '" + f.id + "' does not match the model input size");
        images.push_back(spotter::image_tokens<float>(f.image, mc.patch_size));
      }
    if (images.empty()) throw ValidationError("pretrain: corpus is empty");

    const double before = training::masked_mse(model, images, g.seed ^ 0x5eedULL);
    const auto losses = training::pretrain_mae(model, images, cfg);
    const double after = training::masked_mse(model, images, g.seed ^ 0x5eedULL);

    json params = cfg;
    io::CheckpointInfo info;
    if (start) info = start->info;
    info.extra["pretrain"] = run_header(g, "pretrain", params);
    info.extra["pretrain"]["masked_mse_before"] = before;
    info.extra["pretrain"]["masked_mse_after"] = after;
    ensure_parent(g.out);
    io::save_checkpoint(model, g.out, info);
    if (!trace.empty()) {
      std::string csv = "step,mse\n";
      char buf[64];
      for (std::size_t i = 0; i < losses.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i, losses[i]);
        csv += buf;
      }
      ensure_parent(trace);
      io::write_file_atomic(trace, csv);
    }
    std::printf("pretrain: masked mse %.6g -> %.6g over %zu steps\n", before, after, losses.size());
  }
};

struct TrainCmd {
  std::vector<std::string> data;
  std::string init;
  std::string trace;
  training::TrainConfig cfg;
  CLI::Option *steps, *lr, *batch, *clip, *wcls, *wpoly, *wchar;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "annotation JSONL file(s) with ground truth")->required();
    app->add_option("--init", init, "checkpoint to start from, e.g. a pretrained backbone");
    app->add_option("--trace", trace, "write the loss trace CSV (step,total,cls,poly,char)");
    steps = app->add_option("--steps", cfg.steps, "optimizer steps");
    lr = app->add_option("--lr", cfg.learning_rate, "learning rate");
    batch = app->add_option("--batch", cfg.batch_size, "frames per step");
    clip = app->add_option("--grad-clip", cfg.grad_clip, "global gradient-norm clip (0 disables)");
    wcls = app->add_option("--w-cls", cfg.weights.cls, "classification loss weight");
    wpoly = app->add_option("--w-poly", cfg.weights.poly, "polygon loss weight");
    wchar = app->add_option("--w-char", cfg.weights.chr, "character loss weight");
  }

  void run(const Globals& g) {
    const json& sec = g.section("train");
    layer(steps, sec, "steps", cfg.steps);
    layer(lr, sec, "learning_rate", cfg.learning_rate);
    layer(batch, sec, "batch_size", cfg.batch_size);
    layer(clip, sec, "grad_clip", cfg.grad_clip);
    if (sec.contains("loss_weights")) {
      const auto& w = sec.at("loss_weights");
      layer(wcls, w, "cls", cfg.weights.cls);
      layer(wpoly, w, "poly", cfg.weights.poly);
      layer(wchar, w, "char", cfg.weights.chr);
    }
    cfg.seed = g.seed;
    require_out(g, "checkpoint path");
    cfg.validate();

    std::optional<io::LoadedCheckpoint> start;
    if (!init.empty()) start.emplace(io::load_checkpoint(init));
    spotter::SpotterModel<float> model = start ? start->model : spotter::SpotterModel<float>(model_config(g), g.seed);
    std::vector<training::TrainSample<float>> dataset;
    for (const auto& path : data)
      for (const auto& f : load_frames(path)) dataset.push_back(training::make_sample<float>(f, model.config()));
    if (dataset.empty()) throw ValidationError("train: dataset is empty");

    const auto losses = training::fit(model, dataset, cfg);
    io::CheckpointInfo info;
    if (start) info = start->info;
    info.loss_weights = cfg.weights;
    info.extra["train"] = run_header(g, "train", json(cfg));
    info.extra["train"]["final_loss"] = losses.empty() ? 0.0 : losses.back().total;
    ensure_parent(g.out);
    io::save_checkpoint(model, g.out, info);
    if (!trace.empty()) {
      ensure_parent(trace);
      io::write_file_atomic(trace, training::loss_trace_csv(losses));
    }
    if (!losses.empty())
      std::printf("train: loss %.6g -> %.6g over %zu steps\n", losses.front().total, losses.back().total, losses.size());
  }
};

// ---------------------------------------------------------------- inference

struct SpotCmd {
  std::string model_path, data;
  spotter::SpotOptions opts;
  CLI::Option *thr, *resize;

  void attach(CLI::App* app) {
    app->add_option("--model", model_path, "checkpoint")->required();
    app->add_option("--data", data, "annotation JSONL listing the frames (instances are ignored)")->required();
    thr = app->add_option("--threshold", opts.score_threshold, "minimum text probability");
    resize = app->add_flag("--resize", opts.resize, "letterbox frames whose size differs from the model input");
  }

  void run(const Globals& g) {
    const json& sec = g.section("spot");
    layer(thr, sec, "threshold", opts.score_threshold);
    layer(resize, sec, "resize", opts.resize);
    require_out(g, "prediction JSONL path");
    if (!(opts.score_threshold >= 0.0 && opts.score_threshold <= 1.0))
      throw ContractError("--threshold must lie in [0,1]");
    const auto ckpt = io::load_checkpoint(model_path);
    const auto frames = load_frames(data);
    const fs::path in_dir = fs::path(data).parent_path();
    const fs::path out_dir = fs::path(g.out).parent_path();
    const auto records_in = io::read_annotations(data);
    std::vector<io::AnnotationRecord> out;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      io::AnnotationRecord r;
      r.frame_id = frames[i].id;
      r.image_path = relative_to(in_dir / records_in[i].image_path, out_dir);
      r.instances = spotter::spot(frames[i].image, ckpt.model, opts);
      out.push_back(std::move(r));
    }
    ensure_parent(g.out);
    io::write_annotations(g.out, out);
    write_sidecar(g.out, run_header(g, "spot", json{{"threshold", opts.score_threshold},
                                                    {"resize", opts.resize},
                                                    {"model_config", ckpt.model.config()}}));
  }
};

// ---------------------------------------------------------------- vpr

struct MapCmd {
  std::string pred;
  vpr::FilterPolicy policy;
  CLI::Option *conf, *len, *alnum;

  void attach(CLI::App* app) {
    app->add_option("--pred", pred, "spotted map frames (annotation JSONL)")->required();
    conf = app->add_option("--min-confidence", policy.min_confidence, "filter: minimum confidence");
    len = app->add_option("--min-length", policy.min_length, "filter: minimum transcription length");
    alnum = app->add_option("--min-alnum", policy.min_alnum_fraction, "filter: minimum alphanumeric fraction");
  }

  void run(const Globals& g) {
    const json& sec = g.section("map");
    layer(conf, sec, "min_confidence", policy.min_confidence);
    layer(len, sec, "min_length", policy.min_length);
    layer(alnum, sec, "min_alnum_fraction", policy.min_alnum_fraction);
    require_out(g, "place map path");
    std::vector<vpr::PlaceFrame> frames;
    for (const auto& r : io::read_annotations(pred)) frames.push_back({r.frame_id, r.instances});
    const auto map = vpr::build_place_map(frames, policy);
    json doc = json::parse(io::format_place_map(map));
    doc["run"] = run_header(g, "map", json{{"min_confidence", policy.min_confidence},
                                           {"min_length", policy.min_length},
                                           {"min_alnum_fraction", policy.min_alnum_fraction}});
    write_json(g.out, doc);
  }
};

struct QueryCmd {
  std::string map_path, pred;
  double threshold = 0.5;
  double sim_floor = vpr::kDefaultSimFloor;
  CLI::Option *thr, *floor;

  void attach(CLI::App* app) {
    app->add_option("--map", map_path, "place map JSON")->required();
    app->add_option("--pred", pred, "spotted query frames (annotation JSONL)")->required();
    thr = app->add_option("--threshold", threshold, "decision threshold on the frame score");
    floor = app->add_option("--sim-floor", sim_floor, "word similarities below this count as 0");
  }

  void run(const Globals& g) {
    const json& sec = g.section("query");
    layer(thr, sec, "threshold", threshold);
    layer(floor, sec, "sim_floor", sim_floor);
    require_out(g, "match results JSONL path");
    const auto map = io::load_place_map(map_path);
    std::vector<vpr::MatchResult> results;
    for (const auto& r : io::read_annotations(pred))
      results.push_back(vpr::query_place(map, r.frame_id, r.instances, threshold, sim_floor));
    ensure_parent(g.out);
    io::write_match_results(results, g.out);
    write_sidecar(g.out, run_header(g, "query", json{{"threshold", threshold}, {"sim_floor", sim_floor}}));
  }
};

// ---------------------------------------------------------------- eval

struct EvalCmd {
  std::string kind, pred, truth;
  double iou = 0.5;
  bool optimal = false;
  std::size_t tolerance = 3;
  CLI::Option *iou_opt, *opt_opt, *tol_opt;

  void attach(CLI::App* app) {
    app->add_option("kind", kind, "detection | e2e | vpr")->required()->check(CLI::IsMember({"detection", "e2e", "vpr"}));
    app->add_option("--pred", pred, "predictions: annotation JSONL, or match results JSONL for vpr")->required();
    app->add_option("--truth", truth, "ground truth: annotation JSONL, or correspondence JSON for vpr")->required();
    iou_opt = app->add_option("--iou", iou, "IoU threshold for detection and e2e");
    opt_opt = app->add_flag("--optimal", optimal, "use IoU-optimal matching instead of the greedy protocol");
    tol_opt = app->add_option("--tolerance", tolerance, "vpr: frames of slack for a correct match");
  }

  void run(const Globals& g) {
    const json& sec = g.section("eval");
    layer(iou_opt, sec, "iou_threshold", iou);
    layer(opt_opt, sec, "optimal", optimal);
    layer(tol_opt, sec, "frame_tolerance", tolerance);
    require_out(g, kind == "vpr" ? "report directory" : "report JSON path");
    if (kind == "vpr")
      run_vpr(g);
    else
      run_detection(g);
  }

  void run_detection(const Globals& g) {
    const auto p = io::read_annotations(pred);
    const auto t = io::read_annotations(truth);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < p.size(); ++i) index[p[i].frame_id] = i;
    std::vector<std::vector<TextInstance>> pv, tv;
    for (const auto& r : t) {
      const auto it = index.find(r.frame_id);
      pv.push_back(it == index.end() ? std::vector<TextInstance>{} : p[it->second].instances);
      tv.push_back(r.instances);
    }
    eval::DetectionOptions o{iou, optimal};
    const auto rep = kind == "e2e" ? eval::eval_end2end_report(pv, tv, o) : eval::eval_detection(pv, tv, o);
    json j = eval::detection_json(rep, iou);
    j["kind"] = kind;
    j["matching"] = optimal ? "optimal" : "greedy";
    j["run"] = run_header(g, "eval", json{{"kind", kind}, {"iou_threshold", iou}, {"optimal", optimal}});
    write_json(g.out, j);
    std::printf("%s: P=%.4f R=%.4f %s=%.4f\n", kind.c_str(), rep.precision, rep.recall, kind == "e2e" ? "F" : "H",
                rep.hmean);
  }

  void run_vpr(const Globals& g) {
    const auto results = io::read_match_results(pred);
    json doc;
    try {
      doc = json::parse(io::read_file(truth));
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("correspondence: ") + e.what(), 1);
    }
    std::map<std::string, std::optional<std::size_t>> corr;
    try {
      for (const auto& q : doc.at("queries"))
        corr[q.at("query_id").get<std::string>()] =
            q.at("map_index").is_null() ? std::nullopt : std::optional<std::size_t>(q.at("map_index").get<std::size_t>());
    } catch (const json::exception& e) {
      throw ParseError(std::string("correspondence: ") + e.what(), 1);
    }
    std::vector<std::optional<std::size_t>> truth_idx;
    for (const auto& r : results) {
      const auto it = corr.find(r.query_id);
      if (it == corr.end()) throw ValidationError("eval vpr: no ground truth for query '" + r.query_id + "'");
      truth_idx.push_back(it->second);
    }
    const auto curve = eval::eval_vpr(results, truth_idx, tolerance);
    const fs::path dir(g.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    io::write_file_atomic((dir / "pr_curve.csv").string(), eval::pr_curve_csv(curve));
    io::write_file_atomic((dir / "pr_curve.svg").string(), eval::pr_curve_svg(curve));
    write_json((dir / "pr_summary.json").string(),
               eval::pr_summary_json(curve, run_header(g, "eval", json{{"kind", "vpr"}, {"frame_tolerance", tolerance}})));
    std::printf("vpr: precision@recall 0.2/0.4/0.6/0.8/0.9 = %.3f/%.3f/%.3f/%.3f/%.3f\n", curve.precision_at_recall[0],
                curve.precision_at_recall[1], curve.precision_at_recall[2], curve.precision_at_recall[3],
                curve.precision_at_recall[4]);
  }
};

// ---------------------------------------------------------------- bench

struct BenchCmd {
  std::string model_path, data;
  eval::FpsOptions opts;
  double sleep_ms = 0.0;
  CLI::Option *warm, *trials, *sleep;

  void attach(CLI::App* app) {
    app->add_option("--model", model_path, "checkpoint")->required();
    app->add_option("--data", data, "annotation JSONL listing the frames")->required();
    warm = app->add_option("--warmup", opts.warmup, "untimed warmup runs");
    trials = app->add_option("--trials", opts.trials, "timed passes; the median is reported");
    sleep = app->add_option("--sleep-ms", sleep_ms, "artificial per-frame delay in milliseconds");
  }

  void run(const Globals& g) {
    const json& sec = g.section("bench");
    layer(warm, sec, "warmup", opts.warmup);
    layer(trials, sec, "trials", opts.trials);
    layer(sleep, sec, "sleep_ms", sleep_ms);
    require_out(g, "benchmark JSON path");
    if (!(sleep_ms >= 0.0)) throw ContractError("--sleep-ms must be >= 0");
    const auto ckpt = io::load_checkpoint(model_path);
    std::vector<GrayImage> images;
    for (const auto& f : load_frames(data)) images.push_back(f.image);
    spotter::SpotOptions so;
    so.resize = true;
    const auto res = eval::measure_fps(
        [&](const GrayImage& img) {
          (void)spotter::spot(img, ckpt.model, so);
          if (sleep_ms > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(sleep_ms));
        },
        images, opts);
    write_json(g.out, json{{"fps", res.fps},
                           {"trial_fps", res.trial_fps},
                           {"frames", images.size()},
                           {"run", run_header(g, "bench", json{{"warmup", opts.warmup},
                                                               {"trials", opts.trials},
                                                               {"sleep_ms", sleep_ms}})}});
    std::printf("bench: %.2f FPS over %zu frames\n", res.fps, images.size());
  }
};

void error_line(const char* kind, const std::string& msg, int code) {
  std::cerr << json{{"error", kind}, {"message", msg}, {"exit_code", code}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textvpr: text spotting and text-based place recognition toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "seed for every random draw of the run");
  app.add_option("--out", g.out, "output file or directory (subcommand specific)");
  app.add_option("--config", g.config_path, "JSON config; sections per subcommand plus \"model\"; flags override");

  SynthCmd synth_cmd;
  PretrainCmd pretrain_cmd;
  TrainCmd train_cmd;
  SpotCmd spot_cmd;
  MapCmd map_cmd;
  QueryCmd query_cmd;
  EvalCmd eval_cmd;
  BenchCmd bench_cmd;
  synth_cmd.attach(app.add_subcommand("synth", "generate a synthetic map/query traversal with annotations"));
  pretrain_cmd.attach(app.add_subcommand("pretrain", "masked-autoencoder pretraining of the backbone"));
  train_cmd.attach(app.add_subcommand("train", "set-prediction training of the spotter"));
  spot_cmd.attach(app.add_subcommand("spot", "run the spotter over frames, writing annotations"));
  map_cmd.attach(app.add_subcommand("map", "build a place map from spotted map frames"));
  query_cmd.attach(app.add_subcommand("query", "match spotted query frames against a place map"));
  eval_cmd.attach(app.add_subcommand("eval", "evaluate detection, end-to-end spotting or place recognition"));
  bench_cmd.attach(app.add_subcommand("bench", "measure spotter throughput in frames per second"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "\n";
    error_line("usage", e.what(), 1);
    return 1;
  }

  try {
    if (!g.config_path.empty()) {
      try {
        g.config = json::parse(io::read_file(g.config_path));
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what(), 1);
      }
      if (!g.config.is_object()) throw ValidationError("config: top level must be an object");
      if (g.config.contains("seed") && app.get_option("--seed")->count() == 0) g.seed = g.config.at("seed").get<std::uint64_t>();
    }
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "synth") synth_cmd.run(g);
    else if (name == "pretrain") pretrain_cmd.run(g);
    else if (name == "train") train_cmd.run(g);
    else if (name == "spot") spot_cmd.run(g);
    else if (name == "map") map_cmd.run(g);
    else if (name == "query") query_cmd.run(g);
    else if (name == "eval") eval_cmd.run(g);
    else if (name == "bench") bench_cmd.run(g);
  } catch (const ContractError& e) {
    error_line("validation", e.what(), 1);
    return 1;
  } catch (const ParseError& e) {
    error_line("parse", e.what(), 2);
    return 2;
  } catch (const IoError& e) {
    error_line("io", e.what(), 2);
    return 2;
  } catch (const nlohmann::json::exception& e) {
    error_line("validation", e.what(), 1);
    return 1;
  } catch (const DivergenceError& e) {
    error_line("divergence", e.what(), 1);
    return 1;
  } catch (const std::exception& e) {
    error_line("internal", e.what(), 1);
    return 1;
  }
  return 0;
}
