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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <sys/wait.h>
#include <unistd.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "textvpr/eval/detection.hpp"
#include "textvpr/eval/fps.hpp"
#include "textvpr/eval/vpr_eval.hpp"
#include "textvpr/geometry/polygon.hpp"
#include "textvpr/io/annotations.hpp"
#include "textvpr/io/atomic_file.hpp"
#include "textvpr/io/checkpoint.hpp"
#include "textvpr/io/pgm.hpp"
#include "textvpr/io/place_map_io.hpp"
#include "textvpr/spotter/spot.hpp"
#include "textvpr/synth/scene.hpp"
#include "textvpr/training/fit.hpp"
#include "textvpr/training/hungarian.hpp"
#include "textvpr/training/pretrain.hpp"
#include "textvpr/vpr/vpr.hpp"

using namespace textvpr;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::vector<TextInstance> spot_all(const spotter::SpotterModel<float>& m, const Frame& f) {
  return spotter::spot(f.image, m, spotter::SpotOptions{});
}

// ------------------------------------------------------------------ 1

Verdict metric_arithmetic() {
  // Counts chosen so that P and R are exactly the reported percentages.
  const auto a = eval::report_from_counts(749562, 81438, 152438);
  const auto b = eval::report_from_counts(689230, 95770, 188770);
  const bool ok = std::abs(a.precision - 0.902) < 1e-12 && std::abs(a.recall - 0.831) < 1e-12 &&
                  std::abs(a.hmean - 0.865) <= 0.0005 && std::abs(b.precision - 0.878) < 1e-12 &&
                  std::abs(b.recall - 0.785) < 1e-12 && std::abs(b.hmean - 0.829) <= 0.0005;
  return {ok, fmt("H=%.4f (want 0.865), H=%.4f (want 0.829)", a.hmean, b.hmean)};
}

// ------------------------------------------------------------------ 2

Verdict assignment_oracle() {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::size_t agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t cols = 1 + g() % 7, rows = cols + g() % (8 - cols);
    training::CostMatrix m(rows, cols);
    for (auto& v : m.values) v = u(g);
    agree += training::hungarian_match(m).total_cost == oracle::brute_force_assignment(m.values, rows, cols) ? 1 : 0;
  }
  return {agree == 200, fmt("%.0f/200 totals equal to brute force", agree)};
}

// ------------------------------------------------------------------ 3

Verdict geometry_oracle() {
  std::mt19937_64 g(77);
  std::uniform_real_distribution<double> c(-3.0, 3.0), r(2.0, 6.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = oracle::random_convex(g, 3 + g() % 8, c(g), c(g), r(g), r(g));
    const auto b = oracle::random_convex(g, 3 + g() % 8, c(g), c(g), r(g), r(g));
    std::vector<geometry::Point> pa, pb;
    for (const auto& p : a) pa.push_back({p.x, p.y});
    for (const auto& p : b) pb.push_back({p.x, p.y});
    const double iou = geometry::polygon_iou(geometry::Polygon(pa), geometry::Polygon(pb));
    worst = std::max(worst, std::abs(iou - oracle::monte_carlo_iou(a, b, 1000000, 1000 + trial)));
  }
  return {worst < 2e-3, fmt("worst |IoU - MC| = %.2e over 50 pairs (tol 2e-3)", worst)};
}

// ------------------------------------------------------------------ 4

Verdict gradient_integrity() {
  double w32 = 0.0, w64 = 0.0;
  std::string where32, where64;
  std::uint64_t seed = 11;
  for (const auto& p : gradcheck::primitives()) {
    const auto a = gradcheck::check_primitive<float>(p, seed, 1e-3);
    const auto b = gradcheck::check_primitive<double>(p, seed++, 1e-6);
    if (a.worst > w32) w32 = a.worst, where32 = p.name;
    if (b.worst > w64) w64 = b.worst, where64 = p.name;
  }
  const auto l32 = gradcheck::check_spotting_loss<float>(50, 5, 1e-3);
  const auto l64 = gradcheck::check_spotting_loss<double>(50, 5, 1e-6);
  const bool ok = w32 < 1e-2 && w64 < 1e-3 && l32.worst < 1e-2 && l64.worst < 1e-3 && l32.checked == 50 &&
                  l64.checked == 50;
  return {ok, fmt("primitives %.1e/%.1e, spotting loss %.1e/%.1e (32/64-bit)", w32, w64, l32.worst, l64.worst) +
                  " worst primitive " + where32 + "/" + where64};
}

// ------------------------------------------------------------------ 5

Verdict toy_overfit() {
  const spotter::SpotterConfig cfg;
  synth::TraversalConfig tc;
  tc.n_places = 16;
  const auto frames = synth::generate_traversal(tc, 7).map_frames;
  std::vector<training::TrainSample<float>> data;
  std::vector<std::vector<TextInstance>> truths;
  for (const auto& f : frames) {
    data.push_back(training::make_sample<float>(f, cfg));
    truths.push_back(f.instances);
  }
  spotter::SpotterModel<float> model(cfg, 7);
  training::TrainConfig train;
  train.steps = 5000;
  train.seed = 7;
  double h = 0.0, f1 = 0.0;
  std::size_t reached = 0;
  training::fit(model, data, train, [&](const training::LossRecord& rec) {
    if ((rec.step + 1) % 250 != 0) return true;
    std::vector<std::vector<TextInstance>> preds;
    for (const auto& f : frames) preds.push_back(spot_all(model, f));
    h = eval::eval_detection(preds, truths).hmean;
    f1 = eval::eval_end2end(preds, truths);
    reached = rec.step + 1;
    return !(h >= 0.95 && f1 >= 0.90);
  });
  return {h >= 0.95 && f1 >= 0.90, fmt("H=%.3f F=%.3f after %.0f steps (need 0.95/0.90 within 5000)", h, f1, reached)};
}

// ------------------------------------------------------------------ 6

Verdict mae_stage() {
  const spotter::SpotterConfig cfg;
  const std::size_t P = cfg.n_patches();
  const auto want = static_cast<std::size_t>(std::llround(0.75 * static_cast<double>(P)));
  bool counts = true;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto m = spotter::mask_patches(P, cfg.mask_ratio, s);
    counts = counts && m.masked.size() == want && m.visible.size() + m.masked.size() == P;
  }
  synth::TraversalConfig tc;
  tc.n_places = 16;
  const auto t = synth::generate_traversal(tc, 3);
  std::vector<Tensor<float>> images;
  for (const auto* set : {&t.map_frames, &t.query_frames})
    for (const auto& f : *set) images.push_back(spotter::image_tokens<float>(f.image, cfg.patch_size));
  spotter::SpotterModel<float> model(cfg, 3);
  const double before = training::masked_mse(model, images, 500);
  training::PretrainConfig pc;
  pc.steps = 1000;
  training::pretrain_mae(model, images, pc);
  const double after = training::masked_mse(model, images, 500);
  const double drop = 1.0 - after / before;
  return {counts && drop >= 0.5,
          fmt("%.0f of %.0f patches masked; masked MSE %.4f -> %.4f", static_cast<double>(want), static_cast<double>(P),
              before, after) +
              fmt(" (-%.1f%%)", 100.0 * drop)};
}

// ------------------------------------------------------------------ 7

bool passes(const TextInstance& t, const vpr::FilterPolicy& p) {
  if (t.confidence < p.min_confidence || t.text.size() < p.min_length) return false;
  std::size_t alnum = 0;
  for (char c : t.text) alnum += std::isalnum(static_cast<unsigned char>(c)) ? 1 : 0;
  return static_cast<double>(alnum) >= p.min_alnum_fraction * static_cast<double>(t.text.size());
}

std::vector<std::string> texts(const std::vector<TextInstance>& v, const vpr::FilterPolicy& p) {
  std::vector<std::string> out;
  for (const auto& t : v)
    if (passes(t, p)) out.push_back(t.text);
  return out;
}

struct Sweep {
  bool equal = true;
  std::size_t correct_best = 0, n = 0;
};

// Runs the library matcher and a brute-force one side by side.
Sweep compare_with_oracle(const synth::TraversalPair& t, const std::vector<std::vector<TextInstance>>& queries) {
  const vpr::FilterPolicy policy;
  const auto map = vpr::build_place_map(t.map_frames, policy);
  std::vector<std::vector<std::string>> map_texts;
  for (const auto& f : t.map_frames) map_texts.push_back(texts(f.instances, policy));

  Sweep out;
  std::vector<vpr::MatchResult> results;
  std::vector<double> scores;
  std::vector<bool> correct;
  std::size_t with_truth = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto r = vpr::query_place(map, t.query_frames[q].id, queries[q], 0.5);
    const auto qt = texts(queries[q], policy);
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t m = 0; m < map_texts.size(); ++m) {
      const double s = oracle::frame_score(qt, map_texts[m], vpr::kDefaultSimFloor);
      if (s > best) best = s, arg = m;
    }
    out.equal = out.equal && r.score == best && r.best_index == arg;
    const auto& truth = t.correspondence[q];
    out.correct_best += truth && *truth == arg ? 1 : 0;
    with_truth += truth ? 1 : 0;
    scores.push_back(best);
    correct.push_back(truth && (arg > *truth ? arg - *truth : *truth - arg) <= 3);
    results.push_back(r);
  }
  out.n = with_truth;
  const auto curve = eval::eval_vpr(results, t.correspondence, 3);
  const auto want = oracle::threshold_sweep(scores, correct, with_truth);
  out.equal = out.equal && curve.points.size() == want.size();
  for (std::size_t k = 0; out.equal && k < want.size(); ++k)
    out.equal = std::bit_cast<std::uint64_t>(curve.points[k].threshold) == std::bit_cast<std::uint64_t>(want[k].threshold) &&
                std::bit_cast<std::uint64_t>(curve.points[k].precision) == std::bit_cast<std::uint64_t>(want[k].precision) &&
                std::bit_cast<std::uint64_t>(curve.points[k].recall) == std::bit_cast<std::uint64_t>(want[k].recall);
  return out;
}

Verdict vpr_oracle() {
  synth::TraversalConfig tc;
  tc.n_places = 100;
  const auto clean = synth::generate_traversal(tc, 100);
  std::vector<std::vector<TextInstance>> perfect;
  for (const auto& f : clean.query_frames) perfect.push_back(f.instances);
  const auto a = compare_with_oracle(clean, perfect);

  tc.drop_rate = 0.2;
  const auto noisy = synth::generate_traversal(tc, 101);
  std::mt19937_64 g(9);
  std::vector<std::vector<TextInstance>> corrupted;
  std::size_t hit = 0, words = 0;
  for (const auto& f : noisy.query_frames) {
    auto inst = f.instances;
    for (auto& w : inst) {
      ++words;
      if (g() % 5 != 0 || w.text.empty()) continue;
      ++hit;
      const std::size_t pos = g() % w.text.size();
      switch (g() % 3) {
        case 0: w.text[pos] = kCharset[g() % kCharset.size()]; break;
        case 1: w.text.erase(pos, 1); break;
        default: w.text.insert(pos, 1, kCharset[g() % kCharset.size()]);
      }
    }
    corrupted.push_back(inst);
  }
  const auto b = compare_with_oracle(noisy, corrupted);
  const bool ok = a.equal && a.correct_best == 100 && a.n == 100 && b.equal;
  return {ok, fmt("clean: %.0f/100 correct, sweep equal=%.0f; corrupted %.0f of %.0f words: curve equal=%.0f",
                  a.correct_best, a.equal, hit, words) +
                  (b.equal ? "" : " (mismatch)")};
}

// ------------------------------------------------------------------ 8

TextInstance random_instance(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-1e4, 1e4), c(0.0, 1.0);
  std::vector<geometry::Point> pts(3 + g() % 14);
  for (auto& p : pts) p = {u(g), u(g)};
  std::string text;
  for (std::size_t i = 0, n = g() % 12; i < n; ++i) text.push_back(static_cast<char>(' ' + g() % 95));
  return TextInstance{geometry::Polygon(pts), text, c(g)};
}

bool same_bits(const spotter::SpotterModel<float>& a, const spotter::SpotterModel<float>& b) {
  if (!(a.config() == b.config())) return false;
  for (const auto& [name, t] : a.parameters().entries()) {
    if (!b.parameters().contains(name)) return false;
    const auto& o = b.parameters().at(name);
    if (o.shape() != t.shape() || std::memcmp(o.data().data(), t.data().data(), t.size() * 4) != 0) return false;
  }
  return a.parameters().size() == b.parameters().size();
}

Verdict round_trips() {
  std::mt19937_64 g(8);
  const fs::path dir = fs::temp_directory_path() / ("textvpr_accept_rt_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::size_t ann = 0, pgm = 0, ckpt = 0, maps = 0;
  const int N = 1000;

  for (int i = 0; i < N; ++i) {
    std::vector<io::AnnotationRecord> recs(1 + g() % 3);
    for (std::size_t k = 0; k < recs.size(); ++k) {
      recs[k].frame_id = "f" + std::to_string(i) + "_" + std::to_string(k);
      recs[k].image_path = "img/\"" + std::to_string(g()) + "\".pgm";
      for (std::size_t n = g() % 4; n > 0; --n) recs[k].instances.push_back(random_instance(g));
    }
    ann += io::parse_annotations(io::format_annotations(recs)) == recs ? 1 : 0;

    GrayImage img(1 + g() % 40, 1 + g() % 40);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(g());
    pgm += io::parse_pgm(io::format_pgm(img)) == img ? 1 : 0;

    vpr::PlaceMap map;
    map.policy = vpr::FilterPolicy{static_cast<double>(g() % 101) / 100.0, g() % 6, static_cast<double>(g() % 11) / 10.0};
    for (std::size_t n = g() % 5; n > 0; --n) {
      vpr::PlaceFrame f{"m" + std::to_string(map.frames.size()), {}};
      for (std::size_t k = g() % 3; k > 0; --k) f.instances.push_back(random_instance(g));
      map.frames.push_back(f);
    }
    maps += io::parse_place_map(io::format_place_map(map)) == map ? 1 : 0;

    spotter::SpotterConfig small;
    small.image_size = 32;
    small.patch_size = 8;
    small.pyramid_strides = {8, 16};
    small.n_heads = 1 + g() % 2;
    small.embed_dim = small.n_heads * (4 + g() % 3);
    small.ffn_dim = 8;
    small.n_queries = 1 + g() % 3;
    small.max_word_len = 1 + g() % 4;
    small.n_polygon_points = 4;
    small.n_sample_points = 1 + g() % 2;
    small.n_encoder_layers = small.n_decoder_layers = 1;
    spotter::SpotterModel<float> m(small, g());
    for (auto& [name, t] : m.parameters().entries())
      for (auto& v : t.mutable_data()) v = std::bit_cast<float>(static_cast<std::uint32_t>(g()));
    io::CheckpointInfo info;
    info.extra = {{"step", i}};
    ckpt += same_bits(m, io::deserialize_checkpoint(io::serialize_checkpoint(m, info)).model) ? 1 : 0;
  }

  // The same, through files, at full size.
  bool files = true;
  {
    spotter::SpotterModel<float> m(spotter::SpotterConfig{}, 5);
    io::save_checkpoint(m, (dir / "m.ckpt").string());
    files = files && same_bits(m, io::load_checkpoint((dir / "m.ckpt").string()).model);
    synth::TraversalConfig tc;
    tc.n_places = 4;
    const auto t = synth::generate_traversal(tc, 5);
    io::write_pgm(t.map_frames[0].image, (dir / "f.pgm").string());
    files = files && io::read_pgm((dir / "f.pgm").string()) == t.map_frames[0].image;
    std::vector<io::AnnotationRecord> recs;
    for (const auto& f : t.map_frames) recs.push_back({f.id, f.id + ".pgm", f.instances});
    io::write_annotations((dir / "a.jsonl").string(), recs);
    files = files && io::read_annotations((dir / "a.jsonl").string()) == recs;
    const auto map = vpr::build_place_map(t.map_frames, vpr::FilterPolicy{});
    io::save_place_map(map, (dir / "map.json").string());
    files = files && io::load_place_map((dir / "map.json").string()) == map;
  }
  fs::remove_all(dir);
  const bool ok = ann == N && pgm == N && ckpt == N && maps == N && files;
  return {ok, fmt("annotations %.0f, pgm %.0f, checkpoints %.0f, place maps %.0f", ann, pgm, ckpt, maps) + " of 1000" +
                  (files ? "; file round trips ok" : "; file round trips FAILED")};
}

// ------------------------------------------------------------------ 9, 10

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("'") + TEXTVPR_CLI_PATH + "' " + args + " >>'" + log.string() + "' 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

struct Pipeline {
  bool ok = true;
  std::string failed;
};

Pipeline run_pipeline(const fs::path& d) {
  fs::create_directories(d);
  const auto p = [&](const std::string& rel) { return "'" + (d / rel).string() + "'"; };
  const std::vector<std::string> steps{
      "synth --places 16 --seed 7 --out " + p("data"),
      "pretrain --data " + p("data/map.jsonl") + " --steps 40 --seed 7 --out " + p("pre.ckpt"),
      "train --data " + p("data/map.jsonl") + " --init " + p("pre.ckpt") + " --steps 200 --seed 7 --out " +
          p("model.ckpt") + " --trace " + p("loss.csv"),
      "spot --model " + p("model.ckpt") + " --data " + p("data/map.jsonl") + " --out " + p("pred/map.jsonl"),
      "spot --model " + p("model.ckpt") + " --data " + p("data/query.jsonl") + " --out " + p("pred/query.jsonl"),
      "map --pred " + p("pred/map.jsonl") + " --out " + p("map.json"),
      "query --map " + p("map.json") + " --pred " + p("pred/query.jsonl") + " --out " + p("results.jsonl"),
      "eval detection --pred " + p("pred/map.jsonl") + " --truth " + p("data/map.jsonl") + " --out " + p("det.json"),
      "eval e2e --pred " + p("pred/map.jsonl") + " --truth " + p("data/map.jsonl") + " --out " + p("e2e.json"),
      "eval vpr --pred " + p("results.jsonl") + " --truth " + p("data/correspondence.json") + " --out " + p("report"),
      "bench --model " + p("model.ckpt") + " --data " + p("data/query.jsonl") + " --trials 3 --out " + p("bench.json"),
      "bench --model " + p("model.ckpt") + " --data " + p("data/query.jsonl") +
          " --trials 3 --sleep-ms 10 --out " + p("bench_sleep.json")};
  Pipeline out;
  for (const auto& s : steps)
    if (run_cli(s, d.parent_path() / (d.filename().string() + ".log")) != 0) {
      out.ok = false;
      out.failed = s.substr(0, s.find(' '));
      break;
    }
  return out;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_file(e.path().string());
  return files;
}

struct PipelineRuns {
  fs::path root;
  Pipeline a, b;
};

PipelineRuns& pipeline_runs() {
  static PipelineRuns runs = [] {
    PipelineRuns r;
    r.root = fs::temp_directory_path() / ("textvpr_accept_cli_" + std::to_string(::getpid()));
    fs::remove_all(r.root);
    r.a = run_pipeline(r.root / "a");
    r.b = run_pipeline(r.root / "b");
    return r;
  }();
  return runs;
}

Verdict determinism() {
  auto& r = pipeline_runs();
  if (!r.a.ok || !r.b.ok) return {false, "pipeline failed at " + (r.a.ok ? r.b.failed : r.a.failed)};
  auto ta = tree(r.root / "a"), tb = tree(r.root / "b");
  // Timings are the only non-deterministic output.
  for (auto* t : {&ta, &tb})
    for (const char* k : {"bench.json", "bench_sleep.json"}) t->erase(k);
  std::size_t differ = 0;
  for (const auto& [k, v] : ta) differ += tb.count(k) && tb.at(k) == v ? 0 : 1;
  const bool ok = differ == 0 && ta.size() == tb.size() && ta.count("model.ckpt") && ta.count("report/pr_curve.csv") &&
                  ta.count("data/map/map_0000.pgm");
  return {ok, fmt("%.0f artifacts compared, %.0f differ (bench timings excluded)", ta.size(), differ)};
}

Verdict integration() {
  auto& r = pipeline_runs();
  if (!r.a.ok) return {false, "pipeline failed at " + r.a.failed};
  const auto summary = json::parse(io::read_file((r.root / "a/report/pr_summary.json").string()));
  const double cli_fast = json::parse(io::read_file((r.root / "a/bench.json").string())).at("fps").get<double>();
  const double cli_slow = json::parse(io::read_file((r.root / "a/bench_sleep.json").string())).at("fps").get<double>();

  // Library-level measurement on the toy spotter.
  const spotter::SpotterModel<float> model(spotter::SpotterConfig{}, 1);
  synth::TraversalConfig tc;
  tc.n_places = 4;
  std::vector<GrayImage> frames;
  for (const auto& f : synth::generate_traversal(tc, 1).map_frames) frames.push_back(f.image);
  const auto run = [&](const GrayImage& img) { spotter::spot(img, model, spotter::SpotOptions{}); };
  const auto fast = eval::measure_fps(run, frames);
  const auto slow = eval::measure_fps(
      [&](const GrayImage& img) {
        run(img);
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      },
      frames);
  const bool ok = summary.at("precision_at_recall").size() == 5 && fast.fps > 0.0 && slow.fps < fast.fps &&
                  cli_fast > 0.0 && cli_slow < cli_fast;
  fs::remove_all(r.root);
  return {ok, fmt("PR report written; fps %.1f -> %.1f with 10 ms sleep (cli %.1f -> %.1f)", fast.fps, slow.fps,
                  cli_fast, cli_slow)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"metric arithmetic", metric_arithmetic},
      {"assignment oracle", assignment_oracle},
      {"geometry oracle", geometry_oracle},
      {"gradient integrity", gradient_integrity},
      {"toy overfit", toy_overfit},
      {"mae stage", mae_stage},
      {"vpr oracle equivalence", vpr_oracle},
      {"round-trip fidelity", round_trips},
      {"determinism", determinism},
      {"integration", integration}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += v.pass ? 0 : 1;
    std::printf("%s %2zu %-24s %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
