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

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "textvpr/core/error.hpp"
#include "textvpr/eval/detection.hpp"
#include "textvpr/eval/fps.hpp"
#include "textvpr/eval/report.hpp"
#include "textvpr/eval/vpr_eval.hpp"

using namespace textvpr;
using namespace textvpr::eval;

namespace {

TextInstance box(double x0, double y0, double x1, double y1, const std::string& text = "A", double conf = 1.0) {
  return TextInstance{geometry::Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}), text, conf};
}

std::vector<TextInstance> row_of_boxes(std::size_t n) {
  std::vector<TextInstance> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(box(20.0 * i, 0, 20.0 * i + 10, 5, "W" + std::to_string(i)));
  return v;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("harmonic mean from constructed counts reproduces the reported rows") {
  // tp/(tp+fp) = 0.902 and tp/(tp+fn) = 0.831 exactly.
  const auto ours = report_from_counts(749562, 81438, 152438);
  CHECK(ours.precision == doctest::Approx(0.902).epsilon(1e-15));
  CHECK(ours.recall == doctest::Approx(0.831).epsilon(1e-15));
  CHECK(std::abs(ours.hmean - 0.865) <= 0.0005);
  const auto other = report_from_counts(689230, 95770, 188770);
  CHECK(other.precision == doctest::Approx(0.878).epsilon(1e-15));
  CHECK(other.recall == doctest::Approx(0.785).epsilon(1e-15));
  CHECK(std::abs(other.hmean - 0.829) <= 0.0005);
  CHECK(report_from_counts(0, 0, 0).hmean == 0.0);
}

TEST_CASE("harmonic mean lies between precision and recall") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(g), r = u(g);
    const double h = harmonic_mean(p, r);
    CHECK(h >= std::min(p, r) * (1 - 1e-15));
    CHECK(h <= std::max(p, r) * (1 + 1e-15));
  }
  CHECK(harmonic_mean(0, 0) == 0.0);
}

TEST_CASE("perfect detections") {
  const auto t = row_of_boxes(4);
  const auto r = eval_detection(t, t);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.hmean == 1.0);
  CHECK(eval_end2end(t, t) == 1.0);
  const auto empty = eval_detection(std::vector<TextInstance>{}, std::vector<TextInstance>{});
  CHECK(empty.hmean == 0.0);
}

TEST_CASE("end to end with one transcription flipped") {
  const auto truth = row_of_boxes(10);
  auto preds = truth;
  preds[4].text = "WRONG";
  const auto r = eval_end2end_report({preds}, {truth});
  CHECK(r.tp == 9);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.precision == doctest::Approx(0.9));
  CHECK(r.recall == doctest::Approx(0.9));
  CHECK(r.hmean == doctest::Approx(0.9));
  // Case folding and charset normalization before comparison.
  preds[4].text = "w-4";
  CHECK(eval_end2end(preds, truth) == 1.0);
  for (auto& p : preds) p.text = "ZZZ";
  CHECK(eval_end2end(preds, truth) == 0.0);
  CHECK(eval_detection(preds, truth).hmean == 1.0);
}

TEST_CASE("iou threshold is inclusive") {
  // IoU exactly 0.5: [0,10] against [0,5] in x.
  const auto r = eval_detection({box(0, 0, 5, 10)}, {box(0, 0, 10, 10)});
  CHECK(r.tp == 1);
  CHECK(eval_detection({box(0, 0, 4.9, 10)}, {box(0, 0, 10, 10)}).tp == 0);
}

TEST_CASE("greedy and optimal matching") {
  const std::vector<TextInstance> truths{box(0, 0, 10, 1), box(3, 0, 13, 1)};
  const std::vector<TextInstance> preds{box(2, 0, 12, 1, "A", 0.9), box(4, 0, 14, 1, "A", 0.8)};
  const auto greedy = eval_detection(preds, truths);
  CHECK(greedy.tp == 1);
  CHECK(greedy.fp == 1);
  CHECK(greedy.fn == 1);
  DetectionOptions opt;
  opt.optimal = true;
  CHECK(eval_detection(preds, truths, opt).tp == 2);
}

TEST_CASE("detection report ignores input order for distinct confidences") {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0.0, 60.0), w(4.0, 12.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TextInstance> truths, preds;
    for (int i = 0; i < 6; ++i) {
      const double x = u(g), y = u(g);
      truths.push_back(box(x, y, x + w(g), y + 5));
    }
    for (int i = 0; i < 8; ++i) {
      const double x = u(g), y = u(g);
      preds.push_back(box(x, y, x + w(g), y + 5, "A", 0.01 * (i + 1)));
    }
    for (int i = 0; i < 4; ++i) {
      auto p = truths[i].polygon.vertices();
      for (auto& q : p) q.x += 1.5;
      preds.push_back(TextInstance{geometry::Polygon(p), "A", 0.5 + 0.1 * i});
    }
    const auto a = eval_detection(preds, truths);
    std::shuffle(preds.begin(), preds.end(), g);
    const auto b = eval_detection(preds, truths);
    CHECK(a.tp == b.tp);
    CHECK(a.fp == b.fp);
    CHECK(a.fn == b.fn);
    CHECK(eval_end2end(preds, truths) <= a.hmean);
  }
}

TEST_CASE("invalid polygons count against their side") {
  const TextInstance bowtie{geometry::Polygon({{0, 0}, {2, 2}, {2, 0}, {0, 1}}), "A", 1.0};
  const auto r = eval_detection({bowtie, box(10, 10, 20, 15)}, {box(0, 0, 2, 2), box(10, 10, 20, 15)});
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.invalid_predictions == 1);
  const auto s = eval_detection({box(0, 0, 2, 2)}, {bowtie});
  CHECK(s.fn == 1);
  CHECK(s.fp == 1);
  CHECK(s.invalid_truths == 1);
  CHECK_THROWS_AS(eval_detection({box(0, 0, 1, 1)}, {box(0, 0, 1, 1)}, DetectionOptions{0.0, false}), ContractError);
  CHECK_THROWS_AS(eval_detection(std::vector<std::vector<TextInstance>>{{}}, std::vector<std::vector<TextInstance>>{}),
                  DimensionError);
}

TEST_CASE("vpr sweep equals the hand-enumerated sweep") {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<vpr::MatchResult> results;
    std::vector<std::optional<std::size_t>> truth;
    std::vector<double> scores;
    std::vector<bool> correct;
    std::size_t with_truth = 0;
    for (int i = 0; i < 20; ++i) {
      const double s = static_cast<double>(g() % 9) / 8.0;
      const std::size_t idx = 4 + g() % 30;
      std::optional<std::size_t> t;
      if (g() % 5 != 0) t = idx + g() % 9 - 4;
      results.push_back({"q" + std::to_string(i), "m" + std::to_string(idx), idx, s, false});
      truth.push_back(t);
      scores.push_back(s);
      const bool ok = t && (idx > *t ? idx - *t : *t - idx) <= 3;
      correct.push_back(ok);
      with_truth += t ? 1 : 0;
    }
    const auto curve = eval_vpr(results, truth, 3);
    const auto want = oracle::threshold_sweep(scores, correct, with_truth);
    REQUIRE(curve.points.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      CHECK(curve.points[k].threshold == want[k].threshold);
      CHECK(curve.points[k].precision == want[k].precision);
      CHECK(curve.points[k].recall == want[k].recall);
      if (k > 0) CHECK(curve.points[k].recall >= curve.points[k - 1].recall);
    }
    CHECK(curve.n_queries == 20);
    CHECK(curve.n_with_truth == with_truth);
    for (std::size_t k = 0; k < kRecallLevels.size(); ++k) {
      double best = 0.0;
      for (const auto& p : want)
        if (p.recall >= kRecallLevels[k]) best = std::max(best, p.precision);
      CHECK(curve.precision_at_recall[k] == best);
      if (k > 0) CHECK(curve.precision_at_recall[k] <= curve.precision_at_recall[k - 1]);
    }
  }
}

TEST_CASE("perfect matcher reads precision one everywhere") {
  std::vector<vpr::MatchResult> results;
  std::vector<std::optional<std::size_t>> truth;
  for (std::size_t i = 0; i < 10; ++i) {
    results.push_back({"q", "m", i, 0.5 + 0.05 * i, true});
    truth.push_back(i);
  }
  const auto curve = eval_vpr(results, truth);
  for (double p : curve.precision_at_recall) CHECK(p == 1.0);
  CHECK(curve.frame_tolerance == 3);
}

TEST_CASE("vpr contract errors") {
  std::vector<vpr::MatchResult> r{{"q", "m", std::size_t{0}, NAN, false}};
  CHECK_THROWS_AS(eval_vpr(r, {std::size_t{0}}), ContractError);
  r[0].score = 0.5;
  r[0].best_index.reset();
  CHECK_THROWS_AS(eval_vpr(r, {std::size_t{0}}), ContractError);
}

TEST_CASE("report formats") {
  std::vector<vpr::MatchResult> results{{"a", "m1", std::size_t{1}, 0.9, true}, {"b", "m9", std::size_t{9}, 0.4, false}};
  const auto curve = eval_vpr(results, {std::size_t{1}, std::size_t{2}});
  const auto csv = pr_curve_csv(curve);
  CHECK(csv.rfind("threshold,precision,recall\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const auto j = pr_summary_json(curve, {{"seed", 7}});
  CHECK(j.at("interpolation") == "max-precision");
  CHECK(j.at("frame_tolerance") == 3);
  CHECK(j.at("precision_at_recall").size() == 5);
  CHECK(j.at("precision_at_recall").at("0.9") == curve.precision_at_recall[4]);
  CHECK(j.at("config").at("seed") == 7);
  const auto svg = pr_curve_svg(curve, "a<b");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("a&lt;b") != std::string::npos);
  const auto d = detection_json(report_from_counts(9, 1, 1), 0.5);
  CHECK(d.at("iou_threshold") == 0.5);
}

TEST_CASE("fps arithmetic and monotonicity") {
  CHECK(fps_from(22, 2.0) == doctest::Approx(11.0));
  CHECK_THROWS_AS(measure_fps([](const GrayImage&) {}, {}), ContractError);
  CHECK_THROWS_AS(measure_fps([](const GrayImage&) {}, {GrayImage(2, 2)}, FpsOptions{0, 0}), ContractError);

  const std::vector<GrayImage> frames(5, GrayImage(64, 64, 9));
  volatile double sink = 0;
  auto work = [&](const GrayImage& img) {
    double s = 0;
    for (int rep = 0; rep < 200; ++rep)
      for (auto p : img.pixels) s += std::sqrt(static_cast<double>(p) + rep);
    sink = sink + s;
  };
  const auto fast = measure_fps(work, frames);
  const auto slow = measure_fps(
      [&](const GrayImage& img) {
        work(img);
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      },
      frames);
  CHECK(fast.fps > 0.0);
  CHECK(fast.trial_fps.size() == 3);
  CHECK(slow.fps < fast.fps);

  // Sleep-dominated trials are stable enough to compare.
  const auto paced = measure_fps([](const GrayImage&) { std::this_thread::sleep_for(std::chrono::milliseconds(5)); },
                                 frames, FpsOptions{1, 2});
  CHECK(std::abs(paced.trial_fps[0] - paced.trial_fps[1]) <= 0.2 * std::max(paced.trial_fps[0], paced.trial_fps[1]));
}

}  // TEST_SUITE
