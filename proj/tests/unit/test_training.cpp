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

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include <json.hpp>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "textvpr/core/error.hpp"
#include "textvpr/spotter/spot.hpp"
#include "textvpr/synth/scene.hpp"
#include "textvpr/training/fit.hpp"
#include "textvpr/training/hungarian.hpp"
#include "textvpr/training/loss.hpp"
#include "textvpr/training/pretrain.hpp"

using namespace textvpr;
using namespace textvpr::training;

namespace {

CostMatrix matrix(std::size_t r, std::size_t c, std::vector<double> v) {
  CostMatrix m(r, c);
  m.values = std::move(v);
  return m;
}

std::vector<Frame> frames(std::size_t n, std::uint64_t seed) {
  synth::TraversalConfig tc;
  tc.n_places = n;
  return synth::generate_traversal(tc, seed).map_frames;
}

spotter::QueryPrediction perfect(const TrainTarget& t, const spotter::SpotterConfig& cfg, double text_logit) {
  spotter::QueryPrediction p;
  p.text_logit = text_logit;
  p.polygon = t.polygon;
  p.char_logits.assign(cfg.max_word_len * cfg.n_char_classes(), 0.0);
  for (std::size_t i = 0; i < cfg.max_word_len; ++i) p.char_logits[i * cfg.n_char_classes() + t.chars[i]] = 40.0;
  return p;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("hungarian examples") {
  const auto id = hungarian_match(matrix(3, 3, {0, 5, 5, 5, 0, 5, 5, 5, 0}));
  CHECK(id.total_cost == 0.0);
  REQUIRE(id.pairs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(id.pairs[i] == std::pair<std::size_t, std::size_t>{i, i});
  CHECK(id.unmatched_queries.empty());

  const auto one = hungarian_match(matrix(1, 1, {3.5}));
  REQUIRE(one.pairs.size() == 1);
  CHECK(one.pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(one.total_cost == 3.5);

  const auto none = hungarian_match(matrix(4, 0, {}));
  CHECK(none.pairs.empty());
  CHECK(none.unmatched_queries == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("hungarian tie-break is lexicographic") {
  const auto zeros = hungarian_match(matrix(3, 2, {0, 0, 0, 0, 0, 0}));
  REQUIRE(zeros.pairs.size() == 2);
  CHECK(zeros.pairs[0].first == 0);
  CHECK(zeros.pairs[1].first == 1);
  CHECK(zeros.unmatched_queries == std::vector<std::size_t>{2});
  const auto m = hungarian_match(matrix(3, 2, {1, 0, 0, 1, 0, 0}));
  CHECK(m.pairs[0].first == 1);
  CHECK(m.pairs[1].first == 0);
}

TEST_CASE("hungarian errors") {
  CHECK_THROWS_AS(hungarian_match(matrix(1, 2, {0, 0})), ContractError);
  CHECK_THROWS_AS(hungarian_match(matrix(2, 1, {0, std::numeric_limits<double>::quiet_NaN()})), ContractError);
  CHECK_THROWS_AS(hungarian_match(matrix(2, 1, {0, std::numeric_limits<double>::infinity()})), ContractError);
  CHECK_THROWS_AS(hungarian_match(matrix(2, 2, {0, 0, 0})), ContractError);
}

TEST_CASE("hungarian equals the brute-force minimum") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-5.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t cols = 1 + g() % 7;
    const std::size_t rows = cols + g() % (8 - cols);
    CostMatrix m(rows, cols);
    for (auto& v : m.values) v = u(g);
    const auto a = hungarian_match(m);
    CHECK(a.total_cost == oracle::brute_force_assignment(m.values, rows, cols));
    // Injective and complete.
    std::vector<bool> used(rows, false);
    REQUIRE(a.pairs.size() == cols);
    for (std::size_t j = 0; j < cols; ++j) {
      CHECK(a.pairs[j].second == j);
      CHECK_FALSE(used[a.pairs[j].first]);
      used[a.pairs[j].first] = true;
    }
    CHECK(a.unmatched_queries.size() == rows - cols);
    // No random injection does better.
    std::vector<std::size_t> perm(rows);
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = 0; k < 1000; ++k) {
      std::shuffle(perm.begin(), perm.end(), g);
      double c = 0.0;
      for (std::size_t j = 0; j < cols; ++j) c += m.at(perm[j], j);
      CHECK(a.total_cost <= c + 1e-12);
    }
  }
}

TEST_CASE("hungarian ties match the lexicographic brute force") {
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t cols = 1 + g() % 5;
    const std::size_t rows = cols + g() % (7 - cols);
    CostMatrix m(rows, cols);
    for (auto& v : m.values) v = static_cast<double>(g() % 3);
    const auto a = hungarian_match(m);
    const auto want = oracle::brute_force_lex(m.values, rows, cols);
    std::vector<std::size_t> got;
    for (const auto& p : a.pairs) got.push_back(p.first);
    CHECK(got == want);
  }
}

TEST_CASE("make_target encodes and pads") {
  spotter::SpotterConfig cfg;
  TextInstance t{geometry::Polygon({{0, 0}, {64, 0}, {64, 32}, {0, 32}}), "ab-1", 1.0};
  const auto tg = make_target(t, 128, 128, cfg);
  CHECK(tg.polygon.size() == 32);
  CHECK(tg.polygon[0] == 0.0);
  CHECK(tg.polygon[1] == 0.0);
  for (double v : tg.polygon) {
    CHECK(v >= 0.0);
    CHECK(v <= 0.5);
  }
  CHECK(tg.length == 3);
  CHECK(tg.chars[0] == 0);
  CHECK(tg.chars[1] == 1);
  CHECK(tg.chars[2] == 27);
  for (std::size_t i = 3; i < 25; ++i) CHECK(tg.chars[i] == 36);
  TextInstance longer = t;
  longer.text = std::string(30, 'Z');
  CHECK(make_target(longer, 128, 128, cfg).length == 25);
}

TEST_CASE("match_cost examples") {
  spotter::SpotterConfig cfg;
  const LossWeights w;
  TextInstance inst{geometry::Polygon({{10, 10}, {60, 10}, {60, 30}, {10, 30}}), "CAFE", 1.0};
  const auto t = make_target(inst, 128, 128, cfg);
  const auto good = perfect(t, cfg, 40.0);
  const double c0 = match_cost(good, t, w, cfg);
  CHECK(c0 >= 0.0);
  CHECK(c0 < 1e-12);
  auto off = good;
  off.polygon[3] += 0.01;
  CHECK(match_cost(off, t, w, cfg) > c0);
  auto typo = good;
  typo.char_logits[0] = 50.0;
  CHECK(match_cost(typo, t, w, cfg) > c0);

  auto p1 = good, p0 = good;
  p1.text_logit = 1000.0;
  p0.text_logit = -1000.0;
  CHECK(match_cost(p0, t, w, cfg) - match_cost(p1, t, w, cfg) == doctest::Approx(w.cls).epsilon(1e-12));
}

TEST_CASE("polygon term flips the assignment") {
  spotter::SpotterConfig cfg;
  const LossWeights w;
  const TextInstance a{geometry::Polygon({{10, 10}, {60, 10}, {60, 30}, {10, 30}}), "ABC", 1.0};
  const TextInstance b{geometry::Polygon({{10, 70}, {60, 70}, {60, 90}, {10, 90}}), "XYZ", 1.0};
  const std::vector<TrainTarget> truths{make_target(a, 128, 128, cfg), make_target(b, 128, 128, cfg)};
  // Same text belief for both queries, mildly favouring the order (ABC, XYZ);
  // the polygons point the other way.
  auto q0 = perfect(truths[0], cfg, 3.0);
  auto q1 = perfect(truths[0], cfg, 3.0);
  for (auto& v : q0.char_logits) v *= 0.05;
  for (auto& v : q1.char_logits) v *= 0.05;
  q0.polygon = truths[1].polygon;
  q1.polygon = truths[0].polygon;
  const auto m = cost_matrix({q0, q1}, truths, w, cfg);
  const auto got = hungarian_match(m);
  CHECK(got.pairs[0].first == 1);
  CHECK(got.pairs[1].first == 0);
  CHECK(got.total_cost == oracle::brute_force_assignment(m.values, 2, 2));
  // Without the polygon term the order follows the characters.
  LossWeights no_poly = w;
  no_poly.poly = 0.0;
  const auto flat = hungarian_match(cost_matrix({q0, q1}, truths, no_poly, cfg));
  CHECK(flat.pairs[0].first == 0);
}

TEST_CASE("zero truths leave only no-text classification") {
  spotter::SpotterConfig cfg;
  spotter::SpotterModel<double> m(cfg, 3);
  const auto f = frames(1, 3).front();
  const auto tokens = spotter::image_tokens<double>(f.image, cfg.patch_size);
  const auto heads = m.forward(tokens);
  MatchAssignment none;
  for (std::size_t q = 0; q < cfg.n_queries; ++q) none.unmatched_queries.push_back(q);
  const auto terms = spotting_loss(heads, {}, none, LossWeights{}, cfg);
  double want = 0.0;
  for (std::size_t q = 0; q < cfg.n_queries; ++q) {
    const double a = heads.class_logits.at(2 * q), b = heads.class_logits.at(2 * q + 1);
    const double mx = std::max(a, b);
    want += mx + std::log(std::exp(a - mx) + std::exp(b - mx)) - b;
  }
  want /= static_cast<double>(cfg.n_queries);
  CHECK(terms.total.item() == doctest::Approx(want).epsilon(1e-12));
  CHECK(terms.poly == 0.0);
  CHECK(terms.chr == 0.0);
}

TEST_CASE("loss is invariant to truth order") {
  spotter::SpotterConfig cfg;
  spotter::SpotterModel<float> m(cfg, 4);
  synth::TraversalConfig tc;
  tc.n_places = 3;
  tc.words_per_place = 4;
  for (const auto& f : synth::generate_traversal(tc, 4).map_frames) {
    const auto sample = make_sample<float>(f, cfg);
    const auto heads = m.forward(sample.tokens);
    const auto base = matched_loss(heads, sample.targets, LossWeights{}, cfg);
    CHECK(base.total.item() > 0.0f);
    auto perm = sample.targets;
    std::reverse(perm.begin(), perm.end());
    std::rotate(perm.begin(), perm.begin() + 1, perm.end());
    const auto other = matched_loss(heads, perm, LossWeights{}, cfg);
    CHECK(other.total.item() == base.total.item());
    CHECK(other.cls == base.cls);
    CHECK(other.poly == base.poly);
    CHECK(other.chr == base.chr);
  }
}

TEST_CASE("loss gradient passes a finite-difference check") {
  const auto r32 = gradcheck::check_spotting_loss<float>(12, 5, 1e-3);
  CAPTURE(r32.worst_where);
  CHECK(r32.worst < 1e-2);
  const auto r64 = gradcheck::check_spotting_loss<double>(12, 6, 1e-6);
  CAPTURE(r64.worst_where);
  CHECK(r64.worst < 1e-3);
}

TEST_CASE("train config validation and json") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.weights.poly = -1;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = TrainConfig{};
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = TrainConfig{};
  c.learning_rate = 0.0;
  CHECK_NOTHROW(c.validate());
  c.steps = 17;
  c.weights.chr = 0.5;
  const nlohmann::json j = c;
  CHECK(j.at("loss_weights").at("char") == 0.5);
  const auto back = j.get<TrainConfig>();
  CHECK(back.steps == 17);
  CHECK(back.weights == c.weights);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  spotter::SpotterConfig cfg;
  spotter::SpotterModel<float> m(cfg, 7);
  const auto before = spotter::cast_model<float>(m);
  std::vector<TrainSample<float>> data;
  for (const auto& f : frames(2, 7)) data.push_back(make_sample<float>(f, cfg));
  TrainConfig tc;
  tc.learning_rate = 0.0;
  tc.steps = 3;
  tc.batch_size = 2;
  fit(m, data, tc);
  for (const auto& [name, t] : m.parameters().entries()) {
    const auto& o = before.parameters().at(name);
    CHECK(std::memcmp(t.data().data(), o.data().data(), t.size() * sizeof(float)) == 0);
  }
}

TEST_CASE("one step changes parameters and training is deterministic") {
  spotter::SpotterConfig cfg;
  std::vector<TrainSample<float>> data;
  for (const auto& f : frames(3, 8)) data.push_back(make_sample<float>(f, cfg));
  TrainConfig tc;
  tc.steps = 4;
  tc.batch_size = 2;
  spotter::SpotterModel<float> a(cfg, 8), b(cfg, 8);
  const auto before = spotter::cast_model<float>(a);
  const auto ta = fit(a, data, tc);
  const auto tb = fit(b, data, tc);
  REQUIRE(ta.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(ta[i].step == i);
    CHECK(ta[i].total == tb[i].total);
    CHECK(ta[i].total == doctest::Approx(ta[i].cls + ta[i].poly + ta[i].chr).epsilon(1e-5));
  }
  bool changed = false;
  for (const auto& [name, t] : a.parameters().entries()) {
    const auto& o = before.parameters().at(name);
    changed = changed || std::memcmp(t.data().data(), o.data().data(), t.size() * sizeof(float)) != 0;
    CHECK(std::memcmp(t.data().data(), b.parameters().at(name).data().data(), t.size() * sizeof(float)) == 0);
  }
  CHECK(changed);
  // The MAE branch is not part of the spotting loss.
  CHECK(std::memcmp(a.parameters().at("mae.head.weight").data().data(),
                    before.parameters().at("mae.head.weight").data().data(),
                    a.parameters().at("mae.head.weight").size() * sizeof(float)) == 0);

  std::size_t calls = 0;
  spotter::SpotterModel<float> c(cfg, 8);
  const auto early = fit(c, data, tc, [&](const LossRecord&) { return ++calls < 2; });
  CHECK(early.size() == 2);

  const auto csv = loss_trace_csv(ta);
  CHECK(csv.rfind("step,total,cls,poly,char\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("divergence is reported with the step") {
  spotter::SpotterConfig cfg;
  spotter::SpotterModel<float> m(cfg, 9);
  std::vector<TrainSample<float>> data;
  for (const auto& f : frames(1, 9)) data.push_back(make_sample<float>(f, cfg));
  m.parameters().at("heads.class.bias").mutable_data()[0] = std::numeric_limits<float>::quiet_NaN();
  TrainConfig tc;
  tc.steps = 2;
  try {
    fit(m, data, tc);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == 0);
    CHECK(std::string(e.what()) == "non-finite training loss at step 0");
  }
  CHECK_THROWS_AS(fit(m, std::vector<TrainSample<float>>{}, tc), ContractError);
}

TEST_CASE("pretraining reduces the masked reconstruction error") {
  spotter::SpotterConfig cfg;
  spotter::SpotterModel<float> m(cfg, 10);
  std::vector<Tensor<float>> images;
  for (const auto& f : frames(4, 10)) images.push_back(spotter::image_tokens<float>(f.image, cfg.patch_size));
  const double before = masked_mse(m, images, 99);
  CHECK(masked_mse(m, images, 99) == before);
  PretrainConfig pc;
  pc.steps = 30;
  const auto trace = pretrain_mae(m, images, pc);
  CHECK(trace.size() == 30);
  CHECK(masked_mse(m, images, 99) < 0.8 * before);
  // Only the backbone and the reconstruction branch move.
  spotter::SpotterModel<float> fresh(cfg, 10);
  for (const auto& [name, t] : m.parameters().entries()) {
    const auto group = spotter::parameter_group(name);
    if (group == "backbone" || group == "mae") continue;
    CHECK(std::memcmp(t.data().data(), fresh.parameters().at(name).data().data(), t.size() * sizeof(float)) == 0);
  }
}

}  // TEST_SUITE
