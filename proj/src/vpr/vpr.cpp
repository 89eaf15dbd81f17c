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

#include "textvpr/vpr/vpr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "textvpr/core/error.hpp"
#include "textvpr/training/hungarian.hpp"

namespace textvpr::vpr {

void FilterPolicy::validate() const {
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) throw ContractError("filter policy: min_confidence outside [0,1]");
  if (!(min_alnum_fraction >= 0.0 && min_alnum_fraction <= 1.0))
    throw ContractError("filter policy: min_alnum_fraction outside [0,1]");
}

std::vector<TextInstance> filter_instances(const std::vector<TextInstance>& instances, const FilterPolicy& policy) {
  policy.validate();
  std::vector<TextInstance> out;
  for (const auto& inst : instances) {
    if (!(inst.confidence >= policy.min_confidence)) continue;
    if (inst.text.size() < policy.min_length) continue;
    std::size_t alnum = 0;
    for (unsigned char c : inst.text) alnum += std::isalnum(c) ? 1 : 0;
    // alnum / n >= f, compared without dividing
    if (inst.text.empty() ? policy.min_alnum_fraction > 0.0
                          : static_cast<double>(alnum) < policy.min_alnum_fraction * static_cast<double>(inst.text.size()))
      continue;
    out.push_back(inst);
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  const std::string fa = case_fold(a), fb = case_fold(b);
  const std::size_t n = std::max(fa.size(), fb.size());
  if (n == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(fa, fb)) / static_cast<double>(n);
}

namespace {

// Largest common multiple we let the integer scaling reach; keeps every
// scaled sum an exact double.
constexpr std::uint64_t kMaxScale = std::uint64_t{1} << 40;

}  // namespace

PairedSum paired_similarity(const std::vector<std::string>& q, const std::vector<std::string>& r, double sim_floor) {
  PairedSum out;
  if (q.empty() || r.empty()) return out;
  const bool q_rows = q.size() >= r.size();
  const auto& rows = q_rows ? q : r;
  const auto& cols = q_rows ? r : q;

  // s = (len - dist) / len per pair. Scale by the lcm of the lengths in play
  // so each kept similarity is an integer.
  struct Pair {
    std::size_t len = 0, keep = 0;
  };
  std::vector<Pair> pairs(rows.size() * cols.size());
  std::set<std::size_t> lens;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string a = case_fold(rows[i]);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const std::string b = case_fold(cols[j]);
      auto& p = pairs[i * cols.size() + j];
      p.len = std::max(a.size(), b.size());
      if (p.len == 0) {
        p.len = 1;
        p.keep = 1;
      } else {
        p.keep = p.len - levenshtein(a, b);
      }
      if (static_cast<double>(p.keep) < sim_floor * static_cast<double>(p.len)) p.keep = 0;
      if (p.keep > 0) lens.insert(p.len);
    }
  }
  std::uint64_t scale = 1;
  bool exact = true;
  for (std::size_t len : lens) {
    scale = std::lcm(scale, static_cast<std::uint64_t>(len));
    if (scale > kMaxScale) {
      exact = false;
      break;
    }
  }

  training::CostMatrix cost(rows.size(), cols.size());
  std::vector<double> weight(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    weight[k] = exact ? static_cast<double>(p.keep * (scale / p.len))
                      : static_cast<double>(p.keep) / static_cast<double>(p.len);
  }
  const double full = exact ? static_cast<double>(scale) : 1.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) cost.values[k] = full - weight[k];

  const auto match = training::hungarian_match(cost);
  double sum = 0.0;
  for (const auto& [i, j] : match.pairs) sum += weight[i * cols.size() + j];
  out.numerator = sum;
  out.denominator = full;
  return out;
}

double frame_similarity(const std::vector<std::string>& q, const std::vector<std::string>& r, double sim_floor) {
  if (q.empty() || r.empty()) return 0.0;
  const auto s = paired_similarity(q, r, sim_floor);
  const double n = static_cast<double>(std::max(q.size(), r.size()));
  return std::clamp(s.numerator / (s.denominator * n), 0.0, 1.0);
}

namespace {

std::vector<std::string> texts(const std::vector<TextInstance>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& i : v) out.push_back(i.text);
  return out;
}

}  // namespace

double frame_similarity(const std::vector<TextInstance>& q, const std::vector<TextInstance>& r, double sim_floor) {
  return frame_similarity(texts(q), texts(r), sim_floor);
}

PlaceMap build_place_map(const std::vector<PlaceFrame>& frames, const FilterPolicy& policy) {
  policy.validate();
  PlaceMap map;
  map.policy = policy;
  std::set<std::string> seen;
  for (const auto& f : frames) {
    if (!seen.insert(f.frame_id).second) throw ValidationError("build_place_map: duplicate frame_id '" + f.frame_id + "'");
    map.frames.push_back({f.frame_id, filter_instances(f.instances, policy)});
  }
  return map;
}

PlaceMap build_place_map(const std::vector<Frame>& frames, const FilterPolicy& policy) {
  std::vector<PlaceFrame> pf;
  pf.reserve(frames.size());
  for (const auto& f : frames) pf.push_back({f.id, f.instances});
  return build_place_map(pf, policy);
}

MatchResult query_place(const PlaceMap& map, const std::string& query_id, const std::vector<TextInstance>& query,
                        double decision_threshold, double sim_floor) {
  if (map.frames.empty()) throw ContractError("query_place: empty place map");
  const auto q = texts(filter_instances(query, map.policy));
  MatchResult res;
  res.query_id = query_id;
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t k = 0; k < map.frames.size(); ++k) {
    const double s = frame_similarity(q, texts(map.frames[k].instances), sim_floor);
    if (s > best_score) {
      best_score = s;
      best = k;
    }
  }
  res.best_index = best;
  res.best_frame_id = map.frames[best].frame_id;
  res.score = best_score;
  res.accepted = best_score >= decision_threshold;
  return res;
}

}  // namespace textvpr::vpr
