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

#include "textvpr/io/json_util.hpp"

#include <cmath>

#include "textvpr/core/error.hpp"

namespace textvpr::io {

using nlohmann::json;

json instances_to_json(const std::vector<TextInstance>& instances) {
  json arr = json::array();
  for (const auto& inst : instances) {
    if (inst.polygon.normalized())
      throw ContractError("instances are serialized in pixel space; denormalize the polygon first");
    json poly = json::array();
    for (const auto& p : inst.polygon.vertices()) poly.push_back({p.x, p.y});
    arr.push_back({{"polygon", poly}, {"text", inst.text}, {"confidence", inst.confidence}});
  }
  return arr;
}

std::vector<TextInstance> instances_from_json(const json& j) {
  std::vector<TextInstance> out;
  for (const auto& ji : j) {
    TextInstance inst;
    std::vector<geometry::Point> pts;
    for (const auto& jp : ji.at("polygon")) {
      if (jp.size() != 2) throw ValidationError("polygon point must be an [x, y] pair");
      pts.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
    }
    if (pts.size() < 3) throw ValidationError("polygon needs at least 3 points");
    for (const auto& p : pts)
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ValidationError("polygon has a non-finite coordinate");
    inst.polygon = geometry::Polygon(std::move(pts));
    inst.text = ji.at("text").get<std::string>();
    inst.confidence = ji.value("confidence", 1.0);
    if (!(inst.confidence >= 0.0 && inst.confidence <= 1.0)) throw ValidationError("confidence outside [0,1]");
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace textvpr::io
