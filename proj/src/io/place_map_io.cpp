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

#include "textvpr/io/place_map_io.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "textvpr/core/error.hpp"
#include "textvpr/io/atomic_file.hpp"
#include "textvpr/io/json_util.hpp"

namespace textvpr::io {

using nlohmann::json;

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::string format_place_map(const vpr::PlaceMap& map) {
  json j;
  j["format"] = "tvpr-map";
  j["version"] = 1;
  j["policy"] = {{"min_confidence", map.policy.min_confidence},
                 {"min_length", map.policy.min_length},
                 {"min_alnum_fraction", map.policy.min_alnum_fraction}};
  json frames = json::array();
  for (const auto& f : map.frames) frames.push_back({{"frame_id", f.frame_id}, {"instances", instances_to_json(f.instances)}});
  j["frames"] = frames;
  return j.dump(1) + "\n";
}

vpr::PlaceMap parse_place_map(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("place map: malformed JSON: ") + e.what(), line_of(text, e.byte));
  }
  vpr::PlaceMap map;
  try {
    if (j.value("format", std::string()) != "tvpr-map") throw ParseError("place map: unknown format tag", 1);
    if (j.value("version", 0) != 1) throw ParseError("place map: unsupported version", 1);
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      map.policy.min_confidence = p.value("min_confidence", map.policy.min_confidence);
      map.policy.min_length = p.value("min_length", map.policy.min_length);
      map.policy.min_alnum_fraction = p.value("min_alnum_fraction", map.policy.min_alnum_fraction);
    }
    std::set<std::string> seen;
    for (const auto& f : j.at("frames")) {
      vpr::PlaceFrame pf;
      pf.frame_id = f.at("frame_id").get<std::string>();
      if (!seen.insert(pf.frame_id).second) throw ValidationError("place map: duplicate frame_id '" + pf.frame_id + "'");
      if (f.contains("instances")) pf.instances = instances_from_json(f.at("instances"));
      map.frames.push_back(std::move(pf));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("place map: bad document: ") + e.what(), 1);
  }
  map.policy.validate();
  return map;
}

void save_place_map(const vpr::PlaceMap& map, const std::string& path) { write_file_atomic(path, format_place_map(map)); }

vpr::PlaceMap load_place_map(const std::string& path) { return parse_place_map(read_file(path)); }

std::string format_match_results(const std::vector<vpr::MatchResult>& results) {
  std::string out;
  for (const auto& r : results) {
    json j;
    j["query_id"] = r.query_id;
    j["best_frame_id"] = r.best_frame_id ? json(*r.best_frame_id) : json(nullptr);
    j["best_index"] = r.best_index ? json(*r.best_index) : json(nullptr);
    j["score"] = r.score;
    j["accepted"] = r.accepted;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<vpr::MatchResult> parse_match_results(std::string_view text) {
  std::vector<vpr::MatchResult> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      vpr::MatchResult r;
      r.query_id = j.at("query_id").get<std::string>();
      if (j.contains("best_frame_id") && !j.at("best_frame_id").is_null())
        r.best_frame_id = j.at("best_frame_id").get<std::string>();
      if (j.contains("best_index") && !j.at("best_index").is_null()) r.best_index = j.at("best_index").get<std::size_t>();
      r.score = j.at("score").get<double>();
      r.accepted = j.value("accepted", false);
      if (r.accepted && !r.best_frame_id) throw ValidationError("match result accepted without a frame");
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(std::string("match results: ") + e.what(), line_no);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  return out;
}

void write_match_results(const std::vector<vpr::MatchResult>& results, const std::string& path) {
  write_file_atomic(path, format_match_results(results));
}

std::vector<vpr::MatchResult> read_match_results(const std::string& path) {
  return parse_match_results(read_file(path));
}

}  // namespace textvpr::io
