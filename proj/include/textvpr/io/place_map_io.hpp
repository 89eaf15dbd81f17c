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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "textvpr/vpr/vpr.hpp"

namespace textvpr::io {

// {format: "tvpr-map", version: 1, policy, frames: [{frame_id, instances}]}
std::string format_place_map(const vpr::PlaceMap& map);
// ParseError (with line) for malformed documents or a wrong format tag or
// version; ValidationError for duplicate frame ids or bad instances.
vpr::PlaceMap parse_place_map(std::string_view text);

void save_place_map(const vpr::PlaceMap& map, const std::string& path);
vpr::PlaceMap load_place_map(const std::string& path);

// JSONL: {query_id, best_frame_id, best_index, score, accepted}
std::string format_match_results(const std::vector<vpr::MatchResult>& results);
std::vector<vpr::MatchResult> parse_match_results(std::string_view text);
void write_match_results(const std::vector<vpr::MatchResult>& results, const std::string& path);
std::vector<vpr::MatchResult> read_match_results(const std::string& path);

}  // namespace textvpr::io
