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

#include "textvpr/io/annotations.hpp"

#include <set>

#include <json.hpp>

#include "textvpr/core/error.hpp"
#include "textvpr/io/atomic_file.hpp"
#include "textvpr/io/json_util.hpp"

namespace textvpr::io {

using nlohmann::json;

std::string format_annotations(const std::vector<AnnotationRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json j;
    j["frame_id"] = r.frame_id;
    j["image_path"] = r.image_path;
    j["instances"] = instances_to_json(r.instances);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<AnnotationRecord> parse_annotations(std::string_view text) {
  std::vector<AnnotationRecord> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("annotations: malformed JSON: ") + e.what(), line_no);
    }
    AnnotationRecord r;
    try {
      r.frame_id = j.at("frame_id").get<std::string>();
      r.image_path = j.value("image_path", std::string());
      if (j.contains("instances")) r.instances = instances_from_json(j.at("instances"));
    } catch (const json::exception& e) {
      throw ParseError(std::string("annotations: bad record: ") + e.what(), line_no);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
    if (!seen.insert(r.frame_id).second)
      throw ValidationError("annotations: duplicate frame_id '" + r.frame_id + "' (line " + std::to_string(line_no) + ")");
    out.push_back(std::move(r));
  }
  return out;
}

void write_annotations(const std::string& path, const std::vector<AnnotationRecord>& records) {
  write_file_atomic(path, format_annotations(records));
}

std::vector<AnnotationRecord> read_annotations(const std::string& path) { return parse_annotations(read_file(path)); }

}  // namespace textvpr::io
