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

#include "textvpr/core/types.hpp"

namespace textvpr::io {

struct AnnotationRecord {
  std::string frame_id;
  std::string image_path;
  std::vector<TextInstance> instances;  // pixel-space polygons

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

// One JSON object per line, LF terminated. Reals keep full precision.
std::string format_annotations(const std::vector<AnnotationRecord>& records);

// Blank lines are skipped; unknown fields ignored. Malformed lines raise
// ParseError with the 1-based line; duplicate frame ids, short polygons and
// out-of-range confidences raise ValidationError.
std::vector<AnnotationRecord> parse_annotations(std::string_view text);

void write_annotations(const std::string& path, const std::vector<AnnotationRecord>& records);
std::vector<AnnotationRecord> read_annotations(const std::string& path);

}  // namespace textvpr::io
