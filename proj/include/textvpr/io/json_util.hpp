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

#include <vector>

#include <json.hpp>

#include "textvpr/core/types.hpp"

namespace textvpr::io {

// [{polygon: [[x,y],...], text, confidence}]. Polygons must be pixel-space.
nlohmann::json instances_to_json(const std::vector<TextInstance>& instances);

// Throws nlohmann::json::exception for structural problems and
// ValidationError for short polygons, non-finite points or confidences
// outside [0,1].
std::vector<TextInstance> instances_from_json(const nlohmann::json& j);

}  // namespace textvpr::io
