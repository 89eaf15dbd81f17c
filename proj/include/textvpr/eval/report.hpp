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

#include <json.hpp>

#include "textvpr/eval/detection.hpp"
#include "textvpr/eval/vpr_eval.hpp"

namespace textvpr::eval {

// threshold,precision,recall
std::string pr_curve_csv(const PRCurve& curve);

// Summary with the interpolation convention, tolerance, readouts and the
// caller's configuration echoed under "config".
nlohmann::json pr_summary_json(const PRCurve& curve, const nlohmann::json& config = nlohmann::json::object());

// Standalone SVG line plot of precision against recall.
std::string pr_curve_svg(const PRCurve& curve, const std::string& title = "Precision-Recall");

nlohmann::json detection_json(const DetectionReport& report, double iou_threshold);

}  // namespace textvpr::eval
