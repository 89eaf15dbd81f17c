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

#include "textvpr/eval/report.hpp"

#include <cstdio>

namespace textvpr::eval {

using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string pr_curve_csv(const PRCurve& curve) {
  std::string out = "threshold,precision,recall\n";
  for (const auto& p : curve.points)
    out += fmt("%.17g", p.threshold) + "," + fmt("%.17g", p.precision) + "," + fmt("%.17g", p.recall) + "\n";
  return out;
}

json pr_summary_json(const PRCurve& curve, const json& config) {
  json readout = json::object();
  for (std::size_t i = 0; i < kRecallLevels.size(); ++i)
    readout[fmt("%.1f", kRecallLevels[i])] = curve.precision_at_recall[i];
  json j;
  j["kind"] = "vpr";
  j["interpolation"] = "max-precision";
  j["frame_tolerance"] = curve.frame_tolerance;
  j["n_queries"] = curve.n_queries;
  j["n_with_truth"] = curve.n_with_truth;
  j["n_points"] = curve.points.size();
  j["precision_at_recall"] = readout;
  j["config"] = config;
  return j;
}

std::string pr_curve_svg(const PRCurve& curve, const std::string& title) {
  const double w = 360, h = 300, m = 40;
  auto px = [&](double r) { return m + r * (w - 2 * m); };
  auto py = [&](double p) { return h - m - p * (h - 2 * m); };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"360\" height=\"300\" viewBox=\"0 0 360 300\">\n";
  s += "<rect width=\"360\" height=\"300\" fill=\"white\"/>\n";
  s += "<text x=\"180\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
       xml_escape(title) + "</text>\n";
  s += "<line x1=\"" + fmt("%.1f", px(0)) + "\" y1=\"" + fmt("%.1f", py(0)) + "\" x2=\"" + fmt("%.1f", px(1)) +
       "\" y2=\"" + fmt("%.1f", py(0)) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt("%.1f", px(0)) + "\" y1=\"" + fmt("%.1f", py(0)) + "\" x2=\"" + fmt("%.1f", px(0)) +
       "\" y2=\"" + fmt("%.1f", py(1)) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"180\" y=\"292\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">recall</text>\n";
  s += "<text x=\"12\" y=\"150\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
       "transform=\"rotate(-90 12 150)\">precision</text>\n";
  if (!curve.points.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
    for (const auto& p : curve.points) s += fmt("%.2f", px(p.recall)) + "," + fmt("%.2f", py(p.precision)) + " ";
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

json detection_json(const DetectionReport& r, double iou_threshold) {
  return json{{"precision", r.precision},
              {"recall", r.recall},
              {"hmean", r.hmean},
              {"tp", r.tp},
              {"fp", r.fp},
              {"fn", r.fn},
              {"invalid_predictions", r.invalid_predictions},
              {"invalid_truths", r.invalid_truths},
              {"iou_threshold", iou_threshold}};
}

}  // namespace textvpr::eval
