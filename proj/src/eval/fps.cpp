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

#include "textvpr/eval/fps.hpp"

#include <algorithm>
#include <chrono>

#include "textvpr/core/error.hpp"

namespace textvpr::eval {

double fps_from(std::size_t frames, double seconds) {
  if (!(seconds > 0.0)) throw ContractError("fps_from: elapsed time must be positive");
  return static_cast<double>(frames) / seconds;
}

FpsResult measure_fps(const FrameRunner& runner, const std::vector<GrayImage>& frames, const FpsOptions& options) {
  if (frames.empty()) throw ContractError("measure_fps: no frames");
  if (options.trials == 0) throw ContractError("measure_fps: need at least one trial");
  for (std::size_t i = 0; i < options.warmup; ++i) runner(frames[i % frames.size()]);
  using clock = std::chrono::steady_clock;
  FpsResult out;
  for (std::size_t t = 0; t < options.trials; ++t) {
    const auto start = clock::now();
    for (const auto& f : frames) runner(f);
    const double secs = std::chrono::duration<double>(clock::now() - start).count();
    out.trial_fps.push_back(fps_from(frames.size(), std::max(secs, 1e-9)));
  }
  auto sorted = out.trial_fps;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  out.fps = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return out;
}

}  // namespace textvpr::eval
