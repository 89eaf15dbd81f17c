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

#include <cstddef>
#include <functional>
#include <vector>

#include "textvpr/core/types.hpp"

namespace textvpr::eval {

struct FpsOptions {
  std::size_t warmup = 3;  // untimed runs, cycling through the frames
  std::size_t trials = 3;
};

struct FpsResult {
  double fps = 0.0;  // median over trials
  std::vector<double> trial_fps;
};

double fps_from(std::size_t frames, double seconds);

using FrameRunner = std::function<void(const GrayImage&)>;

// Each trial times one pass over all frames. Throws ContractError when
// `frames` is empty or no trials are requested.
FpsResult measure_fps(const FrameRunner& runner, const std::vector<GrayImage>& frames, const FpsOptions& options = {});

}  // namespace textvpr::eval
