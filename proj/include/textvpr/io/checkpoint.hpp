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

#include <json.hpp>

#include "textvpr/core/error.hpp"
#include "textvpr/spotter/model.hpp"
#include "textvpr/training/loss.hpp"

namespace textvpr::io {

// Layout: 8-byte magic "TVPRCKPT", uint32 LE manifest length, manifest JSON,
// then little-endian float32 parameters in inventory order.
inline constexpr std::string_view kCheckpointMagic = "TVPRCKPT";
inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public ParseError {
 public:
  enum class Kind { Format, Version, Length, Shape, Inventory };
  CheckpointError(Kind kind, const std::string& what, std::size_t byte)
      : ParseError(what, byte, Unit::Byte), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct CheckpointInfo {
  training::LossWeights loss_weights;
  // Free-form provenance (training config, step counts).
  nlohmann::json extra = nlohmann::json::object();
};

std::string serialize_checkpoint(const spotter::SpotterModel<float>& model, const CheckpointInfo& info = {});

struct LoadedCheckpoint {
  spotter::SpotterModel<float> model;
  CheckpointInfo info;
};

LoadedCheckpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const spotter::SpotterModel<float>& model, const std::string& path,
                     const CheckpointInfo& info = {});
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace textvpr::io
