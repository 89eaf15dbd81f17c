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

#include "textvpr/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <set>

#include "textvpr/io/atomic_file.hpp"

namespace textvpr::io {

using nlohmann::json;
using Kind = CheckpointError::Kind;

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view s, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
  return v;
}

}  // namespace

std::string serialize_checkpoint(const spotter::SpotterModel<float>& model, const CheckpointInfo& info) {
  json manifest;
  manifest["format"] = "tvpr-checkpoint";
  manifest["version"] = kCheckpointVersion;
  manifest["config"] = model.config();
  manifest["loss_weights"] = {
      {"cls", info.loss_weights.cls}, {"poly", info.loss_weights.poly}, {"char", info.loss_weights.chr}};
  manifest["extra"] = info.extra;
  json inventory = json::array();
  std::size_t offset = 0;
  for (const auto& [name, t] : model.parameters().entries()) {
    inventory.push_back({{"name", name}, {"shape", t.shape()}, {"offset", offset}});
    offset += t.size() * 4;
  }
  manifest["inventory"] = inventory;
  manifest["blob_bytes"] = offset;

  const std::string text = manifest.dump();
  std::string out(kCheckpointMagic);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  out.reserve(out.size() + offset);
  for (const auto& [name, t] : model.parameters().entries())
    for (float v : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

LoadedCheckpoint deserialize_checkpoint(std::string_view s) {
  const std::size_t head = kCheckpointMagic.size() + 4;
  if (s.size() < kCheckpointMagic.size() || s.substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
    throw CheckpointError(Kind::Format, "checkpoint: bad magic", 0);
  if (s.size() < head) throw CheckpointError(Kind::Length, "checkpoint: truncated header", s.size());
  const std::size_t mlen = get_u32(s, kCheckpointMagic.size());
  if (s.size() - head < mlen) throw CheckpointError(Kind::Length, "checkpoint: truncated manifest", s.size());

  json manifest;
  try {
    manifest = json::parse(s.substr(head, mlen));
  } catch (const json::parse_error& e) {
    throw CheckpointError(Kind::Format, std::string("checkpoint: malformed manifest: ") + e.what(), head + e.byte);
  }
  const std::size_t blob_start = head + mlen;
  spotter::SpotterConfig cfg;
  CheckpointInfo info;
  std::vector<std::tuple<std::string, Shape, std::size_t>> inventory;
  try {
    if (manifest.value("format", std::string()) != "tvpr-checkpoint")
      throw CheckpointError(Kind::Format, "checkpoint: unknown format tag", head);
    const int version = manifest.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw CheckpointError(Kind::Version,
                            "checkpoint: unsupported version " + std::to_string(version) + " (expected " +
                                std::to_string(kCheckpointVersion) + ")",
                            head);
    cfg = manifest.at("config").get<spotter::SpotterConfig>();
    if (manifest.contains("loss_weights")) {
      const auto& w = manifest.at("loss_weights");
      info.loss_weights.cls = w.at("cls").get<double>();
      info.loss_weights.poly = w.at("poly").get<double>();
      info.loss_weights.chr = w.at("char").get<double>();
    }
    info.extra = manifest.value("extra", json::object());
    for (const auto& e : manifest.at("inventory"))
      inventory.emplace_back(e.at("name").get<std::string>(), e.at("shape").get<Shape>(), e.at("offset").get<std::size_t>());
  } catch (const json::exception& e) {
    throw CheckpointError(Kind::Format, std::string("checkpoint: bad manifest: ") + e.what(), head);
  } catch (const ContractError& e) {
    throw CheckpointError(Kind::Format, std::string("checkpoint: bad config: ") + e.what(), head);
  }

  LoadedCheckpoint out{spotter::SpotterModel<float>(cfg, 0), info};
  auto& params = out.model.parameters();
  std::set<std::string> seen;
  for (const auto& [name, shape, offset] : inventory) {
    if (!params.contains(name))
      throw CheckpointError(Kind::Inventory, "checkpoint: unknown parameter '" + name + "'", head);
    if (!seen.insert(name).second)
      throw CheckpointError(Kind::Inventory, "checkpoint: duplicate parameter '" + name + "'", head);
    auto& t = params.at(name);
    if (t.shape() != shape)
      throw CheckpointError(Kind::Shape,
                            "checkpoint: parameter '" + name + "' has shape " + shape_str(shape) +
                                ", the architecture needs " + shape_str(t.shape()),
                            head);
  }
  if (seen.size() != params.size())
    throw CheckpointError(Kind::Inventory, "checkpoint: inventory misses parameters of the configured architecture", head);
  std::size_t expected = 0;
  for (const auto& [name, shape, offset] : inventory) {
    if (offset != expected) throw CheckpointError(Kind::Inventory, "checkpoint: offset gap at '" + name + "'", head);
    expected += shape_numel(shape) * 4;
  }
  const std::size_t blob = s.size() - blob_start;
  if (blob != expected)
    throw CheckpointError(Kind::Length,
                          "checkpoint: blob holds " + std::to_string(blob) + " bytes, inventory needs " +
                              std::to_string(expected),
                          s.size());

  for (const auto& [name, shape, offset] : inventory) {
    auto d = params.at(name).mutable_data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::bit_cast<float>(get_u32(s, blob_start + offset + 4 * i));
  }
  return out;
}

void save_checkpoint(const spotter::SpotterModel<float>& model, const std::string& path, const CheckpointInfo& info) {
  write_file_atomic(path, serialize_checkpoint(model, info));
}

LoadedCheckpoint load_checkpoint(const std::string& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace textvpr::io
