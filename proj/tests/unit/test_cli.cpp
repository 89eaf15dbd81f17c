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

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "textvpr/io/annotations.hpp"
#include "textvpr/io/atomic_file.hpp"
#include "textvpr/io/place_map_io.hpp"

using namespace textvpr;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Sandbox {
  fs::path root;
  Sandbox() {
    root = fs::temp_directory_path() / ("textvpr_cli_" + std::to_string(::getpid()) + "_" + std::to_string(next()++));
    fs::create_directories(root);
  }
  ~Sandbox() { fs::remove_all(root); }
  std::string at(const std::string& rel) const { return (root / rel).string(); }
  static int& next() {
    static int n = 0;
    return n;
  }

  // Runs the CLI with stdout/stderr captured under the sandbox.
  int run(const std::string& args) const {
    const std::string cmd = std::string("'") + TEXTVPR_CLI_PATH + "' " + args + " >'" + at("stdout.txt") + "' 2>'" +
                            at("stderr.txt") + "'";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
  std::string err() const { return io::read_file(at("stderr.txt")); }
  std::string out() const { return io::read_file(at("stdout.txt")); }
};

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_file(e.path().string());
  return files;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help on every subcommand exits zero and lists its flags") {
  Sandbox sb;
  const std::map<std::string, std::string> flags{
      {"synth", "--places"}, {"pretrain", "--steps"},     {"train", "--grad-clip"}, {"spot", "--threshold"},
      {"map", "--min-confidence"}, {"query", "--sim-floor"}, {"eval", "--tolerance"},  {"bench", "--sleep-ms"}};
  for (const auto& [cmd, flag] : flags) {
    CAPTURE(cmd);
    CHECK(sb.run(cmd + " --help") == 0);
    CHECK(sb.out().find(flag) != std::string::npos);
  }
  CHECK(sb.run("--help") == 0);
  for (const char* g : {"--seed", "--out", "--config"}) CHECK(sb.out().find(g) != std::string::npos);
}

TEST_CASE("usage errors exit one with a machine-readable line") {
  Sandbox sb;
  CHECK(sb.run("") == 1);
  CHECK(sb.run("frobnicate") == 1);
  CHECK(sb.run("synth --out " + sb.at("d") + " --no-such-flag") == 1);
  const auto line = json::parse(sb.err().substr(sb.err().rfind('{')));
  CHECK(line.at("exit_code") == 1);
  CHECK(line.at("error") == "usage");
  CHECK(sb.run("synth --out " + sb.at("d") + " --drop-rate 2") == 1);
  CHECK(sb.run("eval bogus --pred a --truth b --out c") == 1);
}

TEST_CASE("io and parse errors exit two without partial output") {
  Sandbox sb;
  CHECK(sb.run("map --pred " + sb.at("missing.jsonl") + " --out " + sb.at("map.json")) == 2);
  CHECK(json::parse(sb.err()).at("error") == "io");
  io::write_file_atomic(sb.at("bad.jsonl"), "{\"frame_id\": \n");
  CHECK(sb.run("map --pred " + sb.at("bad.jsonl") + " --out " + sb.at("map.json")) == 2);
  CHECK_FALSE(fs::exists(sb.at("map.json")));
  io::write_file_atomic(sb.at("cfg.json"), "{not json");
  CHECK(sb.run("--config " + sb.at("cfg.json") + " synth --out " + sb.at("d")) == 2);
}

TEST_CASE("synth is byte-deterministic") {
  Sandbox sb;
  REQUIRE(sb.run("--seed 7 --out " + sb.at("a") + " synth --places 6 --drop-rate 0.2") == 0);
  REQUIRE(sb.run("--seed 7 --out " + sb.at("b") + " synth --places 6 --drop-rate 0.2") == 0);
  const auto a = tree(sb.at("a")), b = tree(sb.at("b"));
  CHECK(a.size() >= 12 + 2 + 1);
  CHECK(a == b);
  REQUIRE(sb.run("--seed 8 --out " + sb.at("c") + " synth --places 6 --drop-rate 0.2") == 0);
  CHECK(tree(sb.at("c")) != a);
  CHECK(io::read_annotations(sb.at("a/map.jsonl")).size() == 6);
}

TEST_CASE("map query and eval on ground truth") {
  Sandbox sb;
  REQUIRE(sb.run("--seed 3 --out " + sb.at("d") + " synth --places 8 --drop-rate 0.25") == 0);
  REQUIRE(sb.run("--out " + sb.at("map.json") + " map --pred " + sb.at("d/map.jsonl")) == 0);
  CHECK(io::load_place_map(sb.at("map.json")).frames.size() == 8);
  REQUIRE(sb.run("--out " + sb.at("q.jsonl") + " query --map " + sb.at("map.json") + " --pred " +
                 sb.at("d/query.jsonl")) == 0);
  REQUIRE(sb.run("--out " + sb.at("vpr") + " eval vpr --pred " + sb.at("q.jsonl") + " --truth " +
                 sb.at("d/correspondence.json") + " --tolerance 3") == 0);
  const auto csv = io::read_file(sb.at("vpr/pr_curve.csv"));
  CHECK(csv.rfind("threshold,precision,recall\n", 0) == 0);
  const auto summary = json::parse(io::read_file(sb.at("vpr/pr_summary.json")));
  CHECK(summary.at("precision_at_recall").size() == 5);
  CHECK(summary.at("frame_tolerance") == 3);
  CHECK(fs::exists(sb.at("vpr/pr_curve.svg")));

  REQUIRE(sb.run("--out " + sb.at("det.json") + " eval detection --pred " + sb.at("d/map.jsonl") + " --truth " +
                 sb.at("d/map.jsonl")) == 0);
  CHECK(json::parse(io::read_file(sb.at("det.json"))).at("hmean") == 1.0);
}

}  // TEST_SUITE
