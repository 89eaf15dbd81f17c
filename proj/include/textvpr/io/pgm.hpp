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

#include "textvpr/core/types.hpp"

namespace textvpr::io {

// Binary P5, maxval 255. Header comments (# to end of line) are allowed
// between tokens. Errors are ParseError with a byte offset.
GrayImage parse_pgm(std::string_view bytes);
std::string format_pgm(const GrayImage& image);

GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& image, const std::string& path);

}  // namespace textvpr::io
