// SPDX-License-Identifier: Apache-2.0
//
// riss: sensing-assisted reflective surface simulation
// Copyright (C) 2026 The riss authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace riss {

// Byte-identical output for identical input; no timestamps or locale-dependent formatting.
//   beampattern   angle_deg vs gain_db, line
//   trace         first column vs r / objective (else the second column), line, log y for r
//   constellation re vs im, scatter on symmetric axes
//   heatmap       x, z, magnitude as a raster of rects
std::string render_svg(std::string_view kind, std::string_view csv_text);

void render_svg_file(std::string_view kind, const std::filesystem::path &csv, const std::filesystem::path &svg);

class RenderError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace riss
