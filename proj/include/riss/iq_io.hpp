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

#include "riss/types.hpp"

#include <cstdint>
#include <filesystem>

namespace riss {

// Binary IQ block: little-endian float32 pairs (I, Q). Within one snapshot the antennas are
// stored consecutively, snapshots follow each other. A sidecar "<file>.hdr" text header holds
//
//   # riss iq v1
//   na <rows>
//   n <snapshots>
//   fs <sample rate in Hz>
//   seed <generator seed>
//
// Samples are rounded to float32 on write; a write/read round trip is exact after that rounding.
struct IqBlock
{
    CMat samples; // na x n
    double sample_rate = 0.0;
    std::uint64_t seed = 0;
};

void write_iq(const std::filesystem::path &path, const IqBlock &block);
IqBlock read_iq(const std::filesystem::path &path);

std::filesystem::path iq_header_path(const std::filesystem::path &path);

} // namespace riss
