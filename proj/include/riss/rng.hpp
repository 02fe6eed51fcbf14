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
#include <random>
#include <string_view>

namespace riss {

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(std::string_view bytes);

std::uint64_t splitmix64(std::uint64_t x);

// Sub-seed for a labelled stream, e.g. derive_seed(run_seed, "trial/3/noise").
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    // Circularly symmetric complex Gaussian with E|x|^2 = variance.
    cplx complex_normal(double variance = 1.0)
    {
        const double s = std::sqrt(0.5 * variance);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    unsigned bit() { return unsigned(engine_() >> 63); }

    std::mt19937_64 &engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

} // namespace riss
