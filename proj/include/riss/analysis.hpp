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

#include "riss/channel.hpp"
#include "riss/link.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace riss {

struct BeampatternResult
{
    std::vector<double> angles_deg; // strictly increasing
    std::vector<double> gain;       // linear, peak 1
    std::vector<double> gain_db;    // peak 0 dB
    double reference = 0.0;         // peak before normalization
    std::vector<double> markers_deg;
};

// -90 .. 90 degrees with step 0.1.
std::vector<double> default_beam_grid(double step_deg = 0.1);

// Divides by the maximum; normalizing twice equals normalizing once.
std::vector<double> normalize_peak(const std::vector<double> &values);

// Array factor against the incident co-planar azimuth with the departure fixed toward the Rx:
//   gain(az) = | sum_k alpha_h,k theta_k alpha_k(az) |^2, normalized to its peak.
BeampatternResult farfield_beampattern(const ReflectionConfig &theta, const Scenario &scenario,
                                       const std::vector<double> &grid_deg = default_beam_grid(),
                                       std::vector<double> markers_deg = {});

// sum_k exp(-i 2 pi (d(source, k) + d(k, probe)) / lambda + i phi_k). With path loss each term is
// scaled by lambda^2 / (16 pi^2 d1 d2). A probe on an element throws.
cplx nearfield_probe(const ReflectionConfig &theta, const Scenario &scenario, const Vec3 &source, const Vec3 &probe,
                     bool path_loss = false);

// |probe|^2 on the co-planar arc of the given radius, normalized to the peak.
BeampatternResult nearfield_arc_pattern(const ReflectionConfig &theta, const Scenario &scenario, const Vec3 &source,
                                        double radius, const std::vector<double> &grid_deg = default_beam_grid());

struct HeatmapSpec
{
    double x_min = -4.0, x_max = 4.0;
    double z_min = 0.2, z_max = 5.0;
    std::size_t nx = 201, nz = 201;
    std::optional<Vec3> source; // defaults to the target transmitter
    bool path_loss = false;

    void validate() const;
};

struct HeatmapResult
{
    std::vector<double> xs;
    std::vector<double> zs;
    RMat magnitude; // nz x nx, |field|
    Vec3 surface{0.0, 0.0, 0.0};
};

// Field magnitude on the y = 0 plane. `target_tx` selects the default source.
HeatmapResult heatmap(const ReflectionConfig &theta, const Scenario &scenario, const HeatmapSpec &spec = {},
                      std::size_t target_tx = 1);

struct SinrValue
{
    double linear = 0.0;
    double db = 0.0;
};

// |g_t|^2 P / (|g_i|^2 P + noise).
SinrValue sinr(cplx target_gain, cplx interferer_gain, double noise_power, double power = 1.0);

// CSV emitters, fixed 10 significant digits.
void write_beampattern_csv(const std::filesystem::path &path, const BeampatternResult &result);
void write_heatmap_csv(const std::filesystem::path &path, const HeatmapResult &result);
// Rows "re,im,label" with the label of the ideal QPSK point (0..3).
void write_constellation_csv(const std::filesystem::path &path, const LinkResult &result);

} // namespace riss
