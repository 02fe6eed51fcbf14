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

#include <cstdint>
#include <optional>
#include <vector>

namespace riss {

// Near-field design over per-element phases. Every link is summarised by its two-hop path
// length p_k = d(source, k) + d(k, Rx); the strength seen at the receiver is
//   S = | sum_k exp(-i 2 pi p_k / lambda + i phi_k) |.
struct NearfieldDesignSpec
{
    double wavelength = 0.0;
    RVec target_path;                   // N
    std::vector<RVec> interferer_paths; // one per position hypothesis
    double eta = 1.0;
    std::size_t levels = 4;       // candidate phases per element; 0 selects continuous phases
    std::size_t max_sweeps = 50;
    double psi = 0.0;             // common offset of the initial phases
    std::optional<std::uint64_t> order_seed; // shuffled element order per sweep when set

    std::size_t size() const { return std::size_t(target_path.size()); }
    void validate() const;

    // Single-antenna transmitters only. With delta > 0 the interferer is replaced by `grid`
    // hypotheses on its arc (same range, azimuths spread by +-delta).
    static NearfieldDesignSpec from_scenario(const Scenario &scenario, std::size_t target_tx = 1, double delta = 0.0,
                                             std::size_t grid = 1);
};

// Two-hop path lengths from `source` through every passive element to the receiver.
RVec path_lengths(const Scenario &scenario, const Vec3 &source);

// phi_k = 2 pi frac(p_k / lambda) + psi, wrapped to [0, 2 pi).
std::vector<double> init_phases(const RVec &path, double wavelength, double psi = 0.0);

cplx field_sum(const std::vector<double> &phases, const RVec &path, double wavelength);
double signal_strength(const std::vector<double> &phases, const RVec &path, double wavelength);

// Hypothesised interferer positions on the radius-dc arc around azimuth `azimuth`.
std::vector<Vec3> robust_interferer_positions(double azimuth, double delta, std::size_t grid, double dc);

// S2 - eta * max_l S1_l.
double evaluate_objective(const std::vector<double> &phases, const NearfieldDesignSpec &spec);

struct AoTrace
{
    std::vector<double> sweep_objectives;  // value at the start and after every sweep
    std::vector<double> update_objectives; // value after every accepted single-element update
    std::size_t updates = 0;
    std::size_t sweeps = 0;
    bool converged = false;
};

struct NearfieldDesign
{
    ReflectionConfig theta;
    std::vector<double> initial; // starting point actually used (on the lattice when levels > 0)
    AoTrace trace;
    double s2 = 0.0;
    double s1_max = 0.0;
};

// Cyclic exact coordinate ascent. An element moves only when the objective improves by more than
// 1e-12, so the objective never decreases and the lattice search always terminates.
NearfieldDesign ao_optimize(const NearfieldDesignSpec &spec);

// Nearest of the `levels` uniform phases, ties toward the lower level.
double snap_phase(double phase, std::size_t levels);

} // namespace riss
