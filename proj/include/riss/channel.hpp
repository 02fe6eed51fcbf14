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

#include "riss/geometry.hpp"

#include <optional>
#include <vector>

namespace riss {

enum class ChannelModel
{
    far,
    near
};

struct ChannelSet
{
    ChannelModel model = ChannelModel::far;
    std::vector<CMat> G;              // per Tx: N x M_i
    CVec h;                           // N
    std::vector<double> loss_tx;      // per Tx, linear
    double loss_rx = 1.0;             // linear
};

class ReflectionConfig
{
  public:
    ReflectionConfig() = default;

    // Phases are wrapped to [0, 2pi). With bits > 0 every phase must sit on the 2^bits lattice.
    explicit ReflectionConfig(std::vector<double> phases, unsigned bits = 0);

    // Unit-modulus projection of arbitrary complex coefficients.
    static ReflectionConfig from_coefficients(const CVec &coefficients);
    static ReflectionConfig identity(std::size_t n);

    const std::vector<double> &phases() const { return phases_; }
    unsigned bits() const { return bits_; }
    std::size_t size() const { return phases_.size(); }

    CVec diagonal() const;

    // Lattice index of element k (bits > 0 only).
    std::size_t level(std::size_t k) const;

  private:
    std::vector<double> phases_;
    unsigned bits_ = 0;
};

// Nearest of {2 pi j / 2^bits}; ties go to the lower level.
ReflectionConfig quantize_reflection(const ReflectionConfig &config, unsigned bits);

// Free-space loss (lambda / (4 pi d))^2.
double path_loss(double distance, double wavelength);

// Per-link angles for the far-field model.
struct FarfieldAngles
{
    std::vector<AngleSet> tx; // arrival at the surface (departure field = Tx ULA angle)
    AngleSet rx;              // departure from the surface toward the Rx
};

// Arrival angles derived from the scenario geometry.
FarfieldAngles farfield_angles(const Scenario &scenario);

// `constant_loss` replaces the free-space model when given.
ChannelSet farfield_channels(const Scenario &scenario, const FarfieldAngles &angles,
                             std::optional<double> constant_loss = std::nullopt);
ChannelSet nearfield_channels(const Scenario &scenario, std::optional<double> constant_loss = std::nullopt);

CVec mrt_beamformer(double varpi, double power, std::size_t m);

// g_i = sqrt(loss_tx_i * loss_rx) h^T Theta G_i v_i, one entry per Tx.
std::vector<cplx> effective_gain(const ChannelSet &channels, const ReflectionConfig &reflection,
                                 const std::vector<CVec> &beamformers);

} // namespace riss
