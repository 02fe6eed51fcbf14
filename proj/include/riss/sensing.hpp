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

#include "riss/rng.hpp"
#include "riss/types.hpp"

#include <cstddef>
#include <vector>

namespace riss {

// Snapshots of the active sensing ULA.
struct SnapshotBlock
{
    CMat X;                          // na x n
    std::vector<double> true_angles; // radians, empty when not synthesized
    std::vector<double> true_powers; // linear
    double noise_power = 0.0;
};

// ULA response a_n = exp(-i n psi), psi = 2 pi (d_a / lambda) sin(theta). Entries have unit modulus.
CVec ula_steering(double theta, std::size_t na, double spacing_ratio);

// X = A S + noise with independent CN(0, p_k) source rows and CN(0, noise) noise.
SnapshotBlock synth_snapshots(const std::vector<double> &angles, const std::vector<double> &powers, double noise_power,
                              std::size_t n, std::size_t na, double spacing_ratio, Rng &rng);

// Same model with deterministic source rows (e.g. shaped QPSK frames), scaled by `amplitudes`.
SnapshotBlock synth_snapshots_from_waveforms(const std::vector<double> &angles, const std::vector<CVec> &waveforms,
                                             const std::vector<cplx> &amplitudes, double noise_power, std::size_t na,
                                             double spacing_ratio, Rng &rng);

// Column range [first, last) of the steady part: smoothed per-snapshot power above half the median.
struct GateRange
{
    Eigen::Index first = 0;
    Eigen::Index last = 0;
};
GateRange energy_gate(const CMat &X, Eigen::Index window = 64);

CMat sample_covariance(const CMat &X);

struct SubspaceDecomposition
{
    CMat R;
    CMat signal;      // na x K
    CMat noise;       // na x (na - K)
    RVec eigenvalues; // descending
};

SubspaceDecomposition decompose(const CMat &R, std::size_t K);

// 1 / (|E_z^H a(theta)|^2 + 1e-12) over `grid` (radians).
RVec music_spectrum(const SubspaceDecomposition &dec, const RVec &grid, double spacing_ratio);

// Uniform grid from lo to hi (radians) with the given step.
RVec angle_grid(double lo, double hi, double step);

class UnresolvableSources : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

// K strongest local maxima with at least `min_prominence_db` prominence, parabolic refinement
// in dB, returned in ascending angle order. Throws UnresolvableSources when fewer than K qualify.
std::vector<double> music_estimate(const RVec &grid, const RVec &spectrum, std::size_t K,
                                   double min_prominence_db = 3.0);

// Polynomial rooting on the diagonal sums of E_z E_z^H. Throws UnresolvableSources when a
// selected root has more than one alias inside [-pi/2, pi/2] for the given spacing.
std::vector<double> root_music(const SubspaceDecomposition &dec, std::size_t K, double spacing_ratio);

// w = R^-1 a0 / (a0^H R^-1 a0). Loading adds 1e-6 trace(R) / na to the diagonal first;
// without loading a singular R throws.
CVec mvdr_weights(const CMat &R, const CVec &a0, bool diagonal_loading = true);

// Distortionless toward a0 with a null toward a1 (response [1, 0]).
CVec lcmv_weights(const CMat &R, const CVec &a0, const CVec &a1, bool diagonal_loading = true);

// y = w^H X.
CVec spatial_filter(const CMat &X, const CVec &w);

struct HeadClassification
{
    int label = -1;          // index into the head list, -1 for unknown
    double confidence = 0.0; // best peak / runner-up peak
    std::vector<double> peaks;
};

// Normalized matched-filter peak against each shaped head; all below `threshold` gives unknown.
HeadClassification classify_sync_head(const CVec &stream, const std::vector<CVec> &head_waveforms,
                                      double threshold = 0.12);

} // namespace riss
