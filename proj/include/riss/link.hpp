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
#include <cstdint>
#include <optional>
#include <vector>

namespace riss {

using Bits = std::vector<std::uint8_t>;

struct FrameConfig
{
    std::size_t data_bits = 5000;
    std::size_t head_bits = 500;
    double symbol_rate = 100e3;
    double sample_rate = 1.6e6;
    std::size_t sps = 16;
    std::size_t span = 16; // filter span in symbols
    double rolloff = 0.15;

    std::size_t head_symbols() const { return head_bits / 2; }
    std::size_t symbols_per_frame() const { return (2 * head_bits + data_bits) / 2; }
    std::size_t samples_per_frame() const { return symbols_per_frame() * sps; }

    // Even bit counts, fs = Rb * sps, roll-off in [0, 1].
    void validate() const;
};

// Synchronization head of transmitter 1 or 2. The first ten bits are the fixed prefixes
// 1010110101 / 1000110001; the remainder is a maximal-length sequence distinct per head.
Bits sync_head(int transmitter, std::size_t length = 500);

// Gray QPSK: (b0, b1) -> ((1 - 2 b0) + i (1 - 2 b1)) / sqrt(2).
CVec qpsk_map(const Bits &bits);
Bits qpsk_demap(const CVec &symbols);

// Symbols of H, ~H and D back to back.
CVec build_frame(const Bits &data, const Bits &head, const FrameConfig &cfg);

// Root-raised-cosine, span * sps + 1 taps, unit energy.
RVec rrc_taps(std::size_t sps, std::size_t span, double rolloff);

// Zero-stuff by sps and filter; output length symbols * sps + taps - 1.
CVec modulate(const CVec &symbols, const RVec &taps, std::size_t sps);

// Shaped H followed by ~H; the reference for synchronization and head classification. A lone H
// would correlate equally well with the sign-flipped ~H block.
CVec head_waveform(const Bits &head, const RVec &taps, std::size_t sps);

// Full linear convolution.
CVec convolve(const CVec &x, const RVec &taps);

// y = sum_i g_i x_i + CN(0, noise_power).
CVec apply_channel(const std::vector<CVec> &waveforms, const std::vector<cplx> &gains, double noise_power, Rng &rng);

// |sum_n r[lag + n] conj(h[n])| / (|h| |r[lag : lag + len(h)]|) for lag = 0 .. len(r) - len(h).
RVec normalized_xcorr(const CVec &received, const CVec &reference);

struct SyncPeak
{
    std::size_t offset = 0;
    double peak = 0.0;
};

// Best-aligned lag of the shaped head, or nullopt when the peak stays below threshold.
// Searches the whole input; callers wanting the first frame pass a window of one frame.
std::optional<SyncPeak> frame_sync(const CVec &received, const CVec &head_waveform, double threshold = 0.12);

// Symbol-rate zero-forcing equalizer for the RRC cascade, least squares with 2 K + 1 taps.
CVec cascade_equalizer(const RVec &taps, std::size_t sps, std::size_t K = 16);

struct Demodulated
{
    std::vector<CVec> data_symbols; // per frame, |D| / 2 each
    std::vector<Bits> data_bits;
    std::vector<cplx> gains; // head-aided complex gain per frame
};

// Matched filter, symbol-instant sampling, cascade equalizer, per-frame least-squares gain
// from the known H and ~H symbols, hard decisions.
Demodulated demodulate(const CVec &received, std::size_t offset, const RVec &taps, const FrameConfig &cfg,
                       const Bits &head, std::size_t frames);

// 100 * rms(received - ideal) / rms(ideal).
double evm(const CVec &received, const CVec &ideal);

struct LinkResult
{
    CVec received;    // derotated data symbols, all frames
    CVec ideal;       // transmitted data symbols
    double evm_percent = 0.0;
    double sinr_db = 0.0; // 1 / (evm / 100)^2
    std::size_t bit_errors = 0;
    bool synced = false;
    double rx_power = 0.0; // mean |y|^2 of the noiseless received waveform over the frames
};

struct LinkScenario
{
    cplx target_gain{1.0, 0.0};
    cplx interferer_gain{0.0, 0.0};
    double noise_power = 0.0;
    std::size_t frames = 2;
    FrameConfig frame;
    bool target_on = true;
};

// One seeded link realization: target frames carry head 2, interferer frames head 1 with an
// independent random timing offset.
LinkResult simulate_link(const LinkScenario &scenario, std::uint64_t seed);

} // namespace riss
