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

#include "riss/link.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>

namespace riss {

void FrameConfig::validate() const
{
    if (data_bits == 0 || head_bits < 10 || data_bits % 2 != 0 || head_bits % 2 != 0)
        throw std::invalid_argument("FrameConfig: bit counts must be even, head at least 10 bits");
    if (sps == 0 || span == 0)
        throw std::invalid_argument("FrameConfig: sps and span must be positive");
    if (std::abs(symbol_rate * double(sps) - sample_rate) > 1e-6 * sample_rate)
        throw std::invalid_argument("FrameConfig: sample rate must equal symbol rate times sps");
    if (!(rolloff >= 0.0 && rolloff <= 1.0))
        throw std::invalid_argument("FrameConfig: roll-off must lie in [0, 1]");
}

Bits sync_head(int transmitter, std::size_t length)
{
    static const Bits prefix1 = {1, 0, 1, 0, 1, 1, 0, 1, 0, 1};
    static const Bits prefix2 = {1, 0, 0, 0, 1, 1, 0, 0, 0, 1};
    if (transmitter != 1 && transmitter != 2)
        throw std::invalid_argument("sync_head: transmitter must be 1 or 2");
    if (length < prefix1.size())
        throw std::invalid_argument("sync_head: head shorter than the fixed prefix");

    Bits head = transmitter == 1 ? prefix1 : prefix2;
    // Degree-9 Fibonacci LFSRs, period 511.
    const std::vector<int> taps = transmitter == 1 ? std::vector<int>{9, 5} : std::vector<int>{9, 6, 4, 3};
    unsigned state = transmitter == 1 ? 0x1ffu : 0x0a5u;
    while (head.size() < length)
    {
        unsigned fb = 0;
        for (int t : taps)
            fb ^= (state >> (t - 1)) & 1u;
        state = ((state << 1) | fb) & 0x1ffu;
        head.push_back(std::uint8_t(fb));
    }
    return head;
}

CVec qpsk_map(const Bits &bits)
{
    if (bits.size() % 2 != 0)
        throw std::invalid_argument("qpsk_map: odd bit count");
    const double s = 1.0 / std::sqrt(2.0);
    CVec out(Eigen::Index(bits.size() / 2));
    for (std::size_t k = 0; k < bits.size() / 2; ++k)
        out(Eigen::Index(k)) = cplx(s * (1.0 - 2.0 * bits[2 * k]), s * (1.0 - 2.0 * bits[2 * k + 1]));
    return out;
}

Bits qpsk_demap(const CVec &symbols)
{
    Bits out;
    out.reserve(std::size_t(symbols.size()) * 2);
    for (const auto &z : symbols)
    {
        out.push_back(z.real() < 0.0 ? 1 : 0);
        out.push_back(z.imag() < 0.0 ? 1 : 0);
    }
    return out;
}

CVec build_frame(const Bits &data, const Bits &head, const FrameConfig &cfg)
{
    if (data.size() != cfg.data_bits)
        throw std::invalid_argument("build_frame: data length differs from the frame configuration");
    if (head.size() != cfg.head_bits)
        throw std::invalid_argument("build_frame: head length differs from the frame configuration");
    Bits bits;
    bits.reserve(2 * head.size() + data.size());
    bits.insert(bits.end(), head.begin(), head.end());
    for (auto b : head)
        bits.push_back(std::uint8_t(b ^ 1u));
    bits.insert(bits.end(), data.begin(), data.end());
    return qpsk_map(bits);
}

RVec rrc_taps(std::size_t sps, std::size_t span, double rolloff)
{
    if (!(rolloff >= 0.0 && rolloff <= 1.0))
        throw std::invalid_argument("rrc_taps: roll-off must lie in [0, 1]");
    if (sps == 0 || span == 0)
        throw std::invalid_argument("rrc_taps: sps and span must be positive");
    const std::size_t n = span * sps + 1;
    const double b = rolloff;
    RVec h(Eigen::Index(n), 1);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double t = (double(i) - 0.5 * double(span * sps)) / double(sps);
        double v;
        if (std::abs(t) < 1e-12)
            v = 1.0 - b + 4.0 * b / pi;
        else if (b > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9)
            v = b / std::sqrt(2.0) *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
        else
            v = (std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b))) /
                (pi * t * (1.0 - (4.0 * b * t) * (4.0 * b * t)));
        h(Eigen::Index(i)) = v;
    }
    return h / h.norm();
}

CVec head_waveform(const Bits &head, const RVec &taps, std::size_t sps)
{
    Bits bits = head;
    for (auto b : head)
        bits.push_back(std::uint8_t(b ^ 1u));
    return modulate(qpsk_map(bits), taps, sps);
}

CVec convolve(const CVec &x, const RVec &taps)
{
    if (x.size() == 0 || taps.size() == 0)
        return CVec();
    const Eigen::Index n = x.size() + taps.size() - 1;
    CVec y = CVec::Zero(n);
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        const cplx xi = x(i);
        if (xi == cplx(0.0, 0.0))
            continue;
        y.segment(i, taps.size()) += xi * taps.cast<cplx>();
    }
    return y;
}

CVec modulate(const CVec &symbols, const RVec &taps, std::size_t sps)
{
    if (sps == 0)
        throw std::invalid_argument("modulate: sps must be positive");
    CVec up = CVec::Zero(symbols.size() * Eigen::Index(sps));
    for (Eigen::Index k = 0; k < symbols.size(); ++k)
        up(k * Eigen::Index(sps)) = symbols(k);
    return convolve(up, taps);
}

CVec apply_channel(const std::vector<CVec> &waveforms, const std::vector<cplx> &gains, double noise_power, Rng &rng)
{
    if (waveforms.empty() || waveforms.size() != gains.size())
        throw std::invalid_argument("apply_channel: one gain per waveform required");
    const Eigen::Index n = waveforms.front().size();
    for (const auto &w : waveforms)
        if (w.size() != n)
            throw std::invalid_argument("apply_channel: waveform lengths differ");
    if (!(noise_power >= 0.0))
        throw std::invalid_argument("apply_channel: noise power must be non-negative");

    CVec y = CVec::Zero(n);
    for (std::size_t i = 0; i < waveforms.size(); ++i)
        y += gains[i] * waveforms[i];
    if (noise_power > 0.0)
        for (Eigen::Index k = 0; k < n; ++k)
            y(k) += rng.complex_normal(noise_power);
    return y;
}

RVec normalized_xcorr(const CVec &received, const CVec &reference)
{
    const Eigen::Index lr = received.size();
    const Eigen::Index lh = reference.size();
    if (lh == 0 || lr < lh)
        return RVec();

    Eigen::Index nfft = 1;
    while (nfft < lr + lh)
        nfft <<= 1;

    Eigen::FFT<double> fft;
    std::vector<cplx> a(std::size_t(nfft), cplx(0.0, 0.0));
    std::vector<cplx> b(std::size_t(nfft), cplx(0.0, 0.0));
    std::copy(received.data(), received.data() + lr, a.begin());
    std::copy(reference.data(), reference.data() + lh, b.begin());
    std::vector<cplx> fa, fb, c;
    fft.fwd(fa, a);
    fft.fwd(fb, b);
    for (std::size_t k = 0; k < fa.size(); ++k)
        fa[k] *= std::conj(fb[k]);
    fft.inv(c, fa);

    std::vector<double> energy(std::size_t(lr) + 1, 0.0);
    for (Eigen::Index k = 0; k < lr; ++k)
        energy[std::size_t(k) + 1] = energy[std::size_t(k)] + std::norm(received(k));

    const double href = reference.norm();
    const Eigen::Index lags = lr - lh + 1;
    RVec out(lags);
    for (Eigen::Index lag = 0; lag < lags; ++lag)
    {
        const double e = energy[std::size_t(lag + lh)] - energy[std::size_t(lag)];
        const double denom = href * std::sqrt(std::max(e, 0.0));
        out(lag) = denom > 0.0 ? std::abs(c[std::size_t(lag)]) / denom : 0.0;
    }
    return out;
}

std::optional<SyncPeak> frame_sync(const CVec &received, const CVec &head_waveform, double threshold)
{
    const RVec c = normalized_xcorr(received, head_waveform);
    if (c.size() == 0)
        return std::nullopt;
    Eigen::Index best = 0;
    const double peak = c.maxCoeff(&best);
    if (!(peak >= threshold))
        return std::nullopt;
    return SyncPeak{std::size_t(best), peak};
}

CVec cascade_equalizer(const RVec &taps, std::size_t sps, std::size_t K)
{
    // Symbol-spaced response of the transmit/receive cascade.
    const CVec cascade = convolve(taps.cast<cplx>(), taps);
    const Eigen::Index centre = taps.size() - 1;
    const Eigen::Index s = Eigen::Index(sps);
    const Eigen::Index J = centre / s;
    RVec c(2 * J + 1);
    for (Eigen::Index j = -J; j <= J; ++j)
        c(j + J) = cascade(centre + j * s).real();

    // Least squares: conv(e, c) ~ delta at the centre of the combined response.
    const Eigen::Index ne = 2 * Eigen::Index(K) + 1;
    const Eigen::Index nout = ne + c.size() - 1;
    RMat A = RMat::Zero(nout, ne);
    for (Eigen::Index i = 0; i < ne; ++i)
        A.col(i).segment(i, c.size()) = c;
    RVec target = RVec::Zero(nout);
    target(Eigen::Index(K) + J) = 1.0;
    const RVec e = A.colPivHouseholderQr().solve(target);
    return e.cast<cplx>();
}

Demodulated demodulate(const CVec &received, std::size_t offset, const RVec &taps, const FrameConfig &cfg,
                       const Bits &head, std::size_t frames)
{
    cfg.validate();
    const CVec mf = convolve(received, taps);
    const CVec eq = cascade_equalizer(taps, cfg.sps);
    const Eigen::Index K = (eq.size() - 1) / 2;
    const Eigen::Index nsym = Eigen::Index(frames * cfg.symbols_per_frame());
    const Eigen::Index delay = taps.size() - 1;

    // Symbol-instant samples with K guard symbols on either side for the equalizer.
    CVec z = CVec::Zero(nsym + 2 * K);
    for (Eigen::Index k = -K; k < nsym + K; ++k)
    {
        const long long idx = (long long)offset + delay + k * Eigen::Index(cfg.sps);
        if (idx >= 0 && idx < mf.size())
            z(k + K) = mf(Eigen::Index(idx));
    }
    CVec u(nsym);
    for (Eigen::Index k = 0; k < nsym; ++k)
    {
        cplx acc(0.0, 0.0);
        for (Eigen::Index j = 0; j < eq.size(); ++j)
            acc += eq(j) * z(k + 2 * K - j);
        u(k) = acc;
    }

    Bits pilot_bits = head;
    for (auto b : head)
        pilot_bits.push_back(std::uint8_t(b ^ 1u));
    const CVec pilots = qpsk_map(pilot_bits);

    Demodulated out;
    const Eigen::Index per_frame = Eigen::Index(cfg.symbols_per_frame());
    const Eigen::Index np = pilots.size();
    for (std::size_t f = 0; f < frames; ++f)
    {
        const Eigen::Index base = Eigen::Index(f) * per_frame;
        const cplx num = pilots.adjoint() * u.segment(base, np);
        const double den = pilots.squaredNorm();
        cplx g = num / den;
        if (std::abs(g) == 0.0)
            g = cplx(1.0, 0.0);
        CVec d = u.segment(base + np, per_frame - np) / g;
        out.data_bits.push_back(qpsk_demap(d));
        out.data_symbols.push_back(std::move(d));
        out.gains.push_back(g);
    }
    return out;
}

double evm(const CVec &received, const CVec &ideal)
{
    if (received.size() == 0 || received.size() != ideal.size())
        throw std::invalid_argument("evm: inputs must be non-empty and of equal length");
    const double ref = ideal.squaredNorm();
    if (!(ref > 0.0))
        throw std::invalid_argument("evm: ideal symbols have zero energy");
    return 100.0 * std::sqrt((received - ideal).squaredNorm() / ref);
}

LinkResult simulate_link(const LinkScenario &sc, std::uint64_t seed)
{
    const FrameConfig &cfg = sc.frame;
    cfg.validate();
    const RVec taps = rrc_taps(cfg.sps, cfg.span, cfg.rolloff);
    const Bits head_t = sync_head(2, cfg.head_bits);
    const Bits head_i = sync_head(1, cfg.head_bits);

    Rng data_rng(derive_seed(seed, "link/data"));
    Rng timing_rng(derive_seed(seed, "link/timing"));
    Rng noise_rng(derive_seed(seed, "link/noise"));

    auto random_bits = [&](std::size_t n) {
        Bits b(n);
        for (auto &x : b)
            x = std::uint8_t(data_rng.bit());
        return b;
    };

    // Target: `frames` frames after a random lead-in of silence.
    const std::size_t lead = std::size_t(timing_rng.uniform() * 2000.0);
    std::vector<Bits> tx_data;
    CVec tsym(Eigen::Index(sc.frames * cfg.symbols_per_frame()));
    for (std::size_t f = 0; f < sc.frames; ++f)
    {
        tx_data.push_back(random_bits(cfg.data_bits));
        tsym.segment(Eigen::Index(f * cfg.symbols_per_frame()), Eigen::Index(cfg.symbols_per_frame())) =
            build_frame(tx_data.back(), head_t, cfg);
    }
    const CVec tw = modulate(tsym, taps, cfg.sps);
    const Eigen::Index total = Eigen::Index(lead) + tw.size() + Eigen::Index(cfg.samples_per_frame() / 4);
    CVec xt = CVec::Zero(total);
    if (sc.target_on)
        xt.segment(Eigen::Index(lead), tw.size()) = tw;

    // Interferer: continuous frame stream with an independent timing offset.
    const std::size_t ifr = sc.frames + 2;
    CVec isym(Eigen::Index(ifr * cfg.symbols_per_frame()));
    for (std::size_t f = 0; f < ifr; ++f)
        isym.segment(Eigen::Index(f * cfg.symbols_per_frame()), Eigen::Index(cfg.symbols_per_frame())) =
            build_frame(random_bits(cfg.data_bits), head_i, cfg);
    const CVec iw = modulate(isym, taps, cfg.sps);
    const Eigen::Index ioff = Eigen::Index(timing_rng.uniform() * double(cfg.samples_per_frame()));
    const CVec xi = iw.segment(ioff, total);

    const CVec clean = sc.target_gain * xt + sc.interferer_gain * xi;
    LinkResult res;
    res.rx_power = clean.squaredNorm() / double(total);
    const CVec y = apply_channel({xt, xi}, {sc.target_gain, sc.interferer_gain}, sc.noise_power, noise_rng);

    if (!sc.target_on)
        return res;

    // Lock to the first complete head: search one frame period plus the reference length.
    const CVec head_wave = head_waveform(head_t, taps, cfg.sps);
    const Eigen::Index window = std::min<Eigen::Index>(y.size(), Eigen::Index(cfg.samples_per_frame()) + head_wave.size());
    const auto sync = frame_sync(y.head(window), head_wave);
    if (!sync)
        return res;
    res.synced = true;

    const std::size_t frames_avail =
        std::min<std::size_t>(sc.frames, (std::size_t(y.size()) - sync->offset) / cfg.samples_per_frame());
    const Demodulated dem = demodulate(y, sync->offset, taps, cfg, head_t, frames_avail);

    const Eigen::Index nd = Eigen::Index(cfg.data_bits / 2);
    res.received.resize(Eigen::Index(frames_avail) * nd);
    res.ideal.resize(Eigen::Index(frames_avail) * nd);
    for (std::size_t f = 0; f < frames_avail; ++f)
    {
        res.received.segment(Eigen::Index(f) * nd, nd) = dem.data_symbols[f];
        res.ideal.segment(Eigen::Index(f) * nd, nd) = qpsk_map(tx_data[f]);
        for (std::size_t b = 0; b < cfg.data_bits; ++b)
            res.bit_errors += dem.data_bits[f][b] != tx_data[f][b];
    }
    if (frames_avail == 0)
    {
        res.synced = false;
        return res;
    }
    res.evm_percent = evm(res.received, res.ideal);
    res.sinr_db = -20.0 * std::log10(std::max(res.evm_percent, 1e-12) / 100.0);
    return res;
}

} // namespace riss
