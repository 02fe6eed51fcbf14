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

#include "riss/sensing.hpp"
#include "riss/link.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace riss {

CVec ula_steering(double theta, std::size_t na, double spacing_ratio)
{
    if (na == 0)
        throw std::invalid_argument("ula_steering: count must be positive");
    const double psi = two_pi * spacing_ratio * std::sin(theta);
    CVec a(Eigen::Index(na), 1);
    for (std::size_t n = 0; n < na; ++n)
        a(Eigen::Index(n)) = std::polar(1.0, -double(n) * psi);
    return a;
}

SnapshotBlock synth_snapshots(const std::vector<double> &angles, const std::vector<double> &powers, double noise_power,
                              std::size_t n, std::size_t na, double spacing_ratio, Rng &rng)
{
    if (angles.size() != powers.size())
        throw std::invalid_argument("synth_snapshots: one power per source required");
    if (angles.size() >= na)
        throw std::invalid_argument("synth_snapshots: source count must be below the array size");
    if (n == 0)
        throw std::invalid_argument("synth_snapshots: at least one snapshot required");

    SnapshotBlock block;
    block.X = CMat::Zero(Eigen::Index(na), Eigen::Index(n));
    for (std::size_t k = 0; k < angles.size(); ++k)
    {
        const CVec a = ula_steering(angles[k], na, spacing_ratio);
        for (std::size_t s = 0; s < n; ++s)
            block.X.col(Eigen::Index(s)) += rng.complex_normal(powers[k]) * a;
    }
    if (noise_power > 0.0)
        for (Eigen::Index s = 0; s < block.X.cols(); ++s)
            for (Eigen::Index r = 0; r < block.X.rows(); ++r)
                block.X(r, s) += rng.complex_normal(noise_power);
    block.true_angles = angles;
    block.true_powers = powers;
    block.noise_power = noise_power;
    return block;
}

SnapshotBlock synth_snapshots_from_waveforms(const std::vector<double> &angles, const std::vector<CVec> &waveforms,
                                             const std::vector<cplx> &amplitudes, double noise_power, std::size_t na,
                                             double spacing_ratio, Rng &rng)
{
    if (angles.size() != waveforms.size() || angles.size() != amplitudes.size())
        throw std::invalid_argument("synth_snapshots_from_waveforms: one waveform and amplitude per source required");
    if (angles.empty() || angles.size() >= na)
        throw std::invalid_argument("synth_snapshots_from_waveforms: source count must lie in [1, na)");
    const Eigen::Index n = waveforms.front().size();
    for (const auto &w : waveforms)
        if (w.size() != n)
            throw std::invalid_argument("synth_snapshots_from_waveforms: waveform lengths differ");

    SnapshotBlock block;
    block.X = CMat::Zero(Eigen::Index(na), n);
    for (std::size_t k = 0; k < angles.size(); ++k)
    {
        const CVec a = ula_steering(angles[k], na, spacing_ratio);
        block.X.noalias() += a * (amplitudes[k] * waveforms[k]).transpose();
        block.true_powers.push_back(std::norm(amplitudes[k]) * waveforms[k].squaredNorm() / double(std::max<Eigen::Index>(n, 1)));
    }
    if (noise_power > 0.0)
        for (Eigen::Index s = 0; s < n; ++s)
            for (Eigen::Index r = 0; r < block.X.rows(); ++r)
                block.X(r, s) += rng.complex_normal(noise_power);
    block.true_angles = angles;
    block.noise_power = noise_power;
    return block;
}

GateRange energy_gate(const CMat &X, Eigen::Index window)
{
    const Eigen::Index n = X.cols();
    if (n == 0)
        return {};
    window = std::clamp<Eigen::Index>(window, 1, n);
    const RVec p = X.colwise().squaredNorm().transpose();
    std::vector<double> prefix(std::size_t(n) + 1, 0.0);
    for (Eigen::Index k = 0; k < n; ++k)
        prefix[std::size_t(k) + 1] = prefix[std::size_t(k)] + p(k);

    // Centred moving average, truncated at the edges.
    std::vector<double> smooth(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k)
    {
        const Eigen::Index lo = std::max<Eigen::Index>(0, k - window / 2);
        const Eigen::Index hi = std::min<Eigen::Index>(n, lo + window);
        smooth[std::size_t(k)] = (prefix[std::size_t(hi)] - prefix[std::size_t(lo)]) / double(hi - lo);
    }
    std::vector<double> sorted = smooth;
    std::nth_element(sorted.begin(), sorted.begin() + std::ptrdiff_t(n / 2), sorted.end());
    const double cut = 0.5 * sorted[std::size_t(n / 2)];

    GateRange g{0, n};
    while (g.first < n && smooth[std::size_t(g.first)] < cut)
        ++g.first;
    while (g.last > g.first && smooth[std::size_t(g.last - 1)] < cut)
        --g.last;
    return g;
}

CMat sample_covariance(const CMat &X)
{
    if (X.cols() == 0)
        throw std::invalid_argument("sample_covariance: no snapshots");
    CMat R = (X * X.adjoint()) / double(X.cols());
    return 0.5 * (R + R.adjoint());
}

SubspaceDecomposition decompose(const CMat &R, std::size_t K)
{
    const Eigen::Index na = R.rows();
    if (R.cols() != na)
        throw std::invalid_argument("decompose: covariance must be square");
    if (Eigen::Index(K) >= na)
        throw std::invalid_argument("decompose: source count leaves an empty noise subspace");

    Eigen::SelfAdjointEigenSolver<CMat> es(R);
    if (es.info() != Eigen::Success)
        throw NumericalError("decompose: eigen-decomposition failed");
    // Eigen returns ascending order; flip to descending.
    SubspaceDecomposition dec;
    dec.R = R;
    dec.eigenvalues = es.eigenvalues().reverse();
    const CMat V = es.eigenvectors().rowwise().reverse();
    dec.signal = V.leftCols(Eigen::Index(K));
    dec.noise = V.rightCols(na - Eigen::Index(K));
    return dec;
}

RVec music_spectrum(const SubspaceDecomposition &dec, const RVec &grid, double spacing_ratio)
{
    if (dec.noise.cols() == 0)
        throw std::invalid_argument("music_spectrum: empty noise subspace");
    if (grid.size() == 0)
        throw std::invalid_argument("music_spectrum: empty grid");
    const std::size_t na = std::size_t(dec.noise.rows());
    RVec p(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g)
    {
        const CVec a = ula_steering(grid(g), na, spacing_ratio);
        p(g) = 1.0 / ((dec.noise.adjoint() * a).squaredNorm() + 1e-12);
    }
    return p;
}

RVec angle_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo))
        throw std::invalid_argument("angle_grid: need step > 0 and hi >= lo");
    const auto n = Eigen::Index(std::floor((hi - lo) / step + 1e-9)) + 1;
    RVec g(n);
    for (Eigen::Index k = 0; k < n; ++k)
        g(k) = lo + double(k) * step;
    return g;
}

std::vector<double> music_estimate(const RVec &grid, const RVec &spectrum, std::size_t K, double min_prominence_db)
{
    if (grid.size() != spectrum.size() || grid.size() < 3)
        throw std::invalid_argument("music_estimate: grid and spectrum must agree and hold at least 3 points");
    const Eigen::Index n = spectrum.size();
    RVec db(n);
    for (Eigen::Index k = 0; k < n; ++k)
        db(k) = db10(spectrum(k));

    struct Peak
    {
        Eigen::Index index;
        double height;
    };
    std::vector<Peak> peaks;
    for (Eigen::Index k = 1; k + 1 < n; ++k)
    {
        if (!(db(k) > db(k - 1) && db(k) >= db(k + 1)))
            continue;
        // Prominence: height above the higher of the two bases reached before a taller point.
        double left = db(k);
        for (Eigen::Index j = k - 1; j >= 0 && db(j) <= db(k); --j)
            left = std::min(left, db(j));
        double right = db(k);
        for (Eigen::Index j = k + 1; j < n && db(j) <= db(k); ++j)
            right = std::min(right, db(j));
        if (db(k) - std::max(left, right) >= min_prominence_db)
            peaks.push_back({k, db(k)});
    }
    if (peaks.size() < K)
        throw UnresolvableSources("music_estimate: fewer resolvable peaks than sources");

    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak &a, const Peak &b) { return a.height > b.height; });
    std::vector<double> out;
    for (std::size_t i = 0; i < K; ++i)
    {
        const Eigen::Index k = peaks[i].index;
        const double ym = db(k - 1), y0 = db(k), yp = db(k + 1);
        const double curv = ym - 2.0 * y0 + yp;
        double delta = curv < 0.0 ? 0.5 * (ym - yp) / curv : 0.0;
        delta = std::clamp(delta, -0.5, 0.5);
        const double step = grid(k + 1) - grid(k);
        out.push_back(grid(k) + delta * step);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> root_music(const SubspaceDecomposition &dec, std::size_t K, double spacing_ratio)
{
    const Eigen::Index na = dec.noise.rows();
    if (Eigen::Index(K) >= na || dec.noise.cols() == 0)
        throw std::invalid_argument("root_music: source count must be below the array size");

    // a^H C a on the unit circle equals sum_l c_l z^l with c_l the l-th diagonal sum of C.
    const CMat C = dec.noise * dec.noise.adjoint();
    const Eigen::Index deg = 2 * (na - 1);
    CVec coef = CVec::Zero(deg + 1); // coef(j) multiplies z^j
    for (Eigen::Index m = 0; m < na; ++m)
        for (Eigen::Index n = 0; n < na; ++n)
            coef(n - m + na - 1) += C(m, n);

    // Companion matrix of the monic polynomial.
    const cplx lead = coef(deg);
    CMat comp = CMat::Zero(deg, deg);
    for (Eigen::Index j = 0; j < deg; ++j)
        comp(0, j) = -coef(deg - 1 - j) / lead;
    for (Eigen::Index j = 1; j < deg; ++j)
        comp(j, j - 1) = 1.0;
    Eigen::ComplexEigenSolver<CMat> ces(comp, false);
    if (ces.info() != Eigen::Success)
        throw NumericalError("root_music: polynomial rooting failed");

    std::vector<cplx> inside;
    for (Eigen::Index j = 0; j < deg; ++j)
        if (std::abs(ces.eigenvalues()(j)) <= 1.0 + 1e-9)
            inside.push_back(ces.eigenvalues()(j));
    if (inside.size() < K)
        throw UnresolvableSources("root_music: too few roots inside the unit circle");
    std::stable_sort(inside.begin(), inside.end(),
                     [](cplx a, cplx b) { return 1.0 - std::abs(a) < 1.0 - std::abs(b); });

    std::vector<double> out;
    const double span = two_pi * spacing_ratio;
    for (std::size_t i = 0; i < K; ++i)
    {
        // z = exp(-i psi) in the steering convention.
        const double psi = -std::arg(inside[i]);
        int valid = 0;
        double s_valid = 0.0;
        for (int wrap = -2; wrap <= 2; ++wrap)
        {
            const double s = (psi + two_pi * wrap) / span;
            if (std::abs(s) <= 1.0)
            {
                ++valid;
                if (wrap == 0 || valid == 1)
                    s_valid = s;
            }
        }
        if (valid != 1)
            throw UnresolvableSources("root_music: root maps to more than one arrival angle at this spacing");
        out.push_back(std::asin(s_valid));
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

CMat loaded(const CMat &R, bool diagonal_loading)
{
    CMat Rl = 0.5 * (R + R.adjoint());
    if (diagonal_loading)
        Rl.diagonal().array() += 1e-6 * R.trace().real() / double(R.rows());
    return Rl;
}

Eigen::LLT<CMat> factor(const CMat &R, bool diagonal_loading, const char *who)
{
    if (R.rows() != R.cols() || R.rows() == 0)
        throw std::invalid_argument(std::string(who) + ": covariance must be square and non-empty");
    Eigen::LLT<CMat> llt(loaded(R, diagonal_loading));
    if (llt.info() != Eigen::Success)
        throw NumericalError(std::string(who) + ": covariance is not positive definite");
    if (!diagonal_loading)
    {
        const RVec d = llt.matrixLLT().diagonal().real();
        if (d.minCoeff() <= 1e-12 * d.maxCoeff())
            throw NumericalError(std::string(who) + ": covariance is singular; enable diagonal loading");
    }
    return llt;
}

} // namespace

CVec mvdr_weights(const CMat &R, const CVec &a0, bool diagonal_loading)
{
    if (a0.size() != R.rows())
        throw std::invalid_argument("mvdr_weights: steering length differs from the covariance size");
    const auto llt = factor(R, diagonal_loading, "mvdr_weights");
    const CVec Ria = llt.solve(a0);
    const cplx denom = a0.dot(Ria); // a0^H R^-1 a0
    return Ria / denom;
}

CVec lcmv_weights(const CMat &R, const CVec &a0, const CVec &a1, bool diagonal_loading)
{
    if (a0.size() != R.rows() || a1.size() != R.rows())
        throw std::invalid_argument("lcmv_weights: steering length differs from the covariance size");
    const auto llt = factor(R, diagonal_loading, "lcmv_weights");
    CMat C(R.rows(), 2);
    C.col(0) = a0;
    C.col(1) = a1;
    const CMat RiC = llt.solve(C);
    const CMat gram = C.adjoint() * RiC;
    Eigen::Vector2cd f(1.0, 0.0);
    const Eigen::Vector2cd mix = gram.fullPivLu().solve(f);
    return RiC * mix;
}

CVec spatial_filter(const CMat &X, const CVec &w)
{
    if (w.size() != X.rows())
        throw std::invalid_argument("spatial_filter: weight length differs from the array size");
    return (w.adjoint() * X).transpose();
}

HeadClassification classify_sync_head(const CVec &stream, const std::vector<CVec> &head_waveforms, double threshold)
{
    if (head_waveforms.empty())
        throw std::invalid_argument("classify_sync_head: no heads given");
    HeadClassification out;
    for (const auto &h : head_waveforms)
    {
        const RVec c = normalized_xcorr(stream, h);
        out.peaks.push_back(c.size() ? c.maxCoeff() : 0.0);
    }
    const auto best = std::max_element(out.peaks.begin(), out.peaks.end());
    if (*best < threshold)
        return out;
    out.label = int(best - out.peaks.begin());
    double runner = 0.0;
    for (std::size_t i = 0; i < out.peaks.size(); ++i)
        if (int(i) != out.label)
            runner = std::max(runner, out.peaks[i]);
    out.confidence = runner > 0.0 ? *best / runner : std::numeric_limits<double>::infinity();
    return out;
}

} // namespace riss
