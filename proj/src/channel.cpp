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

#include "riss/channel.hpp"

#include <cmath>

namespace riss {

namespace {

double lattice_step(unsigned bits)
{
    return two_pi / double(std::size_t(1) << bits);
}

} // namespace

ReflectionConfig::ReflectionConfig(std::vector<double> phases, unsigned bits) : phases_(std::move(phases)), bits_(bits)
{
    if (bits_ > 16)
        throw std::invalid_argument("ReflectionConfig: at most 16 quantization bits");
    for (auto &p : phases_)
    {
        if (!std::isfinite(p))
            throw std::invalid_argument("ReflectionConfig: non-finite phase");
        p = wrap_phase(p);
    }
    if (bits_ > 0)
    {
        const double step = lattice_step(bits_);
        for (auto &p : phases_)
        {
            const double j = std::round(p / step);
            if (std::abs(p - j * step) > 1e-9)
                throw std::invalid_argument("ReflectionConfig: phase off the quantization lattice");
            p = wrap_phase(j * step);
        }
    }
}

ReflectionConfig ReflectionConfig::from_coefficients(const CVec &coefficients)
{
    std::vector<double> phases(std::size_t(coefficients.size()));
    for (Eigen::Index k = 0; k < coefficients.size(); ++k)
    {
        if (std::abs(coefficients(k)) == 0.0)
            throw std::invalid_argument("ReflectionConfig: zero coefficient has no phase");
        phases[std::size_t(k)] = std::arg(coefficients(k));
    }
    return ReflectionConfig(std::move(phases));
}

ReflectionConfig ReflectionConfig::identity(std::size_t n)
{
    return ReflectionConfig(std::vector<double>(n, 0.0));
}

CVec ReflectionConfig::diagonal() const
{
    CVec d(Eigen::Index(phases_.size()));
    for (std::size_t k = 0; k < phases_.size(); ++k)
        d(Eigen::Index(k)) = std::polar(1.0, phases_[k]);
    return d;
}

std::size_t ReflectionConfig::level(std::size_t k) const
{
    if (bits_ == 0)
        throw std::logic_error("ReflectionConfig::level: continuous configuration has no levels");
    const std::size_t levels = std::size_t(1) << bits_;
    return std::size_t(std::llround(phases_.at(k) / lattice_step(bits_))) % levels;
}

ReflectionConfig quantize_reflection(const ReflectionConfig &config, unsigned bits)
{
    if (bits == 0)
        throw std::invalid_argument("quantize_reflection: bits must be at least 1");
    const double step = lattice_step(bits);
    std::vector<double> out(config.size());
    for (std::size_t k = 0; k < config.size(); ++k)
    {
        const double x = config.phases()[k] / step;
        double j = std::floor(x);
        if (x - j > 0.5)
            j += 1.0;
        out[k] = j * step;
    }
    return ReflectionConfig(std::move(out), bits);
}

double path_loss(double distance, double wavelength)
{
    if (!(distance > 0.0))
        throw std::invalid_argument("path_loss: distance must be positive");
    const double a = wavelength / (4.0 * pi * distance);
    return a * a;
}

FarfieldAngles farfield_angles(const Scenario &scenario)
{
    FarfieldAngles angles;
    for (const auto &tx : scenario.transmitters)
    {
        Vec3 centre = Vec3::Zero();
        for (const auto &a : tx.antennas)
            centre += a;
        centre /= double(tx.antennas.size());
        angles.tx.push_back(AngleSet::toward(centre));
    }
    angles.rx = AngleSet::toward(scenario.rx_position);
    return angles;
}

ChannelSet farfield_channels(const Scenario &scenario, const FarfieldAngles &angles, std::optional<double> constant_loss)
{
    if (angles.tx.size() != scenario.transmitters.size())
        throw std::invalid_argument("farfield_channels: one AngleSet per transmitter required");
    const double lambda = scenario.wavelength();
    const double ratio = scenario.spacing() / lambda;
    const double n = double(scenario.passive_count());

    ChannelSet cs;
    cs.model = ChannelModel::far;
    for (std::size_t i = 0; i < scenario.transmitters.size(); ++i)
    {
        const auto &tx = scenario.transmitters[i];
        const std::size_t m = tx.antennas.size();
        const CVec alpha = surface_steering(scenario, angles.tx[i]);
        const CVec beta = steering_ula(angles.tx[i].varpi(ratio), m);
        cs.G.push_back(std::sqrt(double(m) * n) * alpha * beta.transpose());

        Vec3 centre = Vec3::Zero();
        for (const auto &a : tx.antennas)
            centre += a;
        centre /= double(m);
        cs.loss_tx.push_back(constant_loss ? *constant_loss : path_loss(centre.norm(), lambda));
    }
    cs.h = std::sqrt(n) * surface_steering(scenario, angles.rx);
    cs.loss_rx = constant_loss ? *constant_loss : path_loss(scenario.rx_position.norm(), lambda);
    return cs;
}

ChannelSet nearfield_channels(const Scenario &scenario, std::optional<double> constant_loss)
{
    const double lambda = scenario.wavelength();
    const DistanceTable table = distances(scenario);
    auto phase_of = [lambda](double d) { return std::polar(1.0, -two_pi * d / lambda); };

    ChannelSet cs;
    cs.model = ChannelModel::near;
    for (std::size_t i = 0; i < scenario.transmitters.size(); ++i)
    {
        const RMat &d = table.tx_to_surface[i];
        cs.G.push_back(d.transpose().unaryExpr(phase_of));

        Vec3 centre = Vec3::Zero();
        for (const auto &a : scenario.transmitters[i].antennas)
            centre += a;
        centre /= double(scenario.transmitters[i].antennas.size());
        cs.loss_tx.push_back(constant_loss ? *constant_loss : path_loss(centre.norm(), lambda));
    }
    cs.h = table.surface_to_rx.unaryExpr(phase_of);
    cs.loss_rx = constant_loss ? *constant_loss : path_loss(scenario.rx_position.norm(), lambda);
    return cs;
}

CVec mrt_beamformer(double varpi, double power, std::size_t m)
{
    if (!(power > 0.0))
        throw std::invalid_argument("mrt_beamformer: power must be positive");
    const CVec beta = steering_ula(varpi, m);
    return std::sqrt(power) * beta.conjugate() / beta.norm();
}

std::vector<cplx> effective_gain(const ChannelSet &channels, const ReflectionConfig &reflection,
                                 const std::vector<CVec> &beamformers)
{
    const Eigen::Index n = channels.h.size();
    if (Eigen::Index(reflection.size()) != n)
        throw std::invalid_argument("effective_gain: reflection size differs from the surface size");
    if (beamformers.size() != channels.G.size() || channels.loss_tx.size() != channels.G.size())
        throw std::invalid_argument("effective_gain: one beamformer and loss per transmitter required");

    const CVec hTheta = channels.h.cwiseProduct(reflection.diagonal());
    std::vector<cplx> g;
    for (std::size_t i = 0; i < channels.G.size(); ++i)
    {
        const CMat &Gi = channels.G[i];
        if (Gi.rows() != n || Gi.cols() != beamformers[i].size())
            throw std::invalid_argument("effective_gain: channel and beamformer dimensions disagree");
        const cplx v = hTheta.transpose() * (Gi * beamformers[i]);
        g.push_back(std::sqrt(channels.loss_tx[i] * channels.loss_rx) * v);
    }
    return g;
}

} // namespace riss
