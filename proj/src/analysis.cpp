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


#include "riss/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace riss {

std::vector<double> default_beam_grid(double step_deg)
{
    if (!(step_deg > 0.0))
        throw std::invalid_argument("default_beam_grid: step must be positive");
    const auto n = std::size_t(std::llround(180.0 / step_deg));
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g[i] = -90.0 + double(i) * step_deg;
    return g;
}

std::vector<double> normalize_peak(const std::vector<double> &values)
{
    if (values.empty())
        return {};
    const double peak = *std::max_element(values.begin(), values.end());
    if (!(peak > 0.0))
        throw std::invalid_argument("normalize_peak: peak must be positive");
    std::vector<double> out(values);
    for (auto &v : out)
        v /= peak;
    return out;
}

namespace {

void check_grid(const std::vector<double> &grid)
{
    if (grid.empty())
        throw std::invalid_argument("beampattern: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("beampattern: grid must be strictly increasing");
}

BeampatternResult finish(std::vector<double> grid, std::vector<double> raw, std::vector<double> markers)
{
    BeampatternResult r;
    r.reference = *std::max_element(raw.begin(), raw.end());
    r.gain = normalize_peak(raw);
    r.gain_db.reserve(r.gain.size());
    for (double g : r.gain)
        r.gain_db.push_back(10.0 * std::log10(std::max(g, 1e-30)));
    r.angles_deg = std::move(grid);
    r.markers_deg = std::move(markers);
    return r;
}

std::FILE *open_csv(const std::filesystem::path &path, const char *header)
{
    std::FILE *f = std::fopen(path.string().c_str(), "w");
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    std::fputs(header, f);
    return f;
}

} // namespace

BeampatternResult farfield_beampattern(const ReflectionConfig &theta, const Scenario &scenario,
                                       const std::vector<double> &grid_deg, std::vector<double> markers_deg)
{
    check_grid(grid_deg);
    if (theta.size() != scenario.passive_count())
        throw std::invalid_argument("farfield_beampattern: reflection size differs from the surface");
    const CVec folded =
        surface_steering(scenario, AngleSet::toward(scenario.rx_position)).cwiseProduct(theta.diagonal());
    std::vector<double> raw;
    raw.reserve(grid_deg.size());
    for (double az : grid_deg)
    {
        const CVec a = surface_steering(scenario, AngleSet::coplanar(deg2rad(az)));
        raw.push_back(std::norm(folded.cwiseProduct(a).sum()));
    }
    return finish(grid_deg, std::move(raw), std::move(markers_deg));
}

cplx nearfield_probe(const ReflectionConfig &theta, const Scenario &scenario, const Vec3 &source, const Vec3 &probe,
                     bool path_loss)
{
    const auto layout = element_positions(scenario);
    if (theta.size() != layout.passive.size())
        throw std::invalid_argument("nearfield_probe: reflection size differs from the surface");
    const RVec d1 = distances_from(layout.passive, source);
    const RVec d2 = distances_from(layout.passive, probe);
    const double lambda = scenario.wavelength();
    cplx s = 0.0;
    for (std::size_t k = 0; k < layout.passive.size(); ++k)
    {
        const auto i = Eigen::Index(k);
        const double amp = path_loss ? lambda * lambda / (16.0 * pi * pi * d1(i) * d2(i)) : 1.0;
        s += std::polar(amp, -two_pi * (d1(i) + d2(i)) / lambda + theta.phases()[k]);
    }
    return s;
}

BeampatternResult nearfield_arc_pattern(const ReflectionConfig &theta, const Scenario &scenario, const Vec3 &source,
                                        double radius, const std::vector<double> &grid_deg)
{
    check_grid(grid_deg);
    std::vector<double> raw;
    raw.reserve(grid_deg.size());
    for (double az : grid_deg)
        raw.push_back(std::norm(nearfield_probe(theta, scenario, source, tx_position_from_azimuth(deg2rad(az), radius))));
    return finish(grid_deg, std::move(raw), {});
}

void HeatmapSpec::validate() const
{
    if (!(x_max > x_min) || !(z_max > z_min))
        throw std::invalid_argument("HeatmapSpec: empty extent");
    if (nx < 2 || nz < 2)
        throw std::invalid_argument("HeatmapSpec: at least two points per axis");
}

HeatmapResult heatmap(const ReflectionConfig &theta, const Scenario &scenario, const HeatmapSpec &spec,
                      std::size_t target_tx)
{
    spec.validate();
    Vec3 source;
    if (spec.source)
        source = *spec.source;
    else
    {
        if (target_tx >= scenario.transmitters.size() || scenario.transmitters[target_tx].antennas.empty())
            throw std::invalid_argument("heatmap: no target transmitter to use as source");
        source = scenario.transmitters[target_tx].antennas[0];
    }

    const auto layout = element_positions(scenario);
    if (theta.size() != layout.passive.size())
        throw std::invalid_argument("heatmap: reflection size differs from the surface");
    const double lambda = scenario.wavelength();
    const RVec d1 = distances_from(layout.passive, source);
    CVec incident(d1.size());
    for (Eigen::Index k = 0; k < d1.size(); ++k)
    {
        const double amp = spec.path_loss ? lambda / (4.0 * pi * d1(k)) : 1.0;
        incident(k) = std::polar(amp, -two_pi * d1(k) / lambda + theta.phases()[std::size_t(k)]);
    }

    HeatmapResult out;
    out.xs.resize(spec.nx);
    out.zs.resize(spec.nz);
    for (std::size_t i = 0; i < spec.nx; ++i)
        out.xs[i] = spec.x_min + (spec.x_max - spec.x_min) * double(i) / double(spec.nx - 1);
    for (std::size_t j = 0; j < spec.nz; ++j)
        out.zs[j] = spec.z_min + (spec.z_max - spec.z_min) * double(j) / double(spec.nz - 1);
    out.magnitude.resize(Eigen::Index(spec.nz), Eigen::Index(spec.nx));
    for (std::size_t j = 0; j < spec.nz; ++j)
        for (std::size_t i = 0; i < spec.nx; ++i)
        {
            const RVec d2 = distances_from(layout.passive, Vec3(out.xs[i], 0.0, out.zs[j]));
            cplx s = 0.0;
            for (Eigen::Index k = 0; k < d2.size(); ++k)
            {
                const double amp = spec.path_loss ? lambda / (4.0 * pi * d2(k)) : 1.0;
                s += incident(k) * std::polar(amp, -two_pi * d2(k) / lambda);
            }
            out.magnitude(Eigen::Index(j), Eigen::Index(i)) = std::abs(s);
        }
    return out;
}

SinrValue sinr(cplx target_gain, cplx interferer_gain, double noise_power, double power)
{
    if (!(noise_power > 0.0))
        throw std::invalid_argument("sinr: noise power must be positive");
    SinrValue v;
    v.linear = std::norm(target_gain) * power / (std::norm(interferer_gain) * power + noise_power);
    v.db = db10(v.linear);
    return v;
}

void write_beampattern_csv(const std::filesystem::path &path, const BeampatternResult &result)
{
    std::FILE *f = open_csv(path, "angle_deg,gain_db\n");
    for (std::size_t i = 0; i < result.angles_deg.size(); ++i)
        std::fprintf(f, "%.10g,%.10g\n", result.angles_deg[i], result.gain_db[i]);
    std::fclose(f);
}

void write_heatmap_csv(const std::filesystem::path &path, const HeatmapResult &result)
{
    std::FILE *f = open_csv(path, "x,z,magnitude\n");
    for (std::size_t j = 0; j < result.zs.size(); ++j)
        for (std::size_t i = 0; i < result.xs.size(); ++i)
            std::fprintf(f, "%.10g,%.10g,%.10g\n", result.xs[i], result.zs[j],
                         result.magnitude(Eigen::Index(j), Eigen::Index(i)));
    std::fclose(f);
}

void write_constellation_csv(const std::filesystem::path &path, const LinkResult &result)
{
    if (result.received.size() != result.ideal.size())
        throw std::invalid_argument("write_constellation_csv: received and ideal lengths differ");
    std::FILE *f = open_csv(path, "re,im,label\n");
    for (Eigen::Index i = 0; i < result.received.size(); ++i)
    {
        const cplx s = result.ideal(i);
        const int label = (s.real() < 0.0 ? 2 : 0) + (s.imag() < 0.0 ? 1 : 0);
        std::fprintf(f, "%.10g,%.10g,%d\n", result.received(i).real(), result.received(i).imag(), label);
    }
    std::fclose(f);
}

} // namespace riss
