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

#include "riss/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace riss {

double Scenario::wavelength() const
{
    return speed_of_light / carrier_hz;
}

double Scenario::spacing() const
{
    return element_spacing > 0.0 ? element_spacing : 0.5 * wavelength();
}

double Scenario::sensing_spacing() const
{
    return active_spacing > 0.0 ? active_spacing : 0.6883 * wavelength();
}

void Scenario::validate() const
{
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("Scenario: carrier frequency must be positive");
    if (nx == 0 || ny == 0)
        throw std::invalid_argument("Scenario: passive grid counts must be non-zero");
    if (na == 0)
        throw std::invalid_argument("Scenario: active element count must be non-zero");
    if (element_spacing < 0.0 || active_spacing < 0.0 || active_offset < 0.0)
        throw std::invalid_argument("Scenario: spacings and offsets must be non-negative");
    if (!(noise_power >= 0.0))
        throw std::invalid_argument("Scenario: noise power must be non-negative");
    for (const auto &tx : transmitters)
    {
        if (tx.antennas.empty())
            throw std::invalid_argument("Scenario: every transmitter needs at least one antenna");
        if (!(tx.power >= 0.0))
            throw std::invalid_argument("Scenario: transmit power must be non-negative");
    }
    if (coplanar)
    {
        // Every node shares the plane y = 0; the surface itself straddles it symmetrically.
        auto off_plane = [](const Vec3 &p) { return std::abs(p.y()) > 1e-12; };
        if (off_plane(rx_position))
            throw std::invalid_argument("Scenario: co-planar flag set but Rx is off the y = 0 plane");
        for (const auto &tx : transmitters)
            if (std::any_of(tx.antennas.begin(), tx.antennas.end(), off_plane))
                throw std::invalid_argument("Scenario: co-planar flag set but a Tx antenna is off the y = 0 plane");
    }
}

Vec3 tx_position_from_azimuth(double azimuth, double dc)
{
    if (!(dc > 0.0))
        throw std::invalid_argument("tx_position_from_azimuth: range must be positive");
    return {dc * std::sin(azimuth), 0.0, dc * std::cos(azimuth)};
}

Scenario reference_scenario(double target_azimuth, double interferer_azimuth, double dc)
{
    Scenario s;
    s.transmitters = {Transmitter{{tx_position_from_azimuth(interferer_azimuth, dc)}, 1.0},
                      Transmitter{{tx_position_from_azimuth(target_azimuth, dc)}, 1.0}};
    s.rx_position = tx_position_from_azimuth(0.0, dc);
    return s;
}

ElementLayout element_positions(const Scenario &scenario)
{
    scenario.validate();
    const double d = scenario.spacing();
    const double cx = 0.5 * double(scenario.ny - 1);
    const double cy = 0.5 * double(scenario.nx - 1);

    ElementLayout layout;
    layout.passive.reserve(scenario.passive_count());
    for (std::size_t ix = 0; ix < scenario.nx; ++ix)
        for (std::size_t iy = 0; iy < scenario.ny; ++iy)
            layout.passive.emplace_back((double(iy) - cx) * d, (double(ix) - cy) * d, 0.0);

    const double da = scenario.sensing_spacing();
    const double gap = scenario.active_offset > 0.0 ? scenario.active_offset : d;
    const double y_line = -(0.5 * double(scenario.nx) * d + gap);
    const double ca = 0.5 * double(scenario.na - 1);
    layout.active.reserve(scenario.na);
    for (std::size_t n = 0; n < scenario.na; ++n)
        layout.active.emplace_back(-(double(n) - ca) * da, y_line, 0.0);
    return layout;
}

RVec distances_from(const std::vector<Vec3> &elements, const Vec3 &point)
{
    RVec out(Eigen::Index(elements.size()));
    for (std::size_t k = 0; k < elements.size(); ++k)
    {
        const double r = (elements[k] - point).norm();
        if (!(r > 0.0))
            throw std::invalid_argument("distances: coincident points");
        out(Eigen::Index(k)) = r;
    }
    return out;
}

DistanceTable distances(const Scenario &scenario)
{
    const auto layout = element_positions(scenario);
    DistanceTable table;
    for (const auto &tx : scenario.transmitters)
    {
        RMat d(Eigen::Index(tx.antennas.size()), Eigen::Index(layout.passive.size()));
        for (std::size_t m = 0; m < tx.antennas.size(); ++m)
            d.row(Eigen::Index(m)) = distances_from(layout.passive, tx.antennas[m]).transpose();
        table.tx_to_surface.push_back(std::move(d));
    }
    table.surface_to_rx = distances_from(layout.passive, scenario.rx_position);
    return table;
}

double aperture_size(const Scenario &scenario)
{
    const double d = scenario.spacing();
    return d * std::hypot(double(scenario.nx), double(scenario.ny));
}

bool farfield_valid(const Scenario &scenario)
{
    const double D = aperture_size(scenario);
    const double rayleigh = 2.0 * D * D / scenario.wavelength();
    bool ok = scenario.rx_position.norm() > rayleigh;
    for (const auto &tx : scenario.transmitters)
        for (const auto &a : tx.antennas)
            ok = ok && a.norm() > rayleigh;
    return ok;
}

AngleSet::AngleSet(double azimuth, double elevation, double departure)
    : azimuth_(azimuth), elevation_(elevation), departure_(departure)
{
    for (double a : {azimuth, elevation, departure})
        if (!(a >= -pi && a <= pi))
            throw std::invalid_argument("AngleSet: angles must lie in [-pi, pi]");
}

AngleSet AngleSet::coplanar(double geometric_azimuth, double departure)
{
    return AngleSet(pi / 2.0 - geometric_azimuth, pi / 2.0, departure);
}

AngleSet AngleSet::toward(const Vec3 &point, double departure)
{
    const double r = point.norm();
    if (!(r > 0.0))
        throw std::invalid_argument("AngleSet::toward: point coincides with the surface centroid");
    const Vec3 u = point / r;
    // cos(ele) is the projection on the grid-x axis (world y); sin(ele) cos(azi) on world x.
    const double ele = std::acos(std::clamp(u.y(), -1.0, 1.0));
    const double azi = std::atan2(u.z(), u.x());
    return AngleSet(azi, ele, departure);
}

double AngleSet::theta(double spacing_ratio) const
{
    return two_pi * spacing_ratio * std::cos(elevation_);
}

double AngleSet::phi(double spacing_ratio) const
{
    return two_pi * spacing_ratio * std::sin(elevation_) * std::cos(azimuth_);
}

double AngleSet::varpi(double spacing_ratio) const
{
    return two_pi * spacing_ratio * std::sin(departure_);
}

CVec steering_ula(double varpi, std::size_t m)
{
    if (m == 0)
        throw std::invalid_argument("steering_ula: count must be positive");
    CVec b(Eigen::Index(m), 1);
    const double scale = 1.0 / std::sqrt(double(m));
    for (std::size_t k = 0; k < m; ++k)
        b(Eigen::Index(k)) = std::polar(scale, double(k) * varpi);
    return b;
}

CVec steering_upa(double theta, double phi, std::size_t nx, std::size_t ny)
{
    if (nx == 0 || ny == 0)
        throw std::invalid_argument("steering_upa: counts must be positive");
    const CVec ax = steering_ula(theta, nx);
    const CVec ay = steering_ula(phi, ny);
    CVec a(Eigen::Index(nx * ny), 1);
    for (std::size_t ix = 0; ix < nx; ++ix)
        a.segment(Eigen::Index(ix * ny), Eigen::Index(ny)) = ax(Eigen::Index(ix)) * ay;
    return a;
}

CVec surface_steering(const Scenario &scenario, const AngleSet &angles)
{
    const double ratio = scenario.spacing() / scenario.wavelength();
    return steering_upa(angles.theta(ratio), angles.phi(ratio), scenario.nx, scenario.ny);
}

} // namespace riss
