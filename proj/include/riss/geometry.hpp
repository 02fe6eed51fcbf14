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

#include "riss/types.hpp"

#include <cstddef>
#include <vector>

namespace riss {

// Coordinate frame
// ----------------
// The passive surface lies in the x-y plane (z = 0) with its centroid at the origin; the
// half space z > 0 is in front of the surface. The co-planar plane used by all experiments
// is y = 0, so a node at geometric azimuth `az` and range `d` sits at [d sin(az), 0, d cos(az)].
//
// Passive element k = ix * ny + iy. The inner index iy advances along world x and the outer
// index ix along world y. With this choice the Kronecker steering vector alpha_x (x) alpha_y
// matches the row-major element order, and a co-planar source only excites the alpha_y factor.
//
// The active ULA sits along world x, below the grid (negative y). Element 0 is at the +x end so
// a source at positive azimuth produces the phase progression exp(-i n psi).

struct Transmitter
{
    std::vector<Vec3> antennas; // M_i antenna positions (m)
    double power = 1.0;         // linear
};

struct Scenario
{
    double carrier_hz = 3.5e9;
    double element_spacing = 0.0; // m; 0 selects lambda / 2
    std::size_t nx = 10;
    std::size_t ny = 10;
    std::size_t na = 4;
    double active_spacing = 0.0; // m; 0 selects 0.6883 lambda
    double active_offset = 0.0;  // gap between grid edge and ULA line (m); 0 selects one element spacing
    std::vector<Transmitter> transmitters;
    Vec3 rx_position{0.0, 0.0, 3.5};
    double noise_power = 1.0e-12; // linear
    bool coplanar = true;

    double wavelength() const;
    double spacing() const;         // resolved passive spacing d
    double sensing_spacing() const; // resolved active spacing
    std::size_t passive_count() const { return nx * ny; }

    // Throws std::invalid_argument on zero counts, non-positive lengths or a broken co-planar layout.
    void validate() const;
};

// Position on the co-planar arc of radius dc at geometric azimuth az (radians).
Vec3 tx_position_from_azimuth(double azimuth, double dc);

// Reference scenario: 10 x 10 surface, 4 sensing antennas, single-antenna Tx1
// (interferer) and Tx2 (target) at range dc, receiver at broadside.
Scenario reference_scenario(double target_azimuth = deg2rad(10.0), double interferer_azimuth = deg2rad(-20.0),
                        double dc = 3.5);

struct ElementLayout
{
    std::vector<Vec3> passive;
    std::vector<Vec3> active;
};

ElementLayout element_positions(const Scenario &scenario);

struct DistanceTable
{
    std::vector<RMat> tx_to_surface; // per Tx: M_i x N
    RVec surface_to_rx;              // N
};

DistanceTable distances(const Scenario &scenario);

// Distances from one point to every passive element; rejects coincident points.
RVec distances_from(const std::vector<Vec3> &elements, const Vec3 &point);

// Largest aperture dimension of the passive grid (diagonal of the nx d by ny d panel).
double aperture_size(const Scenario &scenario);

// R > 2 D^2 / lambda for every Tx antenna and the Rx, R measured from the surface centroid.
bool farfield_valid(const Scenario &scenario);

// Angles describing one link at the surface. Phase increments are derived on demand.
class AngleSet
{
  public:
    AngleSet() = default;
    AngleSet(double azimuth, double elevation, double departure = 0.0);

    // Co-planar source at geometric azimuth az: elevation pi/2, steering azimuth pi/2 - az.
    static AngleSet coplanar(double geometric_azimuth, double departure = 0.0);

    // Direction from the surface centroid toward `point`.
    static AngleSet toward(const Vec3 &point, double departure = 0.0);

    double azimuth() const { return azimuth_; }
    double elevation() const { return elevation_; }
    double departure() const { return departure_; }

    // spacing_ratio = d / lambda; 0.5 gives the pi-scaled increments.
    double theta(double spacing_ratio = 0.5) const;
    double phi(double spacing_ratio = 0.5) const;
    double varpi(double spacing_ratio = 0.5) const;

  private:
    double azimuth_ = 0.0;
    double elevation_ = pi / 2.0;
    double departure_ = 0.0;
};

CVec steering_ula(double varpi, std::size_t m);
CVec steering_upa(double theta, double phi, std::size_t nx, std::size_t ny);

// UPA response of the scenario's surface toward an AngleSet.
CVec surface_steering(const Scenario &scenario, const AngleSet &angles);

} // namespace riss
