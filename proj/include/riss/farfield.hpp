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
#include "riss/sdp.hpp"

#include <string>
#include <vector>

namespace riss {

// Far-field reflection design. The surface response factors as
//   alpha_h^T Theta alpha_i = (1/sqrt(N)) 1^T Theta_G alpha_i,   Theta = Theta_h Theta_G,
// with Theta_h = diag(sqrt(N) conj(alpha_h)) steering toward the receiver. The lifted variable is
// C = c^H c with c = sqrt(M P) 1^T Theta_G, so |1^T Theta_G alpha|^2 = tr(C A) / (M P).
struct FarfieldDesignSpec
{
    std::size_t nx = 10;
    std::size_t ny = 10;
    double spacing_ratio = 0.5; // d / lambda

    AngleSet target;                   // Tx2
    std::vector<AngleSet> interferers; // Tx1 (nominal angles)
    AngleSet rx;

    double tau = 0.1;
    double delta = 0.0;   // robust half-width on the interferer azimuth (rad)
    std::size_t grid = 1; // L
    std::size_t antennas = 1;
    double power = 1.0;
    unsigned bits = 0; // 0 keeps continuous phases

    std::size_t size() const { return nx * ny; }
    void validate() const;

    // Angles and counts from a scenario; the interferers are every Tx except `target_tx`.
    static FarfieldDesignSpec from_scenario(const Scenario &scenario, std::size_t target_tx = 1);
};

// A = alpha alpha^H, trace one.
CMat build_outer_product(const CVec &alpha);
CMat build_outer_product(const FarfieldDesignSpec &spec, const AngleSet &angles);

// L points from center - delta to center + delta with step 2 delta / (L - 1).
std::vector<double> robust_angle_grid(double center, double delta, std::size_t count);

SdpProblem assemble_nominal(const FarfieldDesignSpec &spec);
// One suppression constraint per grid angle and interferer; grid = 1 reproduces assemble_nominal.
SdpProblem assemble_robust(const FarfieldDesignSpec &spec);

struct IrmOptions
{
    double epsilon0 = 4.0;
    double growth = 1.5;
    double r_tol = 1e-6;
    int max_iterations = 30;
    bool warm_start = true;
    SdpOptions sdp;
};

struct IrmRecord
{
    int t = 0;
    double epsilon = 0.0;
    double gain = 0.0; // tr(C A2)
    double r = 0.0;
    double rank_one_ratio = 0.0;
    SdpStatus status = SdpStatus::optimal;
    int solver_iterations = 0;
    double solve_seconds = 0.0; // wall time of this SDP solve
};

struct IrmState
{
    int t = 0;
    double epsilon = 4.0;
    CMat X;
    double r = 0.0;
    CMat V; // N x (N - 1), eigenvectors of the N - 1 smallest eigenvalues
    std::vector<IrmRecord> history;
};

struct FarfieldDesign
{
    ReflectionConfig theta;   // Theta_h Theta_G, quantized when spec.bits > 0
    ReflectionConfig theta_g; // continuous Theta_G
    IrmState state;
    double relaxation_gain = 0.0; // optimum of the relaxation without the rank penalty
    double rank_one_ratio = 0.0;  // lambda_max / sum(lambda) of the final X
    double modulus_drift = 0.0;   // max | |c_k| / sqrt(M P) - 1 | before projection
    bool converged = false;
};

// Raised when the suppression constraints admit no feasible design.
class DesignInfeasible : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

// Iterative rank minimisation. Throws DesignInfeasible when the relaxation is infeasible and
// NumericalError when r fails to decrease for three consecutive iterations.
FarfieldDesign irm_solve(const FarfieldDesignSpec &spec, const IrmOptions &options = {});

// Unit-modulus Theta_G from the dominant eigenvector of C, first entry rotated to a real phase.
// `drift` receives the largest relative modulus deviation of the unprojected vector.
CVec extract_rank_one(const CMat &X, double scale, double *drift = nullptr);

// diag(sqrt(N) conj(alpha_h)).
CVec receiver_alignment(const FarfieldDesignSpec &spec);

} // namespace riss
