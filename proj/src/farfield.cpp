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


#include "riss/farfield.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace riss {

void FarfieldDesignSpec::validate() const
{
    if (nx == 0 || ny == 0)
        throw std::invalid_argument("FarfieldDesignSpec: grid counts must be non-zero");
    if (!(spacing_ratio > 0.0))
        throw std::invalid_argument("FarfieldDesignSpec: spacing ratio must be positive");
    if (!(tau >= 0.0))
        throw std::invalid_argument("FarfieldDesignSpec: tau must be non-negative");
    if (!(delta >= 0.0))
        throw std::invalid_argument("FarfieldDesignSpec: delta must be non-negative");
    if (grid == 0)
        throw std::invalid_argument("FarfieldDesignSpec: grid size L must be at least 1");
    if (delta > 0.0 && grid < 2)
        throw std::invalid_argument("FarfieldDesignSpec: a robust half-width needs L >= 2");
    if (antennas == 0 || !(power > 0.0))
        throw std::invalid_argument("FarfieldDesignSpec: antenna count and power must be positive");
}

FarfieldDesignSpec FarfieldDesignSpec::from_scenario(const Scenario &scenario, std::size_t target_tx)
{
    scenario.validate();
    if (target_tx >= scenario.transmitters.size())
        throw std::invalid_argument("FarfieldDesignSpec: target transmitter index out of range");
    const FarfieldAngles angles = farfield_angles(scenario);
    FarfieldDesignSpec spec;
    spec.nx = scenario.nx;
    spec.ny = scenario.ny;
    spec.spacing_ratio = scenario.spacing() / scenario.wavelength();
    spec.target = angles.tx[target_tx];
    for (std::size_t i = 0; i < angles.tx.size(); ++i)
        if (i != target_tx)
            spec.interferers.push_back(angles.tx[i]);
    spec.rx = angles.rx;
    spec.antennas = scenario.transmitters[target_tx].antennas.size();
    return spec;
}

CMat build_outer_product(const CVec &alpha)
{
    return alpha * alpha.adjoint();
}

CMat build_outer_product(const FarfieldDesignSpec &spec, const AngleSet &angles)
{
    return build_outer_product(
        steering_upa(angles.theta(spec.spacing_ratio), angles.phi(spec.spacing_ratio), spec.nx, spec.ny));
}

std::vector<double> robust_angle_grid(double center, double delta, std::size_t count)
{
    if (count == 0)
        throw std::invalid_argument("robust_angle_grid: L must be at least 1");
    if (delta == 0.0)
        return {center};
    if (count < 2)
        throw std::invalid_argument("robust_angle_grid: L >= 2 required when delta > 0");
    std::vector<double> g(count);
    const double step = 2.0 * delta / double(count - 1);
    for (std::size_t l = 0; l < count; ++l)
        g[l] = center - delta + double(l) * step;
    g.back() = center + delta;
    return g;
}

namespace {

double wrap_signed(double a)
{
    while (a > pi)
        a -= two_pi;
    while (a < -pi)
        a += two_pi;
    return a;
}

SdpProblem base_problem(const FarfieldDesignSpec &spec)
{
    spec.validate();
    const double mp = double(spec.antennas) * spec.power;
    const auto n = Eigen::Index(spec.size());
    SdpProblem p;
    p.objective = build_outer_product(spec, spec.target);
    p.diagonal = RVec::Constant(n, mp);
    p.trace_bound = mp * double(n);
    return p;
}

double rank_one_ratio(const CMat &X)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(X, Eigen::EigenvaluesOnly);
    const RVec ev = es.eigenvalues().cwiseMax(0.0);
    const double total = ev.sum();
    return total > 0.0 ? ev(ev.size() - 1) / total : 0.0;
}

} // namespace

SdpProblem assemble_nominal(const FarfieldDesignSpec &spec)
{
    SdpProblem p = base_problem(spec);
    for (const auto &a : spec.interferers)
    {
        p.inequality.push_back(build_outer_product(spec, a));
        p.bounds.push_back(spec.tau);
    }
    return p;
}

SdpProblem assemble_robust(const FarfieldDesignSpec &spec)
{
    SdpProblem p = base_problem(spec);
    for (const auto &a : spec.interferers)
        for (double azi : robust_angle_grid(a.azimuth(), spec.delta, spec.delta > 0.0 ? spec.grid : 1))
        {
            p.inequality.push_back(build_outer_product(spec, AngleSet(wrap_signed(azi), a.elevation(), a.departure())));
            p.bounds.push_back(spec.tau);
        }
    return p;
}

CVec extract_rank_one(const CMat &X, double scale, double *drift)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(X);
    const Eigen::Index n = X.rows();
    const RVec &ev = es.eigenvalues();
    const double top = ev(n - 1);

    // Degenerate top eigenvalue: take the eigenvector with the largest first-entry magnitude.
    Eigen::Index pick = n - 1;
    for (Eigen::Index j = n - 2; j >= 0 && top - ev(j) <= 1e-12 * std::max(std::abs(top), 1.0); --j)
        if (std::abs(es.eigenvectors()(0, j)) > std::abs(es.eigenvectors()(0, pick)) + 1e-12)
            pick = j;

    CVec u = es.eigenvectors().col(pick);
    if (std::abs(u(0)) > 0.0)
        u *= std::conj(u(0)) / std::abs(u(0));
    // X = c^H c holds conj(c) in its range.
    const CVec c = std::sqrt(std::max(ev(pick), 0.0)) * u.conjugate();

    CVec theta(n);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
    {
        const double m = std::abs(c(k));
        worst = std::max(worst, std::abs(m / std::sqrt(scale) - 1.0));
        theta(k) = m > 0.0 ? c(k) / m : cplx(1.0, 0.0);
    }
    if (drift)
        *drift = worst;
    return theta;
}

CVec receiver_alignment(const FarfieldDesignSpec &spec)
{
    const CVec a = steering_upa(spec.rx.theta(spec.spacing_ratio), spec.rx.phi(spec.spacing_ratio), spec.nx, spec.ny);
    return std::sqrt(double(spec.size())) * a.conjugate();
}

FarfieldDesign irm_solve(const FarfieldDesignSpec &spec, const IrmOptions &options)
{
    if (!(options.epsilon0 > 0.0) || !(options.growth > 1.0) || !(options.r_tol > 0.0) || options.max_iterations < 0)
        throw std::invalid_argument("irm_solve: invalid options");
    const SdpProblem p = assemble_robust(spec);
    const Eigen::Index n = p.dimension();
    const double mp = double(spec.antennas) * spec.power;

    FarfieldDesign out;
    IrmState &st = out.state;
    st.epsilon = options.epsilon0;

    using clock = std::chrono::steady_clock;
    auto seconds_since = [](clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); };

    auto t0 = clock::now();
    SdpSolution prev = solve_sdp(p, options.sdp);
    const double first_seconds = seconds_since(t0);
    if (prev.status == SdpStatus::infeasible)
        throw DesignInfeasible("irm_solve: suppression constraints are infeasible");
    st.X = prev.X;
    out.relaxation_gain = std::real((p.objective * prev.X).trace());

    auto eigen_split = [&](const CMat &X, double &second) {
        Eigen::SelfAdjointEigenSolver<CMat> es(X);
        second = n > 1 ? es.eigenvalues()(n - 2) : 0.0;
        return CMat(es.eigenvectors().leftCols(n - 1));
    };

    double r0 = 0.0;
    st.V = eigen_split(st.X, r0);
    st.r = std::max(r0, 0.0);
    st.history.push_back({0, 0.0, out.relaxation_gain, st.r, rank_one_ratio(st.X), prev.status, prev.iterations,
                          first_seconds});
    out.converged = n == 1 || st.r < options.r_tol;

    int rising = 0;
    while (!out.converged && st.t < options.max_iterations)
    {
        SdpProblem q = p;
        q.rank_basis = st.V;
        q.r_cost = st.epsilon;
        t0 = clock::now();
        SdpSolution sol = solve_sdp(q, options.sdp, options.warm_start ? &prev : nullptr);
        const double solve_seconds = seconds_since(t0);
        if (sol.status == SdpStatus::infeasible)
            throw DesignInfeasible("irm_solve: penalised problem is infeasible");

        const double r_prev = st.r;
        ++st.t;
        st.X = sol.X;
        st.r = std::max(sol.r, 0.0);
        st.history.push_back({st.t, st.epsilon, std::real((p.objective * sol.X).trace()), st.r, rank_one_ratio(sol.X),
                              sol.status, sol.iterations, solve_seconds});
        rising = st.r >= r_prev ? rising + 1 : 0;
        if (rising >= 3)
            throw NumericalError("irm_solve: r did not decrease for three consecutive iterations (last r = " +
                                 std::to_string(st.r) + ")");

        double unused = 0.0;
        st.V = eigen_split(st.X, unused);
        st.epsilon *= options.growth;
        out.converged = st.r < options.r_tol;
        prev = std::move(sol);
    }

    const CVec theta_g = extract_rank_one(st.X, mp, &out.modulus_drift);
    out.rank_one_ratio = rank_one_ratio(st.X);
    out.theta_g = ReflectionConfig::from_coefficients(theta_g);
    const CVec full = receiver_alignment(spec).cwiseProduct(theta_g);
    out.theta = ReflectionConfig::from_coefficients(full);
    if (spec.bits > 0)
        out.theta = quantize_reflection(out.theta, spec.bits);
    return out;
}

} // namespace riss
