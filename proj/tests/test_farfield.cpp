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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riss/analysis.hpp"
#include "riss/farfield.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace riss;

namespace {

FarfieldDesignSpec small_spec(std::size_t n, double target_deg, std::vector<double> interferers_deg, double tau)
{
    FarfieldDesignSpec s;
    s.nx = s.ny = n;
    s.target = AngleSet::coplanar(deg2rad(target_deg));
    for (double a : interferers_deg)
        s.interferers.push_back(AngleSet::coplanar(deg2rad(a)));
    s.rx = AngleSet::coplanar(0.0);
    s.tau = tau;
    return s;
}

CVec target_steering(const FarfieldDesignSpec &s)
{
    return steering_upa(s.target.theta(s.spacing_ratio), s.target.phi(s.spacing_ratio), s.nx, s.ny);
}

} // namespace

TEST_CASE("outer products")
{
    const CMat A = build_outer_product(CVec::Constant(9, 1.0 / 3.0));
    CHECK((A - CMat::Constant(9, 9, 1.0 / 9.0)).norm() < 1e-15);

    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(0.2, pi - 0.2);
    const auto spec = small_spec(5, 0.0, {}, 0.1);
    for (int t = 0; t < 10; ++t)
    {
        const CMat B = build_outer_product(spec, AngleSet(u(g), u(g)));
        CHECK(std::real(B.trace()) == doctest::Approx(1.0));
        CHECK((B - B.adjoint()).norm() < 1e-15);
        const RVec ev = Eigen::SelfAdjointEigenSolver<CMat>(B).eigenvalues();
        CHECK(ev(ev.size() - 2) < 1e-12);
    }
    // Co-planar sources have a zero grid-x increment.
    CHECK(std::abs(AngleSet::coplanar(deg2rad(-20.0)).theta()) < 1e-15);
}

TEST_CASE("robust angle grid")
{
    const auto one = robust_angle_grid(0.3, 0.0, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == 0.3);
    const auto g = robust_angle_grid(deg2rad(-20.0), deg2rad(3.0), 7);
    REQUIRE(g.size() == 7);
    CHECK(g.front() == doctest::Approx(deg2rad(-23.0)));
    CHECK(g.back() == doctest::Approx(deg2rad(-17.0)));
    for (std::size_t l = 1; l < 7; ++l)
        CHECK(g[l] - g[l - 1] == doctest::Approx(deg2rad(1.0)));
}

TEST_CASE("nominal relaxation without interference is pure alignment")
{
    auto spec = small_spec(4, 10.0, {}, 0.1);
    spec.antennas = 2;
    spec.power = 1.5;
    const SdpProblem p = assemble_nominal(spec);
    CHECK(p.diagonal.isApprox(RVec::Constant(16, 3.0)));
    CHECK(*p.trace_bound == doctest::Approx(48.0));
    const auto sol = solve_sdp(p);
    REQUIRE(sol.status == SdpStatus::optimal);
    // Closed form: conjugate-phase c_k = sqrt(MP) exp(-i arg alpha_k).
    const CVec a = target_steering(spec);
    const double aligned = 3.0 * std::pow(a.cwiseAbs().sum(), 2);
    CHECK(aligned == doctest::Approx(3.0 * 16.0));
    CHECK(sol.objective == doctest::Approx(aligned).epsilon(1e-6));
}

TEST_CASE("orthogonal interferer leaves the constraint slack")
{
    // sin(az_t) - sin(az_i) = 2 / ny makes the two steering vectors orthogonal.
    const double itf = rad2deg(std::asin(-0.2));
    const auto free = solve_sdp(assemble_nominal(small_spec(10, 0.0, {}, 0.1)));
    const auto spec = small_spec(10, 0.0, {itf}, 1e-3);
    const CVec ai = steering_upa(spec.interferers[0].theta(), spec.interferers[0].phi(), 10, 10);
    CHECK(std::abs(cplx(target_steering(spec).adjoint() * ai)) < 1e-12);
    const auto con = solve_sdp(assemble_nominal(spec));
    CHECK(con.objective == doctest::Approx(free.objective).epsilon(1e-6));
}

TEST_CASE("reference scenario relaxation honours the suppression threshold")
{
    auto spec = FarfieldDesignSpec::from_scenario(reference_scenario());
    spec.tau = 0.1;
    const SdpProblem p = assemble_nominal(spec);
    REQUIRE(p.inequality.size() == 1);
    const auto sol = solve_sdp(p);
    REQUIRE(sol.status == SdpStatus::optimal);
    CHECK(std::real((p.inequality[0] * sol.X).trace()) <= 0.1 + 1e-6);
}

TEST_CASE("robust relaxation with one grid point reduces to the nominal one")
{
    auto spec = small_spec(4, 10.0, {-20.0}, 0.1);
    const SdpProblem a = assemble_nominal(spec), b = assemble_robust(spec);
    REQUIRE(b.inequality.size() == 1);
    CHECK((a.inequality[0] - b.inequality[0]).norm() == 0.0);
    CHECK(a.bounds == b.bounds);
    spec.delta = deg2rad(3.0);
    spec.grid = 7;
    CHECK(assemble_robust(spec).inequality.size() == 7);
}

TEST_CASE("IRM on a toy instance without interference")
{
    auto spec = small_spec(2, 10.0, {}, 0.1);
    const FarfieldDesign d = irm_solve(spec);
    CHECK(d.converged);
    CHECK(d.state.t <= 3);
    CHECK(d.rank_one_ratio >= 0.999);

    // |h^T Theta G v| against the aligned optimum N sqrt(M P).
    Scenario s = reference_scenario();
    s.nx = s.ny = 2;
    FarfieldAngles ang;
    ang.tx = {spec.target, spec.target};
    ang.rx = spec.rx;
    const ChannelSet cs = farfield_channels(s, ang, 1.0);
    const auto g = effective_gain(cs, d.theta, {CVec::Ones(1), CVec::Ones(1)});
    CHECK(std::abs(g[1]) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("IRM on the reference scenario")
{
    auto spec = FarfieldDesignSpec::from_scenario(reference_scenario());
    spec.tau = 0.1;
    const FarfieldDesign d = irm_solve(spec);
    CHECK(d.converged);
    CHECK(d.rank_one_ratio >= 0.999);
    CHECK(d.modulus_drift < 1e-3);
    for (const cplx c : d.theta.diagonal())
        CHECK(std::abs(c) == doctest::Approx(1.0).epsilon(1e-14));

    // Factorisation: |g_i| = sqrt(N M P) |1^T Theta_G alpha_i| with unit path loss.
    const Scenario s = reference_scenario();
    const ChannelSet cs = farfield_channels(s, farfield_angles(s), 1.0);
    const auto g = effective_gain(cs, d.theta, {CVec::Ones(1), CVec::Ones(1)});
    const CVec tg = d.theta_g.diagonal();
    const CVec at = target_steering(spec);
    const CVec ai = steering_upa(spec.interferers[0].theta(), spec.interferers[0].phi(), 10, 10);
    CHECK(std::abs(g[1]) == doctest::Approx(10.0 * std::abs(tg.cwiseProduct(at).sum())).epsilon(1e-10));
    // Suppression audit on the continuous design.
    CHECK(std::norm(tg.cwiseProduct(ai).sum()) <= 0.1 * 1.01);

    // Same factor through the analysis module: interferer at most tau / main lobe.
    const auto bp = farfield_beampattern(d.theta, s, {-20.0, 10.0});
    CHECK(bp.gain[0] <= 0.1 / std::norm(tg.cwiseProduct(at).sum()) * 1.01 * bp.gain[1]);
}

TEST_CASE("IRM state history")
{
    // A hard instance: tight threshold and a wide robust sector.
    auto spec = small_spec(4, 10.0, {-20.0}, 0.001);
    spec.delta = deg2rad(10.0);
    spec.grid = 7;
    const FarfieldDesign d = irm_solve(spec);
    const auto &h = d.state.history;
    REQUIRE(h.size() >= 2);
    for (std::size_t t = 2; t < h.size(); ++t)
        CHECK(h[t].epsilon == 1.5 * h[t - 1].epsilon);
    CHECK(h[1].epsilon == 4.0);
    for (const auto &r : h)
        CHECK(r.r >= 0.0);
    const CMat VhV = d.state.V.adjoint() * d.state.V;
    CHECK((VhV - CMat::Identity(15, 15)).norm() < 1e-10);
    CHECK(d.converged);
    CHECK(h.back().r < 1e-6);
}

TEST_CASE("robust design holds the threshold over the whole sector")
{
    auto spec = small_spec(6, 10.0, {-20.0}, 0.1);
    spec.delta = deg2rad(3.0);
    spec.grid = 7;
    const FarfieldDesign d = irm_solve(spec);
    const CVec tg = d.theta_g.diagonal();
    for (double a : robust_angle_grid(deg2rad(-20.0), deg2rad(3.0), 7))
    {
        const AngleSet as = AngleSet::coplanar(a);
        const CVec ai = steering_upa(as.theta(), as.phi(), 6, 6);
        CHECK(std::norm(tg.cwiseProduct(ai).sum()) <= 0.1 * 1.01);
    }
}

TEST_CASE("widening the robust sector never raises the relaxation optimum")
{
    double prev = 1e300;
    for (double deg : {0.0, 1.0, 2.0, 3.0})
    {
        auto spec = small_spec(6, 10.0, {-20.0}, 0.1);
        spec.delta = deg2rad(deg);
        spec.grid = deg > 0.0 ? 7 : 1;
        const auto sol = solve_sdp(assemble_robust(spec));
        CHECK(sol.objective <= prev * (1.0 + 1e-6));
        prev = sol.objective;
    }
}

TEST_CASE("quantized designs land on the lattice")
{
    auto spec = small_spec(4, 10.0, {-20.0}, 0.1);
    spec.bits = 2;
    const FarfieldDesign d = irm_solve(spec);
    CHECK(d.theta.bits() == 2);
    for (std::size_t k = 0; k < d.theta.size(); ++k)
        CHECK(d.theta.level(k) < 4);
}

TEST_CASE("rank-one extraction")
{
    CVec c(4);
    c << 1.0, cplx(0, 1), -1.0, cplx(0, -1);
    const CMat X = 2.0 * c * c.adjoint();
    double drift = 1.0;
    const CVec t = extract_rank_one(X, 2.0, &drift);
    CHECK(drift < 1e-12);
    // The relaxation variable is the outer product of conj(theta).
    for (Eigen::Index k = 0; k < 4; ++k)
        CHECK(std::abs(t(k) * std::conj(t(0)) - std::conj(c(k) * std::conj(c(0)))) < 1e-12);
}

TEST_CASE("spec validation")
{
    auto spec = small_spec(4, 10.0, {-20.0}, -0.1);
    CHECK_THROWS(spec.validate());
    spec.tau = 0.1;
    spec.delta = 0.1;
    CHECK_THROWS(spec.validate());
    spec.grid = 3;
    CHECK_NOTHROW(spec.validate());
    IrmOptions bad;
    bad.growth = 1.0;
    CHECK_THROWS(irm_solve(spec, bad));
}
