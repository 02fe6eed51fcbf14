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

#include "riss/nearfield.hpp"
#include "riss/rng.hpp"

#include <random>

using namespace riss;

namespace {

// Independent evaluation of |sum exp(-i 2 pi path / lambda + i phase)|.
double strength(const std::vector<double> &ph, const RVec &path, double lambda)
{
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < ph.size(); ++k)
    {
        const double a = -two_pi * path(Eigen::Index(k)) / lambda + ph[k];
        re += std::cos(a);
        im += std::sin(a);
    }
    return std::hypot(re, im);
}

NearfieldDesignSpec random_spec(std::mt19937_64 &g, std::size_t n, double eta)
{
    std::uniform_real_distribution<double> u(3.0, 4.0);
    NearfieldDesignSpec s;
    s.wavelength = 0.0857;
    s.target_path = RVec(static_cast<Eigen::Index>(n));
    RVec ip(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k)
    {
        s.target_path(Eigen::Index(k)) = u(g);
        ip(Eigen::Index(k)) = u(g);
    }
    s.interferer_paths = {ip};
    s.eta = eta;
    s.levels = 4;
    return s;
}

} // namespace

TEST_CASE("coherent initialisation stacks every element")
{
    const double lambda = 0.1;
    RVec path(3);
    path << 1.0, 2.0, 3.0;
    for (double p : init_phases(path, lambda))
        CHECK(std::cos(p) == doctest::Approx(1.0));

    const Scenario s = reference_scenario();
    const auto spec = NearfieldDesignSpec::from_scenario(s);
    const auto ph = init_phases(spec.target_path, spec.wavelength);
    CHECK(signal_strength(ph, spec.target_path, spec.wavelength) == doctest::Approx(100.0).epsilon(1e-12));
    const auto shifted = init_phases(spec.target_path, spec.wavelength, 1.234);
    for (std::size_t k = 0; k < ph.size(); ++k)
        CHECK(std::cos(shifted[k] - ph[k] - 1.234) == doctest::Approx(1.0));
    CHECK(signal_strength(shifted, spec.target_path, spec.wavelength) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("signal strength")
{
    RVec one(1);
    one << 2.71;
    CHECK(signal_strength({0.4}, one, 0.1) == doctest::Approx(1.0));

    Rng rng(1);
    const RVec path = RVec::LinSpaced(100, 3.0, 3.7);
    double acc = 0.0;
    const int trials = 4000;
    std::vector<double> ph(100);
    for (int t = 0; t < trials; ++t)
    {
        for (auto &p : ph)
            p = rng.uniform() * two_pi;
        const double s = signal_strength(ph, path, 0.0857);
        CHECK(s == doctest::Approx(strength(ph, path, 0.0857)).epsilon(1e-12));
        acc += s;
    }
    // Rayleigh mean sqrt(pi N) / 2.
    CHECK(acc / trials == doctest::Approx(std::sqrt(pi * 100.0) / 2.0).epsilon(0.03));
}

TEST_CASE("field_sum magnitude is the signal strength")
{
    const RVec path = RVec::LinSpaced(10, 1.0, 1.3);
    const std::vector<double> ph(10, 0.7);
    CHECK(std::abs(field_sum(ph, path, 0.05)) == doctest::Approx(signal_strength(ph, path, 0.05)));
}

TEST_CASE("robust interferer hypotheses")
{
    const auto one = robust_interferer_positions(deg2rad(-20.0), 0.0, 1, 3.5);
    REQUIRE(one.size() == 1);
    CHECK((one[0] - tx_position_from_azimuth(deg2rad(-20.0), 3.5)).norm() < 1e-15);

    const auto many = robust_interferer_positions(deg2rad(-20.0), deg2rad(3.0), 7, 3.5);
    REQUIRE(many.size() == 7);
    CHECK((many.front() - tx_position_from_azimuth(deg2rad(-23.0), 3.5)).norm() < 1e-12);
    CHECK((many.back() - tx_position_from_azimuth(deg2rad(-17.0), 3.5)).norm() < 1e-12);

    // Path lengths per hypothesis agree with the geometry module.
    const Scenario s = reference_scenario();
    const auto spec = NearfieldDesignSpec::from_scenario(s, 1, deg2rad(3.0), 7);
    REQUIRE(spec.interferer_paths.size() == 7);
    const auto t = distances(s);
    const auto layout = element_positions(s);
    const RVec d1 = distances_from(layout.passive, many[3]);
    CHECK((spec.interferer_paths[3] - (d1 + t.surface_to_rx)).norm() < 1e-12);
    CHECK((spec.target_path - (t.tx_to_surface[1].row(0).transpose() + t.surface_to_rx)).norm() < 1e-12);
}

TEST_CASE("objective definition")
{
    std::mt19937_64 g(2);
    auto spec = random_spec(g, 3, 0.0);
    const std::vector<double> ph{0.1, 2.0, 4.0};
    CHECK(evaluate_objective(ph, spec) ==
          doctest::Approx(strength(ph, spec.target_path, spec.wavelength)));
    spec.eta = 1.7;
    spec.interferer_paths.push_back(spec.target_path * 1.01);
    const double s1 = std::max(strength(ph, spec.interferer_paths[0], spec.wavelength),
                               strength(ph, spec.interferer_paths[1], spec.wavelength));
    CHECK(evaluate_objective(ph, spec) ==
          doctest::Approx(strength(ph, spec.target_path, spec.wavelength) - 1.7 * s1));
}

TEST_CASE("continuous alignment is a fixed point")
{
    auto spec = NearfieldDesignSpec::from_scenario(reference_scenario());
    spec.eta = 0.0;
    spec.levels = 0;
    const auto d = ao_optimize(spec);
    CHECK(d.s2 == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(d.trace.updates == 0);
    for (std::size_t k = 0; k < d.initial.size(); ++k)
        CHECK(d.theta.phases()[k] == doctest::Approx(wrap_phase(d.initial[k])));
}

TEST_CASE("2-bit alignment")
{
    auto spec = NearfieldDesignSpec::from_scenario(reference_scenario());
    spec.eta = 0.0;
    const auto d = ao_optimize(spec);
    CHECK(d.theta.bits() == 2);
    CHECK(d.s2 >= 0.707 * 100.0);
    const auto naive = quantize_reflection(ReflectionConfig(init_phases(spec.target_path, spec.wavelength)), 2);
    CHECK(d.s2 >= signal_strength(naive.phases(), spec.target_path, spec.wavelength) - 1e-12);
}

TEST_CASE("reference scenario suppression")
{
    const auto spec = NearfieldDesignSpec::from_scenario(reference_scenario());
    REQUIRE(spec.eta == 1.0);
    REQUIRE(spec.levels == 4);
    const auto d = ao_optimize(spec);
    CHECK(d.trace.converged);
    CHECK(d.s1_max <= 0.2 * d.s2);
    CHECK(d.s2 == doctest::Approx(signal_strength(d.theta.phases(), spec.target_path, spec.wavelength)));
}

TEST_CASE("ascent is monotone and bounded")
{
    std::mt19937_64 g(3);
    for (int t = 0; t < 20; ++t)
    {
        auto spec = random_spec(g, 16, 0.5 + t * 0.2);
        spec.interferer_paths.push_back(RVec(spec.interferer_paths[0].reverse()));
        if (t % 2)
            spec.order_seed = std::uint64_t(t);
        const auto d = ao_optimize(spec);
        const auto &u = d.trace.update_objectives;
        for (std::size_t i = 1; i < u.size(); ++i)
            CHECK(u[i] >= u[i - 1]);
        const auto &s = d.trace.sweep_objectives;
        for (std::size_t i = 1; i < s.size(); ++i)
            CHECK(s[i] >= s[i - 1]);
        for (double v : u)
            CHECK(v <= 16.0);
        CHECK(d.s2 <= 16.0 + 1e-12);
        CHECK(evaluate_objective(d.theta.phases(), spec) <= d.s2 + 1e-12);
    }
}

TEST_CASE("AO finds the lattice optimum on three elements")
{
    // Random physical layouts: three elements in a row, random Tx, interferer and Rx placement.
    std::mt19937_64 g(42);
    std::uniform_real_distribution<double> az(-60.0, 60.0), dc(1.0, 6.0);
    int hits = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t)
    {
        const double a = az(g), b = az(g);
        Scenario s = reference_scenario(deg2rad(a), deg2rad(b), dc(g));
        s.rx_position = tx_position_from_azimuth(deg2rad(az(g)), dc(g));
        s.nx = 1;
        s.ny = 3;
        const auto spec = NearfieldDesignSpec::from_scenario(s);
        double best = -1e300;
        for (int c = 0; c < 64; ++c)
        {
            const std::vector<double> ph{pi / 2 * (c % 4), pi / 2 * (c / 4 % 4), pi / 2 * (c / 16)};
            best = std::max(best, evaluate_objective(ph, spec));
        }
        const auto d = ao_optimize(spec);
        hits += evaluate_objective(d.theta.phases(), spec) >= best - 1e-9;
    }
    CHECK(hits >= 190);
}

TEST_CASE("lattice-step global shifts leave the objective unchanged")
{
    std::mt19937_64 g(5);
    const auto spec = random_spec(g, 8, 1.0);
    const auto d = ao_optimize(spec);
    std::vector<double> shifted = d.theta.phases();
    for (auto &p : shifted)
        p += pi / 2;
    CHECK(evaluate_objective(shifted, spec) == doctest::Approx(evaluate_objective(d.theta.phases(), spec)));
}

TEST_CASE("larger eta suppresses harder")
{
    auto spec = NearfieldDesignSpec::from_scenario(reference_scenario());
    double prev_q = 1e300, prev_c = 1e300;
    for (double eta : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0})
    {
        spec.eta = eta;
        spec.levels = 4;
        const auto q = ao_optimize(spec);
        spec.levels = 0;
        const auto c = ao_optimize(spec);
        CHECK(q.s1_max <= prev_q + 1e-9);
        CHECK(c.s1_max <= prev_c + 1e-9);
        prev_q = q.s1_max;
        prev_c = c.s1_max;
    }
    // Past this point lattice fixed points are no longer ordered in eta, but stay deep.
    spec.levels = 4;
    spec.eta = 8.0;
    CHECK(ao_optimize(spec).s1_max < 0.05 * 20.0);
}

TEST_CASE("snap_phase")
{
    CHECK(snap_phase(0.0, 4) == 0.0);
    CHECK(snap_phase(0.9 * pi / 2, 4) == doctest::Approx(pi / 2));
    CHECK(snap_phase(pi / 4, 4) == 0.0);
    CHECK(snap_phase(two_pi - 0.01, 4) == 0.0);
}

TEST_CASE("spec validation")
{
    std::mt19937_64 g(6);
    auto spec = random_spec(g, 4, -1.0);
    CHECK_THROWS(spec.validate());
    spec.eta = 1.0;
    spec.levels = 1;
    CHECK_THROWS(spec.validate());
    spec.levels = 4;
    spec.interferer_paths.clear();
    CHECK_NOTHROW(spec.validate());
}
