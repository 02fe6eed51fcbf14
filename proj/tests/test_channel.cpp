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

#include "riss/channel.hpp"

#include <random>

using namespace riss;

namespace {

Scenario small_scenario(std::size_t nx, std::size_t ny, std::size_t m)
{
    Scenario s = reference_scenario();
    s.nx = nx;
    s.ny = ny;
    for (auto &tx : s.transmitters)
    {
        const Vec3 c = tx.antennas.front();
        tx.antennas.clear();
        for (std::size_t i = 0; i < m; ++i)
            tx.antennas.push_back(c + Vec3(0.01 * double(i), 0.0, 0.0));
    }
    return s;
}

} // namespace

TEST_CASE("far-field channel with zero increments is all ones")
{
    Scenario s = small_scenario(2, 2, 1);
    FarfieldAngles a;
    a.tx = {AngleSet(pi / 2, pi / 2), AngleSet(pi / 2, pi / 2)};
    a.rx = AngleSet(pi / 2, pi / 2);
    const ChannelSet cs = farfield_channels(s, a, 1.0);
    REQUIRE(cs.G[0].rows() == 4);
    REQUIRE(cs.G[0].cols() == 1);
    CHECK((cs.G[0] - CMat::Ones(4, 1)).norm() < 1e-14);
    CHECK(cs.model == ChannelModel::far);
}

TEST_CASE("far-field channels are rank one and h has norm sqrt(N)")
{
    Scenario s = small_scenario(4, 5, 3);
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0.1, pi - 0.1);
    for (int t = 0; t < 10; ++t)
    {
        FarfieldAngles a;
        a.tx = {AngleSet(u(g), u(g), u(g) - pi / 2), AngleSet(u(g), u(g), u(g) - pi / 2)};
        a.rx = AngleSet(u(g), u(g));
        const ChannelSet cs = farfield_channels(s, a);
        Eigen::JacobiSVD<CMat> svd(cs.G[0]);
        const RVec sv = svd.singularValues();
        CHECK(sv(1) < 1e-10 * sv(0));
        CHECK(cs.h.norm() == doctest::Approx(std::sqrt(20.0)));
        CHECK(cs.loss_rx > 0.0);
        CHECK(cs.loss_tx[1] > 0.0);
    }
}

TEST_CASE("near-field channels are unit-modulus distance phases")
{
    const Scenario s = reference_scenario();
    const ChannelSet cs = nearfield_channels(s);
    const auto t = distances(s);
    const double lambda = s.wavelength();
    for (Eigen::Index k = 0; k < cs.h.size(); ++k)
    {
        CHECK(std::abs(cs.h(k)) == doctest::Approx(1.0));
        const double ph = -two_pi * t.surface_to_rx(k) / lambda;
        CHECK(std::abs(cs.h(k) - cplx(std::cos(ph), std::sin(ph))) < 1e-9);
        // Doubling the distance squares the phase factor.
        const double ph2 = -two_pi * 2.0 * t.surface_to_rx(k) / lambda;
        CHECK(std::abs(cs.h(k) * cs.h(k) - cplx(std::cos(ph2), std::sin(ph2))) < 1e-9);
        CHECK(std::abs(cs.G[1](k, 0)) == doctest::Approx(1.0));
    }
}

TEST_CASE("an element exactly one wavelength away has unit phase")
{
    Scenario s = reference_scenario();
    s.nx = s.ny = 1;
    s.rx_position = Vec3(0.0, 0.0, 7.0 * s.wavelength());
    const ChannelSet cs = nearfield_channels(s);
    CHECK(std::abs(cs.h(0) - 1.0) < 1e-9);
}

TEST_CASE("path loss")
{
    CHECK(path_loss(1.7, 0.1) / path_loss(3.4, 0.1) == doctest::Approx(4.0));
    CHECK(path_loss(3.5, 0.0857) == doctest::Approx(3.80e-6).epsilon(2e-3));
    CHECK(path_loss(1e12, 0.1) < 1e-25);
    CHECK_THROWS(path_loss(0.0, 0.1));
    CHECK_THROWS(path_loss(-1.0, 0.1));
}

TEST_CASE("MRT beamformer")
{
    CHECK(std::abs(mrt_beamformer(0.3, 2.0, 1)(0) - std::sqrt(2.0)) < 1e-15);
    std::mt19937_64 g(9);
    std::uniform_real_distribution<double> u(-pi, pi);
    std::normal_distribution<double> n;
    for (int t = 0; t < 20; ++t)
    {
        const double w = u(g);
        const CVec v = mrt_beamformer(w, 3.0, 6);
        const CVec beta = steering_ula(w, 6);
        CHECK(v.squaredNorm() == doctest::Approx(3.0));
        CHECK(std::abs(cplx(beta.transpose() * v)) == doctest::Approx(std::sqrt(3.0)));
        CVec other(6);
        for (auto &x : other)
            x = cplx(n(g), n(g));
        other *= std::sqrt(3.0) / other.norm();
        CHECK(std::abs(cplx(beta.transpose() * other)) <= std::sqrt(3.0) + 1e-12);
    }
    CHECK_THROWS(mrt_beamformer(0.0, 0.0, 2));
}

TEST_CASE("effective gain basics")
{
    Scenario s = small_scenario(1, 1, 1);
    const ChannelSet cs = nearfield_channels(s, 1.0);
    const auto g = effective_gain(cs, ReflectionConfig::identity(1), {CVec::Ones(1), CVec::Ones(1)});
    CHECK(std::abs(g[0] - cs.h(0) * cs.G[0](0, 0)) < 1e-15);

    CHECK_THROWS(effective_gain(cs, ReflectionConfig::identity(2), {CVec::Ones(1), CVec::Ones(1)}));
    CHECK_THROWS(effective_gain(cs, ReflectionConfig::identity(1), {CVec::Ones(1)}));
}

TEST_CASE("distance-conjugate phases stack every element")
{
    const Scenario s = reference_scenario();
    const ChannelSet cs = nearfield_channels(s, 1.0);
    const auto t = distances(s);
    std::vector<double> ph(100);
    for (std::size_t k = 0; k < 100; ++k)
    {
        const auto i = Eigen::Index(k);
        ph[k] = two_pi * (t.tx_to_surface[1](0, i) + t.surface_to_rx(i)) / s.wavelength();
    }
    const auto g = effective_gain(cs, ReflectionConfig(ph), {CVec::Ones(1), CVec::Ones(1)});
    CHECK(std::abs(g[1]) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(std::abs(g[0]) < 100.0);
}

TEST_CASE("random reflections respect the triangle bound and rotate with a global offset")
{
    const Scenario s = small_scenario(6, 6, 2);
    const ChannelSet cs = farfield_channels(s, farfield_angles(s));
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    const std::vector<CVec> v{mrt_beamformer(0.2, 1.0, 2), mrt_beamformer(-0.4, 1.0, 2)};
    for (int t = 0; t < 20; ++t)
    {
        std::vector<double> ph(36), shifted(36);
        const double offset = u(gen);
        for (std::size_t k = 0; k < 36; ++k)
        {
            ph[k] = u(gen);
            shifted[k] = ph[k] + offset;
        }
        const auto g = effective_gain(cs, ReflectionConfig(ph), v);
        const auto gs = effective_gain(cs, ReflectionConfig(shifted), v);
        for (std::size_t i = 0; i < 2; ++i)
        {
            const double bound = std::sqrt(cs.loss_tx[i] * cs.loss_rx) * cs.h.norm() * (cs.G[i] * v[i]).norm();
            CHECK(std::abs(g[i]) <= bound * (1 + 1e-12));
            CHECK(std::abs(gs[i] - g[i] * std::polar(1.0, offset)) < 1e-12 * bound);
        }
        // Linear in v.
        const auto g2 = effective_gain(cs, ReflectionConfig(ph), {2.0 * v[0], cplx(0, 1) * v[1]});
        CHECK(std::abs(g2[0] - 2.0 * g[0]) < 1e-12 * std::abs(g[0]) + 1e-30);
        CHECK(std::abs(g2[1] - cplx(0, 1) * g[1]) < 1e-12 * std::abs(g[1]) + 1e-30);
    }
}

TEST_CASE("quantization never beats the continuous alignment")
{
    const Scenario s = reference_scenario();
    const ChannelSet cs = nearfield_channels(s, 1.0);
    const CVec p = cs.h.cwiseProduct(cs.G[1].col(0));
    std::vector<double> ph(100);
    for (std::size_t k = 0; k < 100; ++k)
        ph[k] = -std::arg(p(Eigen::Index(k)));
    const ReflectionConfig cont(ph);
    const std::vector<CVec> v{CVec::Ones(1), CVec::Ones(1)};
    const double best = std::abs(effective_gain(cs, cont, v)[1]);
    for (unsigned b : {1u, 2u, 3u})
        CHECK(std::abs(effective_gain(cs, quantize_reflection(cont, b), v)[1]) <= best + 1e-9);
}

TEST_CASE("near-field profile approaches the plane wave far away")
{
    const Scenario s = reference_scenario(deg2rad(10.0), deg2rad(-20.0), 400.0);
    const ChannelSet nf = nearfield_channels(s, 1.0);
    const ChannelSet ff = farfield_channels(s, farfield_angles(s), 1.0);
    // Compare phase profiles after removing the common bulk phase.
    const CVec ratio = nf.G[1].col(0).cwiseProduct(ff.G[1].col(0).conjugate());
    const cplx bulk = ratio.sum() / std::abs(ratio.sum());
    double acc = 0.0;
    for (Eigen::Index k = 0; k < ratio.size(); ++k)
        acc += std::pow(std::arg(ratio(k) / bulk), 2);
    CHECK(std::sqrt(acc / double(ratio.size())) < 1e-2);
}

TEST_CASE("reflection configuration invariants")
{
    const ReflectionConfig r({-0.5, 7.0, two_pi});
    for (double p : r.phases())
    {
        CHECK(p >= 0.0);
        CHECK(p < two_pi);
    }
    CHECK(r.diagonal().cwiseAbs().isApprox(RVec::Ones(3)));
    CHECK_THROWS(ReflectionConfig({0.3}, 2));
    CHECK_NOTHROW(ReflectionConfig({pi / 2, pi}, 2));
    CHECK_THROWS(ReflectionConfig({std::nan("")}));
    CHECK(ReflectionConfig({3 * pi / 2}, 2).level(0) == 3);
}

TEST_CASE("quantize_reflection")
{
    const auto q = quantize_reflection(ReflectionConfig({0.0, 0.9 * pi / 2, pi / 4, 2 * pi - 0.1}), 2);
    CHECK(q.phases()[0] == 0.0);
    CHECK(q.phases()[1] == doctest::Approx(pi / 2));
    CHECK(q.phases()[2] == 0.0); // tie rounds down
    CHECK(q.phases()[3] == 0.0);
    CHECK(q.bits() == 2);
    CHECK_THROWS(quantize_reflection(q, 0));

    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    std::vector<double> ph(500);
    for (auto &p : ph)
        p = u(g);
    for (unsigned b = 1; b <= 4; ++b)
    {
        const auto r = quantize_reflection(ReflectionConfig(ph), b);
        for (std::size_t k = 0; k < ph.size(); ++k)
        {
            const double e = std::abs(std::arg(std::polar(1.0, r.phases()[k] - ph[k])));
            CHECK(e <= pi / double(1u << b) + 1e-12);
        }
    }
}
