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

#include "riss/rng.hpp"
#include "riss/sdp.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>

using namespace riss;

namespace {

CMat outer(const CVec &a) { return a * a.adjoint(); }

CVec random_vec(Rng &rng, Eigen::Index n)
{
    CVec v(n);
    for (auto &x : v)
        x = rng.complex_normal();
    return v;
}

SdpProblem alignment_problem(const CVec &a)
{
    SdpProblem p;
    p.objective = outer(a);
    p.diagonal = RVec::Ones(a.size());
    return p;
}

// Best <C, x x^H> over 2-bit phase vectors with x_0 = 1.
double best_quantized(const CMat &C, const std::vector<CMat> &A, const std::vector<double> &b)
{
    const Eigen::Index n = C.rows();
    double best = -1e300;
    std::size_t combos = 1;
    for (Eigen::Index k = 1; k < n; ++k)
        combos *= 4;
    for (std::size_t c = 0; c < combos; ++c)
    {
        CVec x(n);
        x(0) = 1.0;
        std::size_t code = c;
        for (Eigen::Index k = 1; k < n; ++k, code /= 4)
            x(k) = std::polar(1.0, pi / 2 * double(code % 4));
        bool ok = true;
        for (std::size_t i = 0; i < A.size(); ++i)
            ok = ok && std::real(cplx(x.adjoint() * A[i] * x)) <= b[i];
        if (ok)
            best = std::max(best, std::real(cplx(x.adjoint() * C * x)));
    }
    return best;
}

} // namespace

TEST_CASE("two-element alignment reaches the closed-form optimum")
{
    const CVec a = CVec::Ones(2) / std::sqrt(2.0);
    const auto sol = solve_sdp(alignment_problem(a));
    CHECK(sol.status == SdpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-6));
    // X = v v^H with v phase-aligned to a.
    CHECK((sol.X - CMat::Ones(2, 2)).norm() < 1e-4);
}

TEST_CASE("phase-rotated alignment")
{
    Rng rng(1);
    for (int t = 0; t < 5; ++t)
    {
        const CVec a = random_vec(rng, 5);
        const auto sol = solve_sdp(alignment_problem(a));
        const double expect = std::pow(a.cwiseAbs().sum(), 2);
        CHECK(sol.status == SdpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("a constraint on the objective direction forces zero")
{
    SdpProblem p = alignment_problem(CVec::Ones(2) / std::sqrt(2.0));
    p.inequality.push_back(p.objective);
    p.bounds.push_back(0.0);
    const auto sol = solve_sdp(p);
    CHECK(std::abs(sol.objective) < 1e-5);
    const CVec a = CVec::Ones(2) / std::sqrt(2.0);
    CHECK(std::abs(cplx(a.adjoint() * sol.X * a)) < 1e-5);
}

TEST_CASE("relaxation dominates every feasible 2-bit rank-one point")
{
    Rng rng(2);
    for (int t = 0; t < 5; ++t)
    {
        SdpProblem p = alignment_problem(random_vec(rng, 4));
        const CVec a1 = random_vec(rng, 4);
        p.inequality.push_back(outer(a1));
        p.bounds.push_back(0.5 * a1.squaredNorm());
        const auto sol = solve_sdp(p);
        REQUIRE(sol.status == SdpStatus::optimal);
        const double q = best_quantized(p.objective, p.inequality, p.bounds);
        CHECK(sol.objective >= q - 1e-6);
        // Solution satisfies its constraints.
        CHECK(std::real(sol.X.diagonal()(2)) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::real(cplx((p.inequality[0].adjoint() * sol.X).trace())) <= p.bounds[0] + 1e-6);
        CHECK(Eigen::SelfAdjointEigenSolver<CMat>(sol.X).eigenvalues().minCoeff() >= -1e-7);
    }
}

TEST_CASE("duality and complementarity at termination")
{
    Rng rng(3);
    SdpProblem p = alignment_problem(random_vec(rng, 8));
    for (int k = 0; k < 3; ++k)
    {
        p.inequality.push_back(outer(random_vec(rng, 8)));
        p.bounds.push_back(1.0);
    }
    SdpOptions opt;
    const auto sol = solve_sdp(p, opt);
    REQUIRE(sol.status == SdpStatus::optimal);
    const double scale = 1.0 + std::abs(sol.objective) + std::abs(sol.dual_objective);
    CHECK(std::abs(sol.dual_objective - sol.objective) <= opt.accuracy * scale);
    const double compl_ = std::real(cplx((sol.X * sol.Z).trace()));
    CHECK(compl_ >= -1e-9);
    CHECK(compl_ <= 10.0 * opt.accuracy * scale);
    // Maximisation: on (near-)feasible iterates the dual value bounds the primal from above.
    for (const auto &h : sol.history)
        if (h.primal_residual < 1e-9 && h.dual_residual < 1e-9)
            CHECK(h.dual >= h.primal - 1e-7 * (1.0 + std::abs(h.primal)));
}

TEST_CASE("objective invariant under a diagonal unitary change of basis")
{
    Rng rng(4);
    SdpProblem p = alignment_problem(random_vec(rng, 6));
    p.inequality.push_back(outer(random_vec(rng, 6)));
    p.bounds.push_back(0.3);
    const auto base = solve_sdp(p);

    CVec d(6);
    for (auto &x : d)
        x = std::polar(1.0, rng.uniform() * two_pi);
    const CMat D = d.asDiagonal();
    SdpProblem q = p;
    q.objective = D * p.objective * D.adjoint();
    q.inequality[0] = D * p.inequality[0] * D.adjoint();
    const auto rot = solve_sdp(q);
    CHECK(std::abs(rot.objective - base.objective) <= 2e-7 * (1.0 + std::abs(base.objective)));
}

TEST_CASE("real embedding preserves the optimal value")
{
    Rng rng(5);
    SdpProblem p = alignment_problem(random_vec(rng, 4));
    p.inequality.push_back(outer(random_vec(rng, 4)));
    p.bounds.push_back(0.2);
    const auto c = solve_sdp(p);
    const auto r = solve_sdp(real_embedding(p));
    CHECK(r.status == SdpStatus::optimal);
    CHECK(r.objective == doctest::Approx(c.objective).epsilon(1e-5));
}

TEST_CASE("rank penalty block")
{
    Rng rng(6);
    const CVec a = random_vec(rng, 5);
    SdpProblem p = alignment_problem(a);
    // V spans the complement of a random unit vector.
    const CVec u = random_vec(rng, 5).normalized();
    Eigen::SelfAdjointEigenSolver<CMat> es(outer(u));
    p.rank_basis = es.eigenvectors().leftCols(4);
    p.r_cost = 3.0;
    const auto sol = solve_sdp(p);
    REQUIRE(sol.status == SdpStatus::optimal);
    const CMat VXV = p.rank_basis->adjoint() * sol.X * *p.rank_basis;
    const double lmax = Eigen::SelfAdjointEigenSolver<CMat>(VXV).eigenvalues().maxCoeff();
    CHECK(sol.r >= lmax - 1e-6);
    CHECK(sol.r == doctest::Approx(lmax).epsilon(1e-4));

    SdpProblem bad = p;
    bad.rank_basis = CMat::Ones(5, 4);
    CHECK_THROWS(bad.validate());
}

TEST_CASE("infeasible programs are detected")
{
    SdpProblem p = alignment_problem(CVec::Ones(3));
    p.inequality.push_back(CMat::Identity(3, 3));
    p.bounds.push_back(1.0); // tr X = 3 is forced by the diagonal
    const auto sol = solve_sdp(p);
    CHECK(sol.status == SdpStatus::infeasible);
}

TEST_CASE("warm start reaches the same point")
{
    Rng rng(7);
    SdpProblem p = alignment_problem(random_vec(rng, 10));
    p.inequality.push_back(outer(random_vec(rng, 10)));
    p.bounds.push_back(0.5);
    const auto cold = solve_sdp(p);
    p.bounds[0] = 0.45;
    const auto warm = solve_sdp(p, {}, &cold);
    const auto ref = solve_sdp(p);
    CHECK(warm.status == SdpStatus::optimal);
    CHECK(warm.objective == doctest::Approx(ref.objective).epsilon(1e-6));
}

TEST_CASE("problems round-trip through the text format")
{
    Rng rng(8);
    SdpProblem p = alignment_problem(random_vec(rng, 3));
    p.inequality.push_back(outer(random_vec(rng, 3)));
    p.bounds.push_back(0.25);
    p.trace_bound = 3.0;
    std::stringstream ss;
    dump_problem(ss, p);
    const SdpProblem q = load_problem(ss);
    CHECK((q.objective - p.objective).norm() == 0.0);
    CHECK((q.inequality[0] - p.inequality[0]).norm() == 0.0);
    CHECK(q.bounds == p.bounds);
    CHECK(q.trace_bound == p.trace_bound);
    CHECK(q.diagonal == p.diagonal);

    std::stringstream bad("riss-sdp 9\n");
    CHECK_THROWS(load_problem(bad));
}

TEST_CASE("solver is deterministic")
{
    Rng rng(9);
    SdpProblem p = alignment_problem(random_vec(rng, 6));
    const auto a = solve_sdp(p), b = solve_sdp(p);
    CHECK((a.X - b.X).norm() == 0.0);
    CHECK(a.iterations == b.iterations);
}
