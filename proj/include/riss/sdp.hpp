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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <type_traits>
#include <vector>

namespace riss {

// maximize   <C0, X> - r_cost * r
// subject to diag(X) = diagonal
//            <A_k, X> <= bound_k
//            r I - V^H X V >= 0      (only when rank_basis is set)
//            X >= 0
// with <A, B> = Re tr(A^H B). Without a rank basis the variable r does not exist and reads 0.
template <typename Scalar>
struct SdpProblemT
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Matrix objective;
    RVec diagonal;
    std::vector<Matrix> inequality;
    std::vector<double> bounds;
    std::optional<Matrix> rank_basis;
    double r_cost = 0.0;
    std::optional<double> trace_bound; // implied by the diagonal; only checked

    Eigen::Index dimension() const { return objective.rows(); }

    // Shapes, Hermitian data, orthonormal V (1e-10) and the trace bound against the diagonal.
    void validate() const;
};

using SdpProblem = SdpProblemT<cplx>;
using RealSdpProblem = SdpProblemT<double>;

enum class SdpStatus
{
    optimal,
    max_iterations,
    infeasible
};

const char *to_string(SdpStatus status);

// Per-iteration record, objectives in maximization form. `dual` is the Lagrangian bound
// tau^T z + d^T y; `complementarity` is <S, Z> summed over all cones.
struct SdpIterate
{
    double primal = 0.0;
    double dual = 0.0;
    double complementarity = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double step = 0.0;
};

template <typename Scalar>
struct SdpSolutionT
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Matrix X;
    double r = 0.0;
    double objective = 0.0;
    double dual_objective = 0.0;
    SdpStatus status = SdpStatus::max_iterations;
    double accuracy = 0.0; // max of relative residuals and relative gap
    int iterations = 0;

    // Dual variables: Z for X >= 0, Z1 for the rank block, z for the inequalities, y for the diagonal.
    Matrix Z;
    Matrix Z1;
    RVec z;
    RVec y;

    std::vector<SdpIterate> history;
};

using SdpSolution = SdpSolutionT<cplx>;
using RealSdpSolution = SdpSolutionT<double>;

struct SdpOptions
{
    double accuracy = 1e-7;
    int max_iterations = 100;
    double step_fraction = 0.98;
    // Blend weight of the default interior start when warm starting (1 = ignore the warm start).
    double warm_blend = 0.5;
};

// Infeasible-start primal-dual interior point method, Nesterov-Todd scaling, Mehrotra
// predictor-corrector. `warm_start` supplies primal and dual iterates of a related problem.
template <typename Scalar>
SdpSolutionT<Scalar> solve_sdp(const SdpProblemT<Scalar> &problem, const SdpOptions &options = {},
                               const std::type_identity_t<SdpSolutionT<Scalar>> *warm_start = nullptr);

// 2N x 2N real symmetric form [[Re, -Im], [Im, Re]] with the data halved so that the optimal
// value is unchanged.
RealSdpProblem real_embedding(const SdpProblem &problem);

// Text format:
//   riss-sdp 1
//   dimension N
//   r_cost <w>
//   trace_bound <value | none>
//   diagonal <N values>
//   objective            then N rows of N (re im) pairs
//   inequalities L       then per constraint: "bound <tau>" and N rows
//   rank_basis K         then N rows of K (re im) pairs (K = 0 when absent)
// Numbers are written with max_digits10 so a dump/load round trip is exact.
void dump_problem(std::ostream &out, const SdpProblem &problem);
SdpProblem load_problem(std::istream &in);
void dump_problem(const std::filesystem::path &path, const SdpProblem &problem);
SdpProblem load_problem(const std::filesystem::path &path);

} // namespace riss
