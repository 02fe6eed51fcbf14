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

#include "riss/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace riss {

namespace {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
double inner(const Mat<S> &A, const Mat<S> &B)
{
    return std::real(A.cwiseProduct(B.conjugate()).sum());
}

template <typename S>
Mat<S> herm(const Mat<S> &A)
{
    return (A + A.adjoint()) * S(0.5);
}

template <typename S>
bool is_hermitian(const Mat<S> &A, double tol)
{
    return A.rows() == A.cols() && (A - A.adjoint()).norm() <= tol * std::max(1.0, A.norm());
}

// One element of the product cone: X block, rank block, inequality slacks.
template <typename S>
struct Cone
{
    Mat<S> X;
    Mat<S> L;
    RVec v;
};

template <typename S>
double dot(const Cone<S> &a, const Cone<S> &b)
{
    double d = inner<S>(a.X, b.X) + a.v.dot(b.v);
    if (a.L.size())
        d += inner<S>(a.L, b.L);
    return d;
}

template <typename S>
double squared_norm(const Cone<S> &a)
{
    return a.X.squaredNorm() + a.L.squaredNorm() + a.v.squaredNorm();
}

template <typename S>
Cone<S> axpy(const Cone<S> &x, double alpha, const Cone<S> &d)
{
    Cone<S> out{herm<S>(x.X + S(alpha) * d.X), Mat<S>(), x.v + alpha * d.v};
    if (x.L.size())
        out.L = herm<S>(x.L + S(alpha) * d.L);
    return out;
}

// Nesterov-Todd scaling of one semidefinite block: R^H Z R = R^-1 S R^-H = diag(lambda).
template <typename S>
struct NtBlock
{
    Mat<S> R;
    Mat<S> Rinv;
    RVec lambda;
};

template <typename S>
NtBlock<S> nt_scaling(const Mat<S> &s, const Mat<S> &z)
{
    Eigen::LLT<Mat<S>> cs(s);
    Eigen::LLT<Mat<S>> cz(z);
    if (cs.info() != Eigen::Success || cz.info() != Eigen::Success)
        throw NumericalError("solve_sdp: iterate left the semidefinite cone");
    const Mat<S> Ls = cs.matrixL();
    const Mat<S> Lz = cz.matrixL();
    Eigen::BDCSVD<Mat<S>> svd(Lz.adjoint() * Ls, Eigen::ComputeThinU | Eigen::ComputeThinV);
    NtBlock<S> nt;
    nt.lambda = svd.singularValues();
    if (!(nt.lambda.minCoeff() > 0.0))
        throw NumericalError("solve_sdp: degenerate scaling point");
    const Mat<S> V = svd.matrixV();
    const Eigen::Matrix<S, Eigen::Dynamic, 1> isq = nt.lambda.cwiseSqrt().cwiseInverse().template cast<S>();
    const Eigen::Matrix<S, Eigen::Dynamic, 1> sq = nt.lambda.cwiseSqrt().template cast<S>();
    nt.R = Ls * V * isq.asDiagonal();
    const Mat<S> LsiHV = Ls.adjoint().template triangularView<Eigen::Upper>().solve(V);
    nt.Rinv = (LsiHV * sq.asDiagonal()).adjoint();
    return nt;
}

// Largest alpha with diag(lambda) + alpha * d >= 0.
template <typename S>
double max_step(const RVec &lambda, const Mat<S> &d)
{
    if (lambda.size() == 0)
        return std::numeric_limits<double>::infinity();
    const Eigen::Matrix<S, Eigen::Dynamic, 1> isq = lambda.cwiseSqrt().cwiseInverse().template cast<S>();
    const Mat<S> M = isq.asDiagonal() * d * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(herm<S>(M), Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    return mn >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / mn;
}

// x o y = (x y + y x) / 2 in the scaled space.
template <typename S>
Mat<S> jordan(const Mat<S> &x, const Mat<S> &y)
{
    return (x * y + y * x) * S(0.5);
}

// lambda^-1 "o" rhs: solution of (L D + D L) / 2 = rhs for diagonal L.
template <typename S>
Mat<S> lyap_div(const RVec &lambda, const Mat<S> &rhs)
{
    Mat<S> out(rhs.rows(), rhs.cols());
    for (Eigen::Index j = 0; j < rhs.cols(); ++j)
        for (Eigen::Index i = 0; i < rhs.rows(); ++i)
            out(i, j) = S(2.0 / (lambda(i) + lambda(j))) * rhs(i, j);
    return out;
}

template <typename S>
class InteriorPoint
{
  public:
    InteriorPoint(const SdpProblemT<S> &p, const SdpOptions &opt) : p_(p), opt_(opt)
    {
        n_ = p.dimension();
        nineq_ = Eigen::Index(p.inequality.size());
        lmi_ = p.rank_basis.has_value();
        if (lmi_)
        {
            V_ = *p.rank_basis;
            k_ = V_.cols();
        }
        tau_ = RVec(nineq_);
        for (Eigen::Index i = 0; i < nineq_; ++i)
            tau_(i) = p.bounds[std::size_t(i)];
        nu_ = double(n_ + (lmi_ ? k_ : 0) + nineq_);
        norm_c_ = std::sqrt(p.objective.squaredNorm() + p.r_cost * p.r_cost);
        norm_hb_ = std::sqrt(tau_.squaredNorm() + p.diagonal.squaredNorm());
    }

    SdpSolutionT<S> run(const SdpSolutionT<S> *warm)
    {
        initialise(warm);
        SdpSolutionT<S> best;
        double best_merit = std::numeric_limits<double>::infinity();
        int stalled = 0;

        for (int it = 0;; ++it)
        {
            residuals();
            const double pobj = inner<S>(p_.objective, X_) - p_.r_cost * r_;
            const double dobj = tau_.dot(z_.v) + p_.diagonal.dot(y_);
            const double compl_ = dot(s_, z_);
            const double pres = std::sqrt(squared_norm(rp_) + rb_.squaredNorm()) / (1.0 + norm_hb_);
            const double dres = std::sqrt(rdX_.squaredNorm() + rdr_ * rdr_) / (1.0 + norm_c_);
            const double gap = std::max(std::abs(dobj - pobj), compl_) / (1.0 + std::abs(pobj) + std::abs(dobj));
            const double merit = std::max({pres, dres, gap});

            history_.push_back({pobj, dobj, compl_, pres, dres, last_step_});
            if (merit < best_merit)
            {
                best_merit = merit;
                best = snapshot(pobj, dobj, merit, it);
            }
            if (pres <= opt_.accuracy && dres <= opt_.accuracy && gap <= opt_.accuracy)
            {
                best = snapshot(pobj, dobj, merit, it);
                best.status = SdpStatus::optimal;
                break;
            }
            if (infeasibility_certificate())
            {
                best = snapshot(pobj, dobj, merit, it);
                best.status = SdpStatus::infeasible;
                break;
            }
            if (it >= opt_.max_iterations || stalled >= 5)
            {
                best.status = SdpStatus::max_iterations;
                break;
            }

            try
            {
                iterate();
            }
            catch (const NumericalError &)
            {
                // Numerical breakdown near the boundary: report the best iterate seen.
                best.status = SdpStatus::max_iterations;
                break;
            }
            stalled = last_step_ < 1e-8 ? stalled + 1 : 0;
        }
        best.history = history_;
        return best;
    }

  private:
    const SdpProblemT<S> &p_;
    SdpOptions opt_;
    Eigen::Index n_ = 0, k_ = 0, nineq_ = 0;
    bool lmi_ = false;
    Mat<S> V_;
    RVec tau_;
    double nu_ = 1.0, norm_c_ = 0.0, norm_hb_ = 0.0;

    // Iterate.
    Mat<S> X_;
    double r_ = 0.0;
    RVec y_;
    Cone<S> s_, z_;

    // Residuals.
    Mat<S> rdX_;
    double rdr_ = 0.0;
    RVec rb_;
    Cone<S> rp_;

    // Scaling and factorisation.
    NtBlock<S> nt0_, nt1_;
    RVec lpw_, lplam_;
    Mat<S> T_, U_, J_, G1_, bhat_;
    RMat Mden_;
    double beta_ = 0.0;
    std::vector<Mat<S>> ahat_, border_, border_div_;
    Eigen::PartialPivLU<RMat> lu_;

    std::vector<SdpIterate> history_;
    double last_step_ = 0.0;

    Mat<S> diag_matrix(const RVec &v) const
    {
        return v.template cast<S>().asDiagonal();
    }

    void initialise(const SdpSolutionT<S> *warm)
    {
        RVec d0 = p_.diagonal;
        if (!(d0.minCoeff() > 0.0))
            d0 = RVec::Ones(n_);
        Mat<S> Xd = diag_matrix(d0);
        const double zscale = std::max(1.0, p_.objective.norm());
        Mat<S> Zd = Mat<S>::Identity(n_, n_) * S(zscale);
        RVec yd = RVec::Zero(n_);
        RVec zd = RVec::Ones(nineq_);

        const bool use_warm = warm && warm->X.rows() == n_ && warm->Z.rows() == n_ &&
                              warm->z.size() == nineq_ && warm->y.size() == n_;
        if (use_warm)
        {
            const double t = std::clamp(opt_.warm_blend, 0.0, 1.0);
            X_ = herm<S>(S(1.0 - t) * warm->X + S(t) * Xd);
            z_.X = herm<S>(S(1.0 - t) * warm->Z + S(t) * Zd);
            z_.v = (1.0 - t) * warm->z + t * zd;
            y_ = (1.0 - t) * warm->y;
        }
        else
        {
            X_ = Xd;
            z_.X = Zd;
            z_.v = zd;
            y_ = yd;
        }
        s_.X = X_;
        if (lmi_)
        {
            const Mat<S> VXV = herm<S>(V_.adjoint() * X_ * V_);
            Eigen::SelfAdjointEigenSolver<Mat<S>> es(VXV, Eigen::EigenvaluesOnly);
            const double top = es.eigenvalues().maxCoeff();
            r_ = top + std::max(1.0, std::abs(top));
            s_.L = Mat<S>::Identity(k_, k_) * S(r_) - VXV;
            const double w = p_.r_cost > 0.0 ? p_.r_cost / double(k_) : 1.0;
            z_.L = Mat<S>::Identity(k_, k_) * S(w);
        }
        s_.v = RVec(nineq_);
        for (Eigen::Index i = 0; i < nineq_; ++i)
            s_.v(i) = std::max(tau_(i) - inner<S>(p_.inequality[std::size_t(i)], X_), 1.0);
    }

    Cone<S> G(const Mat<S> &X, double r) const
    {
        Cone<S> g{-X, Mat<S>(), RVec(nineq_)};
        if (lmi_)
            g.L = herm<S>(V_.adjoint() * X * V_) - Mat<S>::Identity(k_, k_) * S(r);
        for (Eigen::Index i = 0; i < nineq_; ++i)
            g.v(i) = inner<S>(p_.inequality[std::size_t(i)], X);
        return g;
    }

    // Adjoint of G: X part and r part.
    std::pair<Mat<S>, double> GT(const Cone<S> &c) const
    {
        Mat<S> X = -c.X;
        double r = 0.0;
        if (lmi_)
        {
            X += V_ * c.L * V_.adjoint();
            r = -std::real(c.L.trace());
        }
        for (Eigen::Index i = 0; i < nineq_; ++i)
            X += S(c.v(i)) * p_.inequality[std::size_t(i)];
        return {herm<S>(X), r};
    }

    void residuals()
    {
        auto [gx, gr] = GT(z_);
        rdX_ = herm<S>(gx - p_.objective + diag_matrix(y_));
        rdr_ = lmi_ ? gr + p_.r_cost : 0.0;
        rb_ = X_.diagonal().real() - p_.diagonal;
        const Cone<S> g = G(X_, r_);
        rp_.X = g.X + s_.X;
        if (lmi_)
            rp_.L = g.L + s_.L;
        rp_.v = g.v + s_.v - tau_;
    }

    // Normalised Farkas certificate: G^T z + A^T y -> 0 while -(tau^T z + d^T y) grows.
    bool infeasibility_certificate() const
    {
        const double t = -(tau_.dot(z_.v) + p_.diagonal.dot(y_));
        if (!(t > 0.0))
            return false;
        auto [gx, gr] = GT(z_);
        const Mat<S> ray = herm<S>(gx + diag_matrix(y_));
        const double res = std::sqrt(ray.squaredNorm() + gr * gr);
        return res <= 1e-7 * t && t > 1e6 * (1.0 + norm_c_);
    }

    // Elementwise division by the diagonal K-spectrum in the scaled basis.
    Mat<S> div_m(Mat<S> W) const
    {
        for (Eigen::Index j = 0; j < n_; ++j)
            for (Eigen::Index i = 0; i < n_; ++i)
                W(i, j) /= S(Mden_(i, j));
        return W;
    }

    // diag(T Y T^H) without forming the product.
    RVec t_diag(const Mat<S> &Y) const
    {
        return (T_ * Y).cwiseProduct(T_.conjugate()).rowwise().sum().real();
    }

    Mat<S> t_congruence(const RVec &y) const
    {
        return herm<S>(T_.adjoint() * y.template cast<S>().asDiagonal() * T_);
    }

    // Everything below works in the scaled basis dX = T Xh T^H with T = R0 U, where
    // T^H P0 T = I and T^H Q T = D. P0 and Q are never formed: they carry the full
    // conditioning of the scaling and cancel analytically against T.
    void factorise()
    {
        nt0_ = nt_scaling<S>(s_.X, z_.X);
        RVec D = RVec::Zero(n_);
        U_ = Mat<S>::Identity(n_, n_);
        if (lmi_)
        {
            nt1_ = nt_scaling<S>(s_.L, z_.L);
            const Mat<S> J0 = nt1_.Rinv * V_.adjoint() * nt0_.R;
            Eigen::SelfAdjointEigenSolver<Mat<S>> es(herm<S>(J0.adjoint() * J0));
            D = es.eigenvalues().cwiseMax(0.0);
            U_ = es.eigenvectors();
            J_ = J0 * U_;
            G1_ = herm<S>(nt1_.Rinv * nt1_.Rinv.adjoint());
            beta_ = (nt1_.Rinv.adjoint() * nt1_.Rinv).squaredNorm();
        }
        T_ = nt0_.R * U_;
        lplam_ = (s_.v.array() * z_.v.array()).sqrt().matrix();
        lpw_ = (s_.v.array() / z_.v.array()).sqrt().matrix();
        Mden_ = RMat::Ones(n_, n_) + D * D.transpose();

        // Border: inequality matrices, -B for r, then the unit diagonal matrices for y.
        ahat_.clear();
        for (const auto &A : p_.inequality)
            ahat_.push_back(herm<S>(T_.adjoint() * A * T_));
        border_ = ahat_;
        if (lmi_)
        {
            bhat_ = herm<S>(J_.adjoint() * G1_ * J_);
            border_.push_back(-bhat_);
        }
        const Eigen::Index nb = Eigen::Index(border_.size());
        border_div_.clear();
        for (const auto &F : border_)
            border_div_.push_back(div_m(F));

        const Eigen::Index m = nb + n_;
        RMat Gm = RMat::Zero(m, m);
        for (Eigen::Index c = 0; c < nb; ++c)
        {
            for (Eigen::Index d = 0; d < nb; ++d)
                Gm(c, d) = inner<S>(border_[std::size_t(c)], border_div_[std::size_t(d)]);
            const RVec v = t_diag(border_div_[std::size_t(c)]);
            Gm.block(nb, c, n_, 1) = v;
            Gm.block(c, nb, 1, n_) = v.transpose();
        }
        Gm.bottomRightCorner(n_, n_) = diagonal_gram();

        for (Eigen::Index i = 0; i < nineq_; ++i)
            Gm(i, i) += s_.v(i) / z_.v(i);
        if (lmi_)
            Gm(nineq_, nineq_) -= beta_;
        lu_.compute(Gm);
    }

    // <E_i, K^-1(E_j)> = sum_ab Re(T_ia conj(T_ib) conj(T_ja) T_jb) / M_ab as a Gram product.
    RMat diagonal_gram() const
    {
        constexpr bool complex = Eigen::NumTraits<S>::IsComplex;
        const Eigen::Index pairs = n_ * (n_ - 1) / 2;
        const Eigen::Index cols = n_ + (complex ? 2 : 1) * pairs;
        RMat W(n_, cols);
        Eigen::Index c = 0;
        for (Eigen::Index a = 0; a < n_; ++a)
        {
            W.col(c++) = T_.col(a).cwiseAbs2() / std::sqrt(Mden_(a, a));
            for (Eigen::Index b = a + 1; b < n_; ++b)
            {
                const double scale = std::sqrt(2.0 / Mden_(a, b));
                const Eigen::Matrix<S, Eigen::Dynamic, 1> w = T_.col(a).cwiseProduct(T_.col(b).conjugate());
                W.col(c++) = scale * w.real();
                if constexpr (complex)
                    W.col(c++) = scale * w.imag();
            }
        }
        return W * W.transpose();
    }

    // Unknowns of the reduced system; X is the scaled direction Xh.
    struct Step
    {
        Mat<S> X;
        double r = 0.0;
        RVec y;
        RVec u; // d_k <A_k, dX>
    };

    struct Rhs
    {
        Mat<S> X;
        RVec u;
        double r = 0.0;
        RVec y;

        double norm() const { return std::sqrt(X.squaredNorm() + u.squaredNorm() + r * r + y.squaredNorm()); }
    };

    // Xh o M + sum u_k Ah_k - r Bh + T^H Diag(y) T = R.X
    // <Ah_k, Xh> - u_k / d_k                      = R.u
    // -<Bh, Xh> + beta r                           = R.r
    // diag(T Xh T^H)                               = R.y
    Step reduced_solve_once(const Rhs &R) const
    {
        const Eigen::Index nb = Eigen::Index(border_.size());
        const Mat<S> X0 = div_m(R.X);
        RVec b(nb + n_);
        for (Eigen::Index i = 0; i < nineq_; ++i)
            b(i) = inner<S>(ahat_[std::size_t(i)], X0) - R.u(i);
        if (lmi_)
            b(nineq_) = -inner<S>(bhat_, X0) - R.r;
        b.tail(n_) = t_diag(X0) - R.y;
        const RVec w = lu_.solve(b);

        Step st;
        st.u = w.head(nineq_);
        st.r = lmi_ ? w(nineq_) : 0.0;
        st.y = w.tail(n_);
        Mat<S> rhs = R.X - t_congruence(st.y);
        for (Eigen::Index c = 0; c < nb; ++c)
            rhs -= S(w(c)) * border_[std::size_t(c)];
        st.X = div_m(rhs);
        return st;
    }

    Rhs apply_reduced(const Step &st) const
    {
        Rhs out;
        out.X = st.X.cwiseProduct(Mden_.template cast<S>()) + t_congruence(st.y);
        out.u = RVec(nineq_);
        for (Eigen::Index i = 0; i < nineq_; ++i)
        {
            out.X += S(st.u(i)) * ahat_[std::size_t(i)];
            out.u(i) = inner<S>(ahat_[std::size_t(i)], st.X) - st.u(i) * s_.v(i) / z_.v(i);
        }
        if (lmi_)
        {
            out.X -= S(st.r) * bhat_;
            out.r = -inner<S>(bhat_, st.X) + beta_ * st.r;
        }
        out.y = t_diag(st.X);
        return out;
    }

    Step reduced_solve(const Rhs &R) const
    {
        Step st = reduced_solve_once(R);
        const double scale = std::max(R.norm(), 1e-300);
        for (int pass = 0; pass < 3; ++pass)
        {
            const Rhs A = apply_reduced(st);
            Rhs e{R.X - A.X, R.u - A.u, R.r - A.r, R.y - A.y};
            if (e.norm() <= 1e-15 * scale)
                break;
            const Step c = reduced_solve_once(e);
            st.X += c.X;
            st.r += c.r;
            st.y += c.y;
            st.u += c.u;
        }
        st.X = herm<S>(st.X);
        return st;
    }

    struct Direction
    {
        Mat<S> X;
        double r = 0.0;
        RVec y;
        Cone<S> ds, dz;
    };

    // Newton direction for scaled complementarity right-hand side `rc` (scaled coordinates).
    Direction newton(const Cone<S> &rc) const
    {
        // Scaled images Rinv T Rinv^H of T = rp + R (lambda^-1 o rc) R^H.
        const Mat<S> Y0 = herm<S>(nt0_.Rinv * rp_.X * nt0_.Rinv.adjoint() + lyap_div<S>(nt0_.lambda, rc.X));
        Mat<S> Y1;
        if (lmi_)
            Y1 = herm<S>(nt1_.Rinv * rp_.L * nt1_.Rinv.adjoint() + lyap_div<S>(nt1_.lambda, rc.L));
        const RVec dTv =
            (z_.v.array() / s_.v.array() * (rp_.v.array() + lpw_.array() * rc.v.array() / lplam_.array())).matrix();

        Rhs R;
        R.X = -T_.adjoint() * rdX_ * T_ + U_.adjoint() * Y0 * U_;
        if (lmi_)
        {
            R.X -= J_.adjoint() * Y1 * J_;
            R.r = -rdr_ + inner<S>(G1_, Y1);
        }
        for (Eigen::Index i = 0; i < nineq_; ++i)
            R.X -= S(dTv(i)) * ahat_[std::size_t(i)];
        R.X = herm<S>(R.X);
        R.u = RVec::Zero(nineq_);
        R.y = -rb_;

        const Step st = reduced_solve(R);
        Direction dir;
        dir.X = herm<S>(T_ * st.X * T_.adjoint());
        dir.r = st.r;
        dir.y = st.y;

        dir.ds.X = herm<S>(dir.X - rp_.X);
        dir.ds.v = RVec(nineq_);
        for (Eigen::Index i = 0; i < nineq_; ++i)
            dir.ds.v(i) = -rp_.v(i) - inner<S>(ahat_[std::size_t(i)], st.X);
        dir.dz.v = st.u + dTv;

        // The X-block multiplier comes from the dual equation; the rank block from its
        // scaled complementarity row.
        Mat<S> dZ0 = rdX_ + diag_matrix(dir.y);
        if (lmi_)
        {
            const Mat<S> GdL = herm<S>(V_.adjoint() * dir.X * V_) - Mat<S>::Identity(k_, k_) * S(dir.r);
            dir.ds.L = herm<S>(-rp_.L - GdL);
            dir.dz.L = herm<S>(nt1_.Rinv.adjoint() * (Y1 + nt1_.Rinv * GdL * nt1_.Rinv.adjoint()) * nt1_.Rinv);
            dZ0 += V_ * dir.dz.L * V_.adjoint();
        }
        for (Eigen::Index i = 0; i < nineq_; ++i)
            dZ0 += S(dir.dz.v(i)) * p_.inequality[std::size_t(i)];
        dir.dz.X = herm<S>(dZ0);
        return dir;
    }

    // Scaled directions ds~ = R^-1 ds R^-H, dz~ = R^H dz R.
    std::pair<Cone<S>, Cone<S>> scaled(const Direction &d) const
    {
        Cone<S> ds, dz;
        ds.X = herm<S>(nt0_.Rinv * d.ds.X * nt0_.Rinv.adjoint());
        dz.X = herm<S>(nt0_.R.adjoint() * d.dz.X * nt0_.R);
        if (lmi_)
        {
            ds.L = herm<S>(nt1_.Rinv * d.ds.L * nt1_.Rinv.adjoint());
            dz.L = herm<S>(nt1_.R.adjoint() * d.dz.L * nt1_.R);
        }
        ds.v = (d.ds.v.array() / lpw_.array()).matrix();
        dz.v = (d.dz.v.array() * lpw_.array()).matrix();
        return {ds, dz};
    }

    double step_length(const Direction &d) const
    {
        auto [ds, dz] = scaled(d);
        double a = std::numeric_limits<double>::infinity();
        a = std::min(a, max_step<S>(nt0_.lambda, ds.X));
        a = std::min(a, max_step<S>(nt0_.lambda, dz.X));
        if (lmi_)
        {
            a = std::min(a, max_step<S>(nt1_.lambda, ds.L));
            a = std::min(a, max_step<S>(nt1_.lambda, dz.L));
        }
        for (Eigen::Index i = 0; i < nineq_; ++i)
        {
            if (ds.v(i) < 0.0)
                a = std::min(a, -lplam_(i) / ds.v(i));
            if (dz.v(i) < 0.0)
                a = std::min(a, -lplam_(i) / dz.v(i));
        }
        return a;
    }

    void iterate()
    {
        factorise();
        const double mu = dot(s_, z_) / nu_;

        // Predictor: drive the scaled complementarity lambda o lambda to zero.
        Cone<S> rc;
        rc.X = -diag_matrix(nt0_.lambda.cwiseAbs2());
        if (lmi_)
            rc.L = -diag_matrix(nt1_.lambda.cwiseAbs2());
        rc.v = -lplam_.cwiseAbs2();
        const Direction aff = newton(rc);
        const double a_aff = std::min(1.0, step_length(aff));
        const double mu_aff = dot(axpy(s_, a_aff, aff.ds), axpy(z_, a_aff, aff.dz)) / nu_;
        const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

        // Corrector with centering and the second-order term.
        auto [dsa, dza] = scaled(aff);
        rc.X += diag_matrix(RVec::Constant(n_, sigma * mu)) - jordan<S>(dsa.X, dza.X);
        if (lmi_)
            rc.L += diag_matrix(RVec::Constant(k_, sigma * mu)) - jordan<S>(dsa.L, dza.L);
        rc.v += (RVec::Constant(nineq_, sigma * mu).array() - dsa.v.array() * dza.v.array()).matrix();
        const Direction dir = newton(rc);
        const double alpha = std::min(1.0, opt_.step_fraction * step_length(dir));

        X_ = herm<S>(X_ + S(alpha) * dir.X);
        r_ += alpha * dir.r;
        y_ += alpha * dir.y;
        s_ = axpy(s_, alpha, dir.ds);
        z_ = axpy(z_, alpha, dir.dz);
        last_step_ = alpha;
    }

    SdpSolutionT<S> snapshot(double pobj, double dobj, double merit, int it) const
    {
        SdpSolutionT<S> sol;
        sol.X = X_;
        sol.r = lmi_ ? r_ : 0.0;
        sol.objective = pobj;
        sol.dual_objective = dobj;
        sol.accuracy = merit;
        sol.iterations = it;
        sol.Z = z_.X;
        sol.Z1 = z_.L;
        sol.z = z_.v;
        sol.y = y_;
        return sol;
    }
};

} // namespace

const char *to_string(SdpStatus status)
{
    switch (status)
    {
    case SdpStatus::optimal:
        return "optimal";
    case SdpStatus::max_iterations:
        return "max-iter";
    case SdpStatus::infeasible:
        return "infeasible";
    }
    return "unknown";
}

template <typename Scalar>
void SdpProblemT<Scalar>::validate() const
{
    const Eigen::Index n = dimension();
    if (n == 0 || objective.cols() != n)
        throw std::invalid_argument("SdpProblem: objective must be a non-empty square matrix");
    if (!is_hermitian<Scalar>(objective, 1e-10))
        throw std::invalid_argument("SdpProblem: objective must be Hermitian");
    if (diagonal.size() != n)
        throw std::invalid_argument("SdpProblem: diagonal length must equal the dimension");
    if (!(diagonal.minCoeff() >= 0.0))
        throw std::invalid_argument("SdpProblem: diagonal must be non-negative");
    if (inequality.size() != bounds.size())
        throw std::invalid_argument("SdpProblem: one bound per inequality required");
    for (const auto &A : inequality)
        if (A.rows() != n || A.cols() != n || !is_hermitian<Scalar>(A, 1e-10))
            throw std::invalid_argument("SdpProblem: inequality matrices must be Hermitian N x N");
    if (rank_basis)
    {
        const auto &V = *rank_basis;
        if (V.rows() != n || V.cols() == 0 || V.cols() > n)
            throw std::invalid_argument("SdpProblem: rank basis must be N x K with 0 < K <= N");
        const Matrix VV = V.adjoint() * V;
        if ((VV - Matrix::Identity(V.cols(), V.cols())).norm() > 1e-10 * std::sqrt(double(V.cols())))
            throw std::invalid_argument("SdpProblem: rank basis columns must be orthonormal");
        if (!(r_cost >= 0.0))
            throw std::invalid_argument("SdpProblem: r cost must be non-negative");
    }
    if (trace_bound && diagonal.sum() > *trace_bound * (1.0 + 1e-12))
        throw std::invalid_argument("SdpProblem: diagonal constraint exceeds the trace bound");
}

template <typename Scalar>
SdpSolutionT<Scalar> solve_sdp(const SdpProblemT<Scalar> &problem, const SdpOptions &options,
                               const std::type_identity_t<SdpSolutionT<Scalar>> *warm_start)
{
    problem.validate();
    if (!(options.accuracy > 0.0))
        throw std::invalid_argument("solve_sdp: accuracy must be positive");
    if (!(options.step_fraction > 0.0 && options.step_fraction < 1.0))
        throw std::invalid_argument("solve_sdp: step fraction must lie in (0, 1)");
    InteriorPoint<Scalar> ipm(problem, options);
    return ipm.run(warm_start);
}

template struct SdpProblemT<cplx>;
template struct SdpProblemT<double>;
template SdpSolutionT<cplx> solve_sdp(const SdpProblemT<cplx> &, const SdpOptions &,
                                      const std::type_identity_t<SdpSolutionT<cplx>> *);
template SdpSolutionT<double> solve_sdp(const SdpProblemT<double> &, const SdpOptions &,
                                        const std::type_identity_t<SdpSolutionT<double>> *);

namespace {

RMat embed(const CMat &A)
{
    const Eigen::Index r = A.rows(), c = A.cols();
    RMat E(2 * r, 2 * c);
    E.topLeftCorner(r, c) = A.real();
    E.topRightCorner(r, c) = -A.imag();
    E.bottomLeftCorner(r, c) = A.imag();
    E.bottomRightCorner(r, c) = A.real();
    return E;
}

} // namespace

RealSdpProblem real_embedding(const SdpProblem &problem)
{
    problem.validate();
    RealSdpProblem out;
    out.objective = 0.5 * embed(problem.objective);
    out.diagonal.resize(2 * problem.diagonal.size());
    out.diagonal << problem.diagonal, problem.diagonal;
    for (const auto &A : problem.inequality)
        out.inequality.push_back(0.5 * embed(A));
    out.bounds = problem.bounds;
    if (problem.rank_basis)
        out.rank_basis = embed(*problem.rank_basis);
    out.r_cost = problem.r_cost;
    if (problem.trace_bound)
        out.trace_bound = 2.0 * *problem.trace_bound;
    return out;
}

namespace {

void write_matrix(std::ostream &out, const CMat &M)
{
    for (Eigen::Index i = 0; i < M.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            out << (j ? " " : "") << M(i, j).real() << ' ' << M(i, j).imag();
        out << '\n';
    }
}

CMat read_matrix(std::istream &in, Eigen::Index rows, Eigen::Index cols)
{
    CMat M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
        {
            double re, im;
            if (!(in >> re >> im))
                throw std::runtime_error("load_problem: truncated matrix");
            M(i, j) = cplx(re, im);
        }
    return M;
}

void expect(std::istream &in, const std::string &word)
{
    std::string w;
    if (!(in >> w) || w != word)
        throw std::runtime_error("load_problem: expected '" + word + "'");
}

} // namespace

void dump_problem(std::ostream &out, const SdpProblem &problem)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    const Eigen::Index n = problem.dimension();
    out << "riss-sdp 1\n";
    out << "dimension " << n << '\n';
    out << "r_cost " << problem.r_cost << '\n';
    out << "trace_bound ";
    if (problem.trace_bound)
        out << *problem.trace_bound << '\n';
    else
        out << "none\n";
    out << "diagonal";
    for (Eigen::Index i = 0; i < n; ++i)
        out << ' ' << problem.diagonal(i);
    out << "\nobjective\n";
    write_matrix(out, problem.objective);
    out << "inequalities " << problem.inequality.size() << '\n';
    for (std::size_t k = 0; k < problem.inequality.size(); ++k)
    {
        out << "bound " << problem.bounds[k] << '\n';
        write_matrix(out, problem.inequality[k]);
    }
    out << "rank_basis " << (problem.rank_basis ? problem.rank_basis->cols() : 0) << '\n';
    if (problem.rank_basis)
        write_matrix(out, *problem.rank_basis);
    out.precision(old);
}

SdpProblem load_problem(std::istream &in)
{
    SdpProblem p;
    expect(in, "riss-sdp");
    int version = 0;
    in >> version;
    if (version != 1)
        throw std::runtime_error("load_problem: unsupported version");
    Eigen::Index n = 0;
    expect(in, "dimension");
    in >> n;
    if (!in || n <= 0)
        throw std::runtime_error("load_problem: bad dimension");
    expect(in, "r_cost");
    in >> p.r_cost;
    expect(in, "trace_bound");
    std::string tb;
    in >> tb;
    if (tb != "none")
        p.trace_bound = std::stod(tb);
    expect(in, "diagonal");
    p.diagonal.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        in >> p.diagonal(i);
    expect(in, "objective");
    p.objective = read_matrix(in, n, n);
    expect(in, "inequalities");
    std::size_t L = 0;
    in >> L;
    for (std::size_t k = 0; k < L; ++k)
    {
        expect(in, "bound");
        double b;
        in >> b;
        p.bounds.push_back(b);
        p.inequality.push_back(read_matrix(in, n, n));
    }
    expect(in, "rank_basis");
    Eigen::Index K = 0;
    in >> K;
    if (!in)
        throw std::runtime_error("load_problem: truncated input");
    if (K > 0)
        p.rank_basis = read_matrix(in, n, K);
    p.validate();
    return p;
}

void dump_problem(const std::filesystem::path &path, const SdpProblem &problem)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("dump_problem: cannot open " + path.string());
    dump_problem(out, problem);
}

SdpProblem load_problem(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_problem: cannot open " + path.string());
    return load_problem(in);
}

} // namespace riss
