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


#include "riss/nearfield.hpp"

#include "riss/farfield.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace riss {

void NearfieldDesignSpec::validate() const
{
    if (!(wavelength > 0.0))
        throw std::invalid_argument("NearfieldDesignSpec: wavelength must be positive");
    if (target_path.size() == 0)
        throw std::invalid_argument("NearfieldDesignSpec: empty target path table");
    for (const auto &p : interferer_paths)
        if (p.size() != target_path.size())
            throw std::invalid_argument("NearfieldDesignSpec: interferer path table size differs from the target");
    if (!(target_path.minCoeff() > 0.0))
        throw std::invalid_argument("NearfieldDesignSpec: path lengths must be positive");
    if (!(eta >= 0.0))
        throw std::invalid_argument("NearfieldDesignSpec: eta must be non-negative");
    if (levels == 1)
        throw std::invalid_argument("NearfieldDesignSpec: at least two phase levels required");
    if (max_sweeps == 0)
        throw std::invalid_argument("NearfieldDesignSpec: sweep cap must be positive");
}

RVec path_lengths(const Scenario &scenario, const Vec3 &source)
{
    const auto layout = element_positions(scenario);
    return distances_from(layout.passive, source) + distances_from(layout.passive, scenario.rx_position);
}

std::vector<Vec3> robust_interferer_positions(double azimuth, double delta, std::size_t grid, double dc)
{
    std::vector<Vec3> out;
    for (double a : robust_angle_grid(azimuth, delta, delta > 0.0 ? grid : 1))
        out.push_back(tx_position_from_azimuth(a, dc));
    return out;
}

NearfieldDesignSpec NearfieldDesignSpec::from_scenario(const Scenario &scenario, std::size_t target_tx, double delta,
                                                       std::size_t grid)
{
    scenario.validate();
    if (target_tx >= scenario.transmitters.size())
        throw std::invalid_argument("NearfieldDesignSpec: target transmitter index out of range");
    for (const auto &tx : scenario.transmitters)
        if (tx.antennas.size() != 1)
            throw std::invalid_argument("NearfieldDesignSpec: near-field design assumes single-antenna transmitters");

    NearfieldDesignSpec spec;
    spec.wavelength = scenario.wavelength();
    spec.target_path = path_lengths(scenario, scenario.transmitters[target_tx].antennas[0]);
    for (std::size_t i = 0; i < scenario.transmitters.size(); ++i)
    {
        if (i == target_tx)
            continue;
        const Vec3 &b = scenario.transmitters[i].antennas[0];
        if (delta > 0.0)
        {
            const double az = std::atan2(b.x(), b.z());
            const double dc = std::hypot(b.x(), b.z());
            for (const auto &q : robust_interferer_positions(az, delta, grid, dc))
                spec.interferer_paths.push_back(path_lengths(scenario, Vec3(q.x(), b.y(), q.z())));
        }
        else
        {
            spec.interferer_paths.push_back(path_lengths(scenario, b));
        }
    }
    return spec;
}

std::vector<double> init_phases(const RVec &path, double wavelength, double psi)
{
    if (!(wavelength > 0.0))
        throw std::invalid_argument("init_phases: wavelength must be positive");
    std::vector<double> phases(std::size_t(path.size()));
    for (Eigen::Index k = 0; k < path.size(); ++k)
    {
        if (!(path(k) > 0.0))
            throw std::invalid_argument("init_phases: path lengths must be positive");
        const double cycles = path(k) / wavelength;
        phases[std::size_t(k)] = wrap_phase(two_pi * (cycles - std::floor(cycles)) + psi);
    }
    return phases;
}

namespace {

CVec link_phasors(const RVec &path, double wavelength)
{
    return path.unaryExpr([wavelength](double p) { return std::polar(1.0, -two_pi * p / wavelength); });
}

cplx sum_with(const CVec &a, const std::vector<double> &phases)
{
    cplx s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k)
        s += a(k) * std::polar(1.0, phases[std::size_t(k)]);
    return s;
}

} // namespace

cplx field_sum(const std::vector<double> &phases, const RVec &path, double wavelength)
{
    if (phases.size() != std::size_t(path.size()))
        throw std::invalid_argument("field_sum: phase count differs from the path table");
    return sum_with(link_phasors(path, wavelength), phases);
}

double signal_strength(const std::vector<double> &phases, const RVec &path, double wavelength)
{
    return std::abs(field_sum(phases, path, wavelength));
}

double evaluate_objective(const std::vector<double> &phases, const NearfieldDesignSpec &spec)
{
    spec.validate();
    double s1 = 0.0;
    for (const auto &p : spec.interferer_paths)
        s1 = std::max(s1, signal_strength(phases, p, spec.wavelength));
    return signal_strength(phases, spec.target_path, spec.wavelength) - spec.eta * s1;
}

double snap_phase(double phase, std::size_t levels)
{
    if (levels < 2)
        throw std::invalid_argument("snap_phase: at least two levels required");
    const double step = two_pi / double(levels);
    const double x = wrap_phase(phase) / step;
    double j = std::floor(x);
    if (x - j > 0.5)
        j += 1.0;
    return wrap_phase(std::fmod(j, double(levels)) * step);
}

namespace {

// Running sums for fast single-element updates.
class AoState
{
  public:
    AoState(const NearfieldDesignSpec &spec, std::vector<double> phases) : spec_(spec), phases_(std::move(phases))
    {
        a2_ = link_phasors(spec.target_path, spec.wavelength);
        for (const auto &p : spec.interferer_paths)
            a1_.push_back(link_phasors(p, spec.wavelength));
        resync();
    }

    void resync()
    {
        s2_ = sum_with(a2_, phases_);
        s1_.clear();
        for (const auto &a : a1_)
            s1_.push_back(sum_with(a, phases_));
    }

    // Objective with element k moved to phase `phi`.
    double trial(Eigen::Index k, double phi) const
    {
        const cplx from = std::polar(1.0, phases_[std::size_t(k)]);
        const cplx to = std::polar(1.0, phi);
        const double t2 = std::abs(s2_ + a2_(k) * (to - from));
        double t1 = 0.0;
        for (std::size_t l = 0; l < a1_.size(); ++l)
            t1 = std::max(t1, std::abs(s1_[l] + a1_[l](k) * (to - from)));
        return t2 - spec_.eta * t1;
    }

    double current(Eigen::Index k) const { return trial(k, phases_[std::size_t(k)]); }

    void set(Eigen::Index k, double phi)
    {
        const cplx from = std::polar(1.0, phases_[std::size_t(k)]);
        const cplx to = std::polar(1.0, phi);
        s2_ += a2_(k) * (to - from);
        for (std::size_t l = 0; l < a1_.size(); ++l)
            s1_[l] += a1_[l](k) * (to - from);
        phases_[std::size_t(k)] = phi;
    }

    const std::vector<double> &phases() const { return phases_; }

  private:
    const NearfieldDesignSpec &spec_;
    std::vector<double> phases_;
    CVec a2_;
    std::vector<CVec> a1_;
    cplx s2_;
    std::vector<cplx> s1_;
};

// Best phase for element k on the continuous circle: coarse grid, then golden-section search
// around the best grid point. The max over hypotheses makes the objective non-smooth, so the
// grid guards against locking onto a secondary bump.
std::pair<double, double> continuous_best(const AoState &st, Eigen::Index k)
{
    constexpr int coarse = 64;
    const double step = two_pi / coarse;
    double best_phi = 0.0, best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < coarse; ++j)
    {
        const double v = st.trial(k, j * step);
        if (v > best)
        {
            best = v;
            best_phi = j * step;
        }
    }
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_phi - step, b = best_phi + step;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = st.trial(k, c), fd = st.trial(k, d);
    for (int it = 0; it < 60; ++it)
    {
        if (fc > fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = st.trial(k, c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = st.trial(k, d);
        }
    }
    const double phi = 0.5 * (a + b);
    const double v = st.trial(k, phi);
    if (v > best)
        return {wrap_phase(phi), v};
    return {wrap_phase(best_phi), best};
}

} // namespace

NearfieldDesign ao_optimize(const NearfieldDesignSpec &spec)
{
    spec.validate();
    const Eigen::Index n = Eigen::Index(spec.size());
    std::vector<double> start = init_phases(spec.target_path, spec.wavelength, spec.psi);
    if (spec.levels > 0)
        for (auto &p : start)
            p = snap_phase(p, spec.levels);

    NearfieldDesign out;
    out.initial = start;
    AoState st(spec, start);
    AoTrace &tr = out.trace;
    tr.sweep_objectives.push_back(evaluate_objective(st.phases(), spec));

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::mt19937_64 shuffle_rng(spec.order_seed.value_or(0));

    while (tr.sweeps < spec.max_sweeps)
    {
        if (spec.order_seed)
            std::shuffle(order.begin(), order.end(), shuffle_rng);
        std::size_t changes = 0;
        for (const Eigen::Index k : order)
        {
            const double now = st.current(k);
            double best_phi = st.phases()[std::size_t(k)];
            double best = now;
            if (spec.levels > 0)
            {
                const double step = two_pi / double(spec.levels);
                for (std::size_t j = 0; j < spec.levels; ++j)
                {
                    const double v = st.trial(k, double(j) * step);
                    if (v > best + 1e-12)
                    {
                        best = v;
                        best_phi = double(j) * step;
                    }
                }
            }
            else
            {
                const auto [phi, v] = continuous_best(st, k);
                if (v > now + 1e-12)
                {
                    best = v;
                    best_phi = phi;
                }
            }
            if (best_phi != st.phases()[std::size_t(k)])
            {
                st.set(k, best_phi);
                ++changes;
                ++tr.updates;
                tr.update_objectives.push_back(evaluate_objective(st.phases(), spec));
            }
        }
        st.resync();
        ++tr.sweeps;
        tr.sweep_objectives.push_back(evaluate_objective(st.phases(), spec));
        if (changes == 0)
        {
            tr.converged = true;
            break;
        }
    }

    unsigned bits = 0;
    if (spec.levels > 0 && (spec.levels & (spec.levels - 1)) == 0)
        while ((std::size_t(1) << bits) < spec.levels)
            ++bits;
    out.theta = ReflectionConfig(st.phases(), bits);
    out.s2 = signal_strength(st.phases(), spec.target_path, spec.wavelength);
    for (const auto &p : spec.interferer_paths)
        out.s1_max = std::max(out.s1_max, signal_strength(st.phases(), p, spec.wavelength));
    return out;
}

} // namespace riss
