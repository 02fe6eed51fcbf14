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


#include "riss/experiment.hpp"

#include "riss/analysis.hpp"
#include "riss/nearfield.hpp"
#include "riss/rng.hpp"
#include "riss/sensing.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace riss {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> known_stages{"sense", "design", "link", "analyze"};
const std::vector<std::string> config_names{"identity", "align", "suppress"};

// Field readers. Each rejects wrong types with the dotted path of the field.
class Reader
{
  public:
    Reader(const json &obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            throw ConfigError(where("") + ": expected an object");
    }

    template <class T> void get(const char *key, T &out)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end())
            return;
        read(*it, where(key), out);
    }

    void mark(const char *key) { seen_.insert(key); }

    Reader child(const char *key)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        static const json empty = json::object();
        return Reader(it == obj_.end() ? empty : *it, where(key));
    }

    // Unknown keys are almost always typos; reject them.
    void finish() const
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError(where(it.key()) + ": unknown field");
    }

  private:
    std::string where(const std::string &key) const
    {
        if (key.empty())
            return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    static void read(const json &v, const std::string &p, double &out)
    {
        if (!v.is_number())
            throw ConfigError(p + ": expected a number");
        out = v.get<double>();
    }
    static void read(const json &v, const std::string &p, bool &out)
    {
        if (!v.is_boolean())
            throw ConfigError(p + ": expected true or false");
        out = v.get<bool>();
    }
    static void read(const json &v, const std::string &p, std::string &out)
    {
        if (!v.is_string())
            throw ConfigError(p + ": expected a string");
        out = v.get<std::string>();
    }
    static void read(const json &v, const std::string &p, std::size_t &out)
    {
        if (!v.is_number_unsigned())
            throw ConfigError(p + ": expected a non-negative integer");
        out = v.get<std::size_t>();
    }
    static void read(const json &v, const std::string &p, unsigned &out)
    {
        std::size_t x = 0;
        read(v, p, x);
        out = unsigned(x);
    }
    static void read(const json &v, const std::string &p, int &out)
    {
        if (!v.is_number_integer())
            throw ConfigError(p + ": expected an integer");
        out = v.get<int>();
    }
    static void read(const json &v, const std::string &p, std::vector<std::string> &out)
    {
        if (!v.is_array())
            throw ConfigError(p + ": expected an array of strings");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            if (!v[i].is_string())
                throw ConfigError(p + "[" + std::to_string(i) + "]: expected a string");
            out.push_back(v[i].get<std::string>());
        }
    }

    const json &obj_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string hex64(std::uint64_t x)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, x);
    return buf;
}

std::string read_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_csv(const fs::path &path, const char *header)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << header << '\n';
    return out;
}

// Phases that make every element add coherently for transmitter `tx`.
ReflectionConfig coherent_alignment(const ChannelSet &cs, std::size_t tx, const CVec &v)
{
    const CVec g = cs.h.cwiseProduct(cs.G.at(tx) * v);
    std::vector<double> phases(std::size_t(g.size()));
    for (Eigen::Index k = 0; k < g.size(); ++k)
        phases[std::size_t(k)] = -std::arg(g(k));
    return ReflectionConfig(std::move(phases));
}

std::vector<CVec> beamformers(const Scenario &scenario)
{
    const FarfieldAngles angles = farfield_angles(scenario);
    const double ratio = scenario.spacing() / scenario.wavelength();
    std::vector<CVec> v;
    for (std::size_t i = 0; i < scenario.transmitters.size(); ++i)
        v.push_back(mrt_beamformer(angles.tx[i].varpi(ratio), scenario.transmitters[i].power,
                                   scenario.transmitters[i].antennas.size()));
    return v;
}

// Everything the later stages need from the earlier ones.
struct PipelineState
{
    Scenario truth;
    Scenario design_scenario;
    std::map<std::string, ReflectionConfig> configs;
    std::map<std::string, std::vector<cplx>> gains; // config -> {interferer, target}
    double noise = 0.0;
    std::map<std::string, LinkResult> first_trial;
};

class Pipeline
{
  public:
    Pipeline(const ExperimentConfig &cfg, fs::path dir) : cfg_(cfg), dir_(std::move(dir))
    {
        st_.truth = cfg.build_scenario();
        st_.design_scenario = st_.truth;
        seed_ = cfg.seed.value_or(0);
    }

    RunSummary run()
    {
        fs::create_directories(dir_);
        summary_.directory = dir_;
        stage("sense", [this] { sense(); });
        stage("design", [this] { design(); });
        stage("link", [this] { link(); });
        stage("analyze", [this] { analyze(); });
        write_manifest();
        return summary_;
    }

  private:
    template <class F> void stage(const std::string &name, F &&body)
    {
        if (!cfg_.has_stage(name))
        {
            summary_.stage_status[name] = "skipped";
            return;
        }
        try
        {
            status_ = "ok";
            body();
            summary_.stage_status[name] = status_;
        }
        catch (const std::exception &e)
        {
            summary_.stage_status[name] = std::string("failed: ") + e.what();
        }
    }

    void output(const std::string &file) { outputs_.push_back(file); }

    void sense()
    {
        const auto &s = cfg_.sensing;
        const Scenario &sc = st_.truth;
        const FrameConfig &fc = cfg_.link.frame;
        const RVec taps = rrc_taps(fc.sps, fc.span, fc.rolloff);
        Rng rng(derive_seed(seed_, "sense"));

        // Interferer (head 1) streams continuously; the target (head 2) sends one frame after a short
        // lead-in so both heads appear in the capture.
        auto frames = [&](int head, std::size_t count) {
            CVec sym(Eigen::Index(count * fc.symbols_per_frame()));
            for (std::size_t f = 0; f < count; ++f)
            {
                Bits data(fc.data_bits);
                for (auto &b : data)
                    b = std::uint8_t(rng.bit());
                sym.segment(Eigen::Index(f * fc.symbols_per_frame()), Eigen::Index(fc.symbols_per_frame())) =
                    build_frame(data, sync_head(head, fc.head_bits), fc);
            }
            CVec w = modulate(sym, taps, fc.sps);
            return CVec(w / std::sqrt(w.squaredNorm() / double(w.size())));
        };
        const CVec target = frames(2, 1);
        const CVec interferer_stream = frames(1, 2);
        const auto lead = Eigen::Index(rng.uniform() * 2000.0);
        const Eigen::Index total = lead + target.size();
        CVec xt = CVec::Zero(total);
        xt.segment(lead, target.size()) = target;
        const auto ioff = Eigen::Index(rng.uniform() * double(interferer_stream.size() - total));
        const CVec xi = interferer_stream.segment(ioff, total);

        const double amp = std::sqrt(from_db10(s.snr_db));
        const double ratio = sc.sensing_spacing() / sc.wavelength();
        const std::vector<double> truth{deg2rad(cfg_.scenario.interferer_azimuth_deg),
                                        deg2rad(cfg_.scenario.target_azimuth_deg)};
        const SnapshotBlock block =
            synth_snapshots_from_waveforms(truth, {xi, xt}, {amp, amp}, 1.0, sc.na, ratio, rng);

        // Both transmitters are active once the target starts.
        const GateRange gate = energy_gate(block.X.rightCols(total - lead));
        const Eigen::Index first = lead + gate.first;
        const Eigen::Index n = std::min<Eigen::Index>(Eigen::Index(s.snapshots), lead + gate.last - first);
        if (n < Eigen::Index(sc.na))
            throw NumericalError("too few snapshots after gating");
        const CMat X = block.X.middleCols(first, n);
        const SubspaceDecomposition dec = decompose(sample_covariance(X), 2);
        const RVec grid = angle_grid(-pi / 2.0, pi / 2.0, deg2rad(s.grid_step_deg));
        const RVec spectrum = music_spectrum(dec, grid, ratio);
        {
            auto out = open_csv(dir_ / "doa_spectrum.csv", "angle_deg,spectrum_db");
            const double peak = spectrum.maxCoeff();
            for (Eigen::Index k = 0; k < grid.size(); ++k)
                out << fmt(rad2deg(grid(k))) << ',' << fmt(db10(spectrum(k) / peak)) << '\n';
            output("doa_spectrum.csv");
        }

        std::vector<double> coarse, fine;
        try
        {
            coarse = music_estimate(grid, spectrum, 2);
        }
        catch (const UnresolvableSources &)
        {
            status_ = "degraded: MUSIC did not resolve two peaks";
        }
        fine = root_music(dec, 2, ratio);
        std::sort(fine.begin(), fine.end());
        if (coarse.size() == 2)
            std::sort(coarse.begin(), coarse.end());

        // Identify each direction by the head found in its spatially filtered stream.
        const std::vector<CVec> heads{head_waveform(sync_head(1, fc.head_bits), taps, fc.sps),
                                      head_waveform(sync_head(2, fc.head_bits), taps, fc.sps)};
        const CMat Xall = block.X.rightCols(total - lead);
        std::vector<HeadClassification> labels;
        for (std::size_t k = 0; k < 2; ++k)
        {
            const CVec a0 = ula_steering(fine[k], sc.na, ratio);
            const CVec a1 = ula_steering(fine[1 - k], sc.na, ratio);
            const CVec w = s.filter == "lcmv" ? lcmv_weights(dec.R, a0, a1) : mvdr_weights(dec.R, a0);
            labels.push_back(classify_sync_head(spatial_filter(Xall, w), heads));
        }

        int target_index = -1;
        if (labels[0].label != labels[1].label && labels[0].label >= 0 && labels[1].label >= 0)
            target_index = labels[0].label == 1 ? 0 : 1;
        else
        {
            // One stream undecided or both agree: trust the more confident classification.
            const std::size_t best = labels[0].confidence >= labels[1].confidence ? 0 : 1;
            if (labels[best].label >= 0)
                target_index = labels[best].label == 1 ? int(best) : int(1 - best);
        }

        {
            auto out = open_csv(dir_ / "sensing.csv", "source,music_deg,root_music_deg,head,confidence,role");
            for (std::size_t k = 0; k < 2; ++k)
                out << k << ',' << (coarse.size() == 2 ? fmt(rad2deg(coarse[k])) : std::string("nan")) << ','
                    << fmt(rad2deg(fine[k])) << ',' << labels[k].label << ',' << fmt(labels[k].confidence) << ','
                    << (target_index < 0 ? "unknown" : int(k) == target_index ? "target" : "interferer") << '\n';
            output("sensing.csv");
        }
        if (target_index < 0)
        {
            status_ = "degraded: heads not identified; design uses configured angles";
            return;
        }
        estimated_target_ = fine[std::size_t(target_index)];
        estimated_interferer_ = fine[std::size_t(1 - target_index)];
        if (cfg_.sensing.use_estimates)
        {
            Scenario d = st_.truth;
            d.transmitters[0].antennas = {tx_position_from_azimuth(*estimated_interferer_, cfg_.scenario.dc)};
            d.transmitters[1].antennas = {tx_position_from_azimuth(*estimated_target_, cfg_.scenario.dc)};
            st_.design_scenario = d;
        }
    }

    NearfieldDesignSpec near_spec(double eta, double delta, std::size_t grid) const
    {
        auto spec = NearfieldDesignSpec::from_scenario(st_.design_scenario, 1, delta, grid);
        spec.eta = eta;
        spec.levels = cfg_.design.bits ? std::size_t(1) << cfg_.design.bits : 0;
        spec.max_sweeps = cfg_.design.max_sweeps;
        spec.psi = cfg_.design.psi;
        return spec;
    }

    FarfieldDesignSpec far_spec() const
    {
        auto spec = FarfieldDesignSpec::from_scenario(st_.design_scenario, 1);
        spec.tau = cfg_.design.tau;
        spec.delta = deg2rad(cfg_.design.delta_deg);
        spec.grid = cfg_.design.grid;
        spec.bits = cfg_.design.bits;
        spec.power = cfg_.scenario.power;
        return spec;
    }

    void write_ao(const std::string &label, const AoTrace &trace)
    {
        {
            auto out = open_csv(dir_ / ("ao_sweeps_" + label + ".csv"), "sweep,objective");
            for (std::size_t i = 0; i < trace.sweep_objectives.size(); ++i)
                out << i << ',' << fmt(trace.sweep_objectives[i]) << '\n';
        }
        auto out = open_csv(dir_ / ("ao_trace_" + label + ".csv"), "update,objective");
        for (std::size_t i = 0; i < trace.update_objectives.size(); ++i)
            out << i << ',' << fmt(trace.update_objectives[i]) << '\n';
        output("ao_sweeps_" + label + ".csv");
        output("ao_trace_" + label + ".csv");
    }

    void write_irm(const FarfieldDesign &fd)
    {
        auto out = open_csv(dir_ / "irm_trace.csv", "t,epsilon,gain,r,rank_one_ratio,solver_iterations");
        for (const auto &h : fd.state.history)
            out << h.t << ',' << fmt(h.epsilon) << ',' << fmt(h.gain) << ',' << fmt(h.r) << ','
                << fmt(h.rank_one_ratio) << ',' << h.solver_iterations << '\n';
        output("irm_trace.csv");
    }

    void design()
    {
        const auto &d = cfg_.design;
        const std::size_t n = st_.truth.passive_count();
        const bool want_irm = std::count(d.traces.begin(), d.traces.end(), "irm") > 0;
        const bool want_ao = std::count(d.traces.begin(), d.traces.end(), "ao") > 0;
        st_.configs["identity"] = ReflectionConfig::identity(n);

        if (d.model == "near")
        {
            const auto align = ao_optimize(near_spec(0.0, 0.0, 1));
            const auto suppress = ao_optimize(near_spec(d.eta, deg2rad(d.delta_deg), d.grid));
            st_.configs["align"] = align.theta;
            st_.configs["suppress"] = suppress.theta;
            write_ao("align", align.trace);
            write_ao("suppress", suppress.trace);
            if (want_irm)
                write_irm(irm_solve(far_spec(), d.irm));
        }
        else
        {
            const ChannelSet cs = farfield_channels(st_.design_scenario, farfield_angles(st_.design_scenario));
            ReflectionConfig align = coherent_alignment(cs, 1, beamformers(st_.design_scenario)[1]);
            if (d.bits)
                align = quantize_reflection(align, d.bits);
            st_.configs["align"] = align;
            const FarfieldDesign fd = irm_solve(far_spec(), d.irm);
            st_.configs["suppress"] = fd.theta;
            write_irm(fd);
            if (want_ao)
                write_ao("suppress", ao_optimize(near_spec(d.eta, deg2rad(d.delta_deg), d.grid)).trace);
        }

        auto out = open_csv(dir_ / "reflection.csv", "element,identity,align,suppress");
        for (std::size_t k = 0; k < n; ++k)
            out << k << ',' << fmt(st_.configs["identity"].phases()[k]) << ',' << fmt(st_.configs["align"].phases()[k])
                << ',' << fmt(st_.configs["suppress"].phases()[k]) << '\n';
        output("reflection.csv");
    }

    ChannelSet link_channels() const
    {
        if (cfg_.design.model == "far")
            return farfield_channels(st_.truth, farfield_angles(st_.truth));
        return nearfield_channels(st_.truth);
    }

    void compute_gains()
    {
        if (!st_.gains.empty())
            return;
        if (st_.configs.empty())
            throw std::runtime_error("no reflection configurations (design stage did not run)");
        const ChannelSet cs = link_channels();
        const auto v = beamformers(st_.truth);
        // Noise referenced to the continuous, perfectly aligned target link.
        const cplx ideal = effective_gain(cs, coherent_alignment(cs, 1, v[1]), v)[1];
        st_.noise = std::norm(ideal) / from_db10(cfg_.link.snr_db);
        for (const auto &[name, theta] : st_.configs)
            st_.gains[name] = effective_gain(cs, theta, v);
    }

    void link()
    {
        compute_gains();
        const auto &l = cfg_.link;
        auto rows = open_csv(dir_ / "evm.csv", "config,trial,evm_percent,sinr_db,bit_errors,synced");
        auto summary = open_csv(dir_ / "evm_summary.csv",
                                "config,mean_evm_percent,std_evm_percent,mean_sinr_db,interferer_power_db");
        for (const auto &name : config_names)
        {
            const auto &g = st_.gains.at(name);
            LinkScenario ls;
            ls.target_gain = g[1];
            ls.interferer_gain = g[0];
            ls.noise_power = st_.noise;
            ls.frames = l.frames;
            ls.frame = l.frame;

            double sum = 0.0, sum2 = 0.0, sinr_sum = 0.0, ipow = 0.0;
            for (std::size_t t = 0; t < l.trials; ++t)
            {
                // Common random numbers across configurations.
                const std::uint64_t s = derive_seed(seed_, "link/trial/" + std::to_string(t));
                const LinkResult r = simulate_link(ls, s);
                const double e = r.synced ? r.evm_percent : 100.0;
                rows << name << ',' << t << ',' << fmt(e) << ',' << fmt(r.synced ? r.sinr_db : 0.0) << ','
                     << r.bit_errors << ',' << (r.synced ? 1 : 0) << '\n';
                sum += e;
                sum2 += e * e;
                sinr_sum += r.synced ? r.sinr_db : 0.0;
                if (t == 0)
                    st_.first_trial[name] = r;

                LinkScenario probe = ls;
                probe.target_on = false;
                probe.noise_power = 0.0;
                ipow += simulate_link(probe, s).rx_power;
            }
            const double trials = double(l.trials);
            const double mean = sum / trials;
            const double var = std::max(0.0, sum2 / trials - mean * mean);
            summary_.mean_evm_percent[name] = mean;
            summary_.interferer_power_db[name] = db10(ipow / trials);
            summary << name << ',' << fmt(mean) << ',' << fmt(std::sqrt(var)) << ',' << fmt(sinr_sum / trials) << ','
                    << fmt(summary_.interferer_power_db[name]) << '\n';
        }
        output("evm.csv");
        output("evm_summary.csv");
    }

    void analyze()
    {
        const auto &o = cfg_.output;
        if (st_.configs.empty())
            throw std::runtime_error("no reflection configurations (design stage did not run)");
        const std::vector<double> markers{cfg_.scenario.target_azimuth_deg, cfg_.scenario.interferer_azimuth_deg};
        for (const auto &name : config_names)
        {
            const ReflectionConfig &theta = st_.configs.at(name);
            if (o.beampattern)
            {
                write_beampattern_csv(dir_ / ("beampattern_" + name + ".csv"),
                                      farfield_beampattern(theta, st_.truth, default_beam_grid(), markers));
                output("beampattern_" + name + ".csv");
            }
            if (o.heatmap)
            {
                HeatmapSpec hs;
                hs.nx = hs.nz = o.heatmap_points;
                write_heatmap_csv(dir_ / ("heatmap_" + name + ".csv"), heatmap(theta, st_.truth, hs));
                output("heatmap_" + name + ".csv");
            }
            if (o.constellation && st_.first_trial.count(name))
            {
                write_constellation_csv(dir_ / ("constellation_" + name + ".csv"), st_.first_trial.at(name));
                output("constellation_" + name + ".csv");
            }
        }

        compute_gains();
        auto out = open_csv(dir_ / "sinr.csv", "config,sinr_db,target_gain_db,interferer_gain_db");
        for (const auto &name : config_names)
        {
            const auto &g = st_.gains.at(name);
            const SinrValue v = sinr(g[1], g[0], st_.noise);
            out << name << ',' << fmt(v.db) << ',' << fmt(db10(std::norm(g[1]))) << ','
                << fmt(std::norm(g[0]) > 0.0 ? db10(std::norm(g[0])) : -400.0) << '\n';
        }
        output("sinr.csv");
    }

    void write_manifest()
    {
        json m;
        m["name"] = cfg_.name;
        m["version"] = riss_version;
        m["config_fnv1a"] = hex64(fnv1a(cfg_.canonical));
        m["seed"] = cfg_.seed ? json(*cfg_.seed) : json(nullptr);
        m["sub_seeds"] = {{"sense", hex64(derive_seed(seed_, "sense"))},
                          {"link_trial_0", hex64(derive_seed(seed_, "link/trial/0"))}};
        m["stages"] = summary_.stage_status;
        json files = json::object();
        for (const auto &f : outputs_)
            files[f] = hex64(fnv1a(read_file(dir_ / f)));
        m["outputs"] = files;
        if (estimated_target_)
            m["doa_estimates_deg"] = {{"target", rad2deg(*estimated_target_)},
                                      {"interferer", rad2deg(*estimated_interferer_)}};
        if (!summary_.mean_evm_percent.empty())
            m["mean_evm_percent"] = summary_.mean_evm_percent;
        m["hardware_evm_reference_percent"] = hardware_evm_reference();
        std::ofstream(dir_ / "manifest.json", std::ios::binary) << m.dump(2) << '\n';
    }

    const ExperimentConfig &cfg_;
    fs::path dir_;
    std::uint64_t seed_ = 0;
    PipelineState st_;
    RunSummary summary_;
    std::string status_ = "ok";
    std::vector<std::string> outputs_;
    std::optional<double> estimated_target_, estimated_interferer_;
};

} // namespace

bool ExperimentConfig::has_stage(std::string_view stage) const
{
    return std::find(stages.begin(), stages.end(), stage) != stages.end();
}

Scenario ExperimentConfig::build_scenario() const
{
    Scenario s = reference_scenario(deg2rad(scenario.target_azimuth_deg), deg2rad(scenario.interferer_azimuth_deg),
                                scenario.dc);
    s.carrier_hz = scenario.carrier_hz;
    s.nx = scenario.nx;
    s.ny = scenario.ny;
    s.na = scenario.na;
    const double lambda = s.wavelength();
    s.element_spacing = scenario.spacing_wavelengths * lambda;
    s.active_spacing = scenario.active_spacing_wavelengths * lambda;
    s.rx_position = tx_position_from_azimuth(deg2rad(scenario.rx_azimuth_deg), scenario.dc);
    for (auto &tx : s.transmitters)
        tx.power = scenario.power;
    return s;
}

bool RunSummary::complete() const
{
    for (const auto &[stage, status] : stage_status)
        if (status.rfind("failed", 0) == 0)
            return false;
    return true;
}

ExperimentConfig parse_config(std::string_view text)
{
    json root;
    try
    {
        root = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
    }

    ExperimentConfig c;
    Reader r(root, "");
    r.get("name", c.name);
    r.mark("seed");
    if (auto it = root.find("seed"); it != root.end() && !it->is_null())
    {
        if (!it->is_number_unsigned())
            throw ConfigError("seed: expected a non-negative integer");
        c.seed = it->get<std::uint64_t>();
    }
    r.get("stages", c.stages);

    auto s = r.child("scenario");
    s.get("carrier_hz", c.scenario.carrier_hz);
    s.get("nx", c.scenario.nx);
    s.get("ny", c.scenario.ny);
    s.get("na", c.scenario.na);
    s.get("spacing_wavelengths", c.scenario.spacing_wavelengths);
    s.get("active_spacing_wavelengths", c.scenario.active_spacing_wavelengths);
    s.get("dc", c.scenario.dc);
    s.get("target_azimuth_deg", c.scenario.target_azimuth_deg);
    s.get("interferer_azimuth_deg", c.scenario.interferer_azimuth_deg);
    s.get("rx_azimuth_deg", c.scenario.rx_azimuth_deg);
    s.get("power", c.scenario.power);
    s.finish();

    auto d = r.child("design");
    d.get("model", c.design.model);
    d.get("tau", c.design.tau);
    d.get("eta", c.design.eta);
    d.get("delta_deg", c.design.delta_deg);
    d.get("grid", c.design.grid);
    d.get("bits", c.design.bits);
    d.get("psi", c.design.psi);
    d.get("max_sweeps", c.design.max_sweeps);
    d.get("traces", c.design.traces);
    {
        auto irm = d.child("irm");
        irm.get("epsilon0", c.design.irm.epsilon0);
        irm.get("growth", c.design.irm.growth);
        irm.get("r_tol", c.design.irm.r_tol);
        irm.get("max_iterations", c.design.irm.max_iterations);
        irm.get("warm_start", c.design.irm.warm_start);
        irm.get("accuracy", c.design.irm.sdp.accuracy);
        irm.finish();
    }
    d.finish();

    auto se = r.child("sensing");
    se.get("snr_db", c.sensing.snr_db);
    se.get("snapshots", c.sensing.snapshots);
    se.get("grid_step_deg", c.sensing.grid_step_deg);
    se.get("use_estimates", c.sensing.use_estimates);
    se.get("filter", c.sensing.filter);
    se.finish();

    auto l = r.child("link");
    l.get("frames", c.link.frames);
    l.get("trials", c.link.trials);
    l.get("snr_db", c.link.snr_db);
    {
        auto f = l.child("frame");
        f.get("data_bits", c.link.frame.data_bits);
        f.get("head_bits", c.link.frame.head_bits);
        f.get("symbol_rate", c.link.frame.symbol_rate);
        f.get("sample_rate", c.link.frame.sample_rate);
        f.get("sps", c.link.frame.sps);
        f.get("span", c.link.frame.span);
        f.get("rolloff", c.link.frame.rolloff);
        f.finish();
    }
    l.finish();

    auto o = r.child("output");
    o.get("beampattern", c.output.beampattern);
    o.get("heatmap", c.output.heatmap);
    o.get("constellation", c.output.constellation);
    o.get("heatmap_points", c.output.heatmap_points);
    o.finish();

    r.finish();

    c.canonical = root.dump();
    return c;
}

ExperimentConfig load_config(const std::string &path_or_name)
{
    if (fs::is_regular_file(path_or_name))
        return parse_config(read_file(path_or_name));
    for (const auto &e : embedded_configs())
        if (e.name == path_or_name)
            return parse_config(e.json);
    throw ConfigError(path_or_name + ": no such file or bundled experiment");
}

ValidationReport validate_config(const ExperimentConfig &c)
{
    ValidationReport rep;
    auto err = [&](const std::string &m) { rep.errors.push_back(m); };
    auto warn = [&](const std::string &m) { rep.warnings.push_back(m); };

    for (std::size_t i = 0; i < c.stages.size(); ++i)
        if (!known_stages.count(c.stages[i]))
            err("stages[" + std::to_string(i) + "]: unknown stage '" + c.stages[i] + "'");
    if ((c.has_stage("sense") || c.has_stage("link")) && !c.seed)
        err("seed: required when the sense or link stage runs");

    const auto &s = c.scenario;
    if (!(s.carrier_hz > 0.0))
        err("scenario.carrier_hz: must be positive");
    if (s.nx == 0 || s.ny == 0)
        err("scenario.nx: surface dimensions must be positive");
    if (!(s.spacing_wavelengths > 0.0))
        err("scenario.spacing_wavelengths: must be positive");
    if (!(s.active_spacing_wavelengths > 0.0))
        err("scenario.active_spacing_wavelengths: must be positive");
    if (!(s.dc > 0.0))
        err("scenario.dc: must be positive");
    if (!(s.power > 0.0))
        err("scenario.power: must be positive");
    for (auto [name, v] : {std::pair{"target_azimuth_deg", s.target_azimuth_deg},
                           std::pair{"interferer_azimuth_deg", s.interferer_azimuth_deg},
                           std::pair{"rx_azimuth_deg", s.rx_azimuth_deg}})
        if (!(std::abs(v) < 90.0))
            err(std::string("scenario.") + name + ": must lie strictly inside (-90, 90)");
    if (s.target_azimuth_deg == s.interferer_azimuth_deg)
        err("scenario.interferer_azimuth_deg: coincides with the target");
    if (c.has_stage("sense") && s.na <= 2)
        err("scenario.na: must exceed the number of sources (2)");
    if (s.spacing_wavelengths > 0.5)
        warn("scenario.spacing_wavelengths: spacing above half a wavelength admits grating lobes");
    if (c.has_stage("sense") && s.active_spacing_wavelengths > 0.5)
    {
        const double limit = rad2deg(std::asin(std::min(1.0, 0.5 / s.active_spacing_wavelengths)));
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "scenario.active_spacing_wavelengths: above half a wavelength, directions beyond +-%.1f deg alias",
                      limit);
        warn(buf);
    }

    const auto &d = c.design;
    if (d.model != "near" && d.model != "far")
        err("design.model: expected 'near' or 'far'");
    if (!(d.tau >= 0.0))
        err("design.tau: must be non-negative");
    if (!(d.eta >= 0.0))
        err("design.eta: must be non-negative");
    if (!(d.delta_deg >= 0.0 && d.delta_deg < 90.0))
        err("design.delta_deg: must lie in [0, 90)");
    if (d.grid == 0)
        err("design.grid: must be at least 1");
    if (d.delta_deg > 0.0 && d.grid < 2)
        err("design.grid: a robust design (delta_deg > 0) needs at least 2 grid points");
    if (d.bits > 16)
        err("design.bits: at most 16");
    if (d.max_sweeps == 0)
        err("design.max_sweeps: must be at least 1");
    for (std::size_t i = 0; i < d.traces.size(); ++i)
        if (d.traces[i] != "irm" && d.traces[i] != "ao")
            err("design.traces[" + std::to_string(i) + "]: expected 'irm' or 'ao'");
    if (!(d.irm.epsilon0 > 0.0))
        err("design.irm.epsilon0: must be positive");
    if (!(d.irm.growth > 1.0))
        err("design.irm.growth: must exceed 1");
    if (!(d.irm.r_tol > 0.0))
        err("design.irm.r_tol: must be positive");
    if (d.irm.max_iterations < 1)
        err("design.irm.max_iterations: must be at least 1");
    if (!(d.irm.sdp.accuracy > 0.0))
        err("design.irm.accuracy: must be positive");

    if (c.sensing.snapshots == 0)
        err("sensing.snapshots: must be at least 1");
    if (!(c.sensing.grid_step_deg > 0.0 && c.sensing.grid_step_deg <= 10.0))
        err("sensing.grid_step_deg: must lie in (0, 10]");
    if (c.sensing.filter != "mvdr" && c.sensing.filter != "lcmv")
        err("sensing.filter: expected 'mvdr' or 'lcmv'");

    if (c.has_stage("link"))
    {
        if (c.link.trials == 0)
            err("link.trials: must be at least 1");
        if (c.link.frames == 0)
            err("link.frames: must be at least 1");
    }
    try
    {
        c.link.frame.validate();
    }
    catch (const std::exception &e)
    {
        err(std::string("link.frame: ") + e.what());
    }
    if (c.output.heatmap_points < 2)
        err("output.heatmap_points: must be at least 2");

    if (rep.errors.empty())
    {
        try
        {
            const Scenario sc = c.build_scenario();
            sc.validate();
            if (!farfield_valid(sc))
                warn("scenario: transmitters sit inside the Fraunhofer distance; far-field angles are approximate");
        }
        catch (const std::exception &e)
        {
            err(std::string("scenario: ") + e.what());
        }
    }
    return rep;
}

ValidationReport validate_config_text(std::string_view text)
{
    try
    {
        return validate_config(parse_config(text));
    }
    catch (const ConfigError &e)
    {
        ValidationReport rep;
        rep.errors.push_back(e.what());
        return rep;
    }
}

RunSummary run_experiment(const ExperimentConfig &config, const fs::path &directory)
{
    const ValidationReport rep = validate_config(config);
    if (!rep.ok())
        throw ConfigError(rep.errors.front());
    return Pipeline(config, directory).run();
}

const std::vector<double> &hardware_evm_reference()
{
    // Over-the-air EVM (%) in figure order.
    static const std::vector<double> ref{44.7494, 26.4598, 4.1357, 4.6768, 5.1486, 5.2401,
                                         19.2229, 6.5897, 43.5608, 20.0157, 24.5761, 59.7931};
    return ref;
}

} // namespace riss
