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

#include "riss/farfield.hpp"
#include "riss/link.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace riss {

// Experiment configuration, read from JSON. Every field has a default matching the
// reference scenario (3.5 GHz, 10 x 10 surface, 4 sensing antennas, dc = 3.5 m, target 10 deg,
// interferer -20 deg, tau = 0.1, eta = 1); see README.md for the schema.
struct ScenarioBlock
{
    double carrier_hz = 3.5e9;
    std::size_t nx = 10, ny = 10, na = 4;
    double spacing_wavelengths = 0.5;
    double active_spacing_wavelengths = 0.6883;
    double dc = 3.5;
    double target_azimuth_deg = 10.0;
    double interferer_azimuth_deg = -20.0;
    double rx_azimuth_deg = 0.0;
    double power = 1.0;
};

struct DesignBlock
{
    std::string model = "near"; // near | far
    double tau = 0.1;
    double eta = 1.0;
    double delta_deg = 0.0;
    std::size_t grid = 1;
    unsigned bits = 2;
    double psi = 0.0;
    std::size_t max_sweeps = 50;
    IrmOptions irm;
    std::vector<std::string> traces; // extra convergence traces: irm, ao
};

struct SensingBlock
{
    double snr_db = 10.0;
    std::size_t snapshots = 5000;
    double grid_step_deg = 0.1;
    bool use_estimates = true;
    std::string filter = "mvdr"; // mvdr | lcmv
};

struct LinkBlock
{
    std::size_t frames = 2;
    std::size_t trials = 20;
    double snr_db = 15.0; // Es/N0 of the perfectly aligned target link
    FrameConfig frame;
};

struct OutputBlock
{
    bool beampattern = true;
    bool heatmap = true;
    bool constellation = true;
    std::size_t heatmap_points = 201;
};

struct ExperimentConfig
{
    std::string name = "experiment";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> stages{"sense", "design", "link", "analyze"};
    ScenarioBlock scenario;
    DesignBlock design;
    SensingBlock sensing;
    LinkBlock link;
    OutputBlock output;

    std::string canonical; // compact sorted JSON of the input, hashed into the manifest

    bool has_stage(std::string_view stage) const;
    Scenario build_scenario() const;
};

// Malformed input; the message starts with the offending field path.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(std::string_view json_text);

// A file path, or the name of a bundled experiment.
ExperimentConfig load_config(const std::string &path_or_name);

struct ValidationReport
{
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

ValidationReport validate_config(const ExperimentConfig &config);
// Parse failures land in `errors` instead of throwing.
ValidationReport validate_config_text(std::string_view json_text);

struct RunSummary
{
    std::filesystem::path directory;
    std::map<std::string, double> mean_evm_percent;
    std::map<std::string, double> interferer_power_db;
    std::map<std::string, std::string> stage_status; // ok | skipped | failed: ...
    bool complete() const;
};

// Runs sense -> design -> link -> analyze (as selected) and writes CSVs plus manifest.json into
// `directory`. Throws ConfigError on validation failure; stage failures are recorded in the
// manifest and the summary.
RunSummary run_experiment(const ExperimentConfig &config, const std::filesystem::path &directory);

struct EmbeddedConfig
{
    std::string_view name;
    std::string_view json;
};

const std::vector<EmbeddedConfig> &embedded_configs();

// Over-the-air EVM values measured on a hardware prototype; copied into every manifest as
// reference metadata, never compared against.
const std::vector<double> &hardware_evm_reference();

inline constexpr const char *riss_version = "1.0.0";

} // namespace riss
