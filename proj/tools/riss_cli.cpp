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


// riss command line: run, validate, render, list-experiments.
// Exit codes: 0 success, 1 invalid input, 2 runtime failure or partially failed run.

#include "riss/experiment.hpp"
#include "riss/svg.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace fs = std::filesystem;

namespace {

fs::path output_root()
{
    const char *env = std::getenv("RISS_OUTPUT_ROOT");
    return env && *env ? fs::path(env) : fs::path("runs");
}

int cmd_validate(const std::string &config)
{
    riss::ValidationReport rep;
    try
    {
        rep = riss::validate_config(riss::load_config(config));
    }
    catch (const riss::ConfigError &e)
    {
        rep.errors.push_back(e.what());
    }
    for (const auto &w : rep.warnings)
        std::cout << "warning: " << w << '\n';
    for (const auto &e : rep.errors)
        std::cout << "error: " << e << '\n';
    std::cout << (rep.ok() ? "valid" : "invalid") << '\n';
    return rep.ok() ? 0 : 1;
}

int cmd_run(const std::string &config, const std::string &out)
{
    riss::ExperimentConfig cfg;
    try
    {
        cfg = riss::load_config(config);
        const auto rep = riss::validate_config(cfg);
        for (const auto &w : rep.warnings)
            std::cerr << "warning: " << w << '\n';
        if (!rep.ok())
        {
            for (const auto &e : rep.errors)
                std::cerr << "error: " << e << '\n';
            return 1;
        }
    }
    catch (const riss::ConfigError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    const fs::path dir = out.empty() ? output_root() / cfg.name : fs::path(out);
    try
    {
        const auto summary = riss::run_experiment(cfg, dir);
        for (const auto &[stage, status] : summary.stage_status)
            std::cout << stage << ": " << status << '\n';
        for (const auto &[name, evm] : summary.mean_evm_percent)
            std::cout << "evm " << name << ": " << evm << " %\n";
        std::cout << "output: " << dir.string() << '\n';
        return summary.complete() ? 0 : 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int cmd_render(const std::string &kind, const std::string &in, const std::string &out)
{
    try
    {
        riss::render_svg_file(kind, in, out);
        return 0;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Sensing-assisted reflective surface simulator"};
    app.set_version_flag("--version", riss::riss_version);
    app.require_subcommand(1);

    std::string config, out, kind, csv;
    auto *run = app.add_subcommand("run", "Run an experiment (file or bundled name)");
    run->add_option("config", config, "JSON config or bundled experiment name")->required();
    run->add_option("-o,--out", out, "Output directory (default $RISS_OUTPUT_ROOT/<name>)");

    auto *validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("config", config, "JSON config or bundled experiment name")->required();

    auto *render = app.add_subcommand("render", "Render a CSV output as SVG");
    render->add_option("kind", kind, "beampattern | trace | constellation | heatmap")->required();
    render->add_option("csv", csv, "Input CSV")->required()->check(CLI::ExistingFile);
    render->add_option("svg", out, "Output SVG")->required();

    auto *list = app.add_subcommand("list-experiments", "List bundled experiments");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*run)
        return cmd_run(config, out);
    if (*validate)
        return cmd_validate(config);
    if (*render)
        return cmd_render(kind, csv, out);
    if (*list)
    {
        for (const auto &e : riss::embedded_configs())
            std::cout << e.name << '\n';
        return 0;
    }
    return 1;
}
