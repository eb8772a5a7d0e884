// SPDX-License-Identifier: Apache-2.0
//
// sbrt - shooting-and-bouncing-rays radio channel simulator
// Copyright (C) 2026 The sbrt authors
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

#include "sbrt/simulation.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct Overrides
{
    std::string config;
    std::optional<int> workers;
    std::optional<std::string> out;
    bool dump_paths = false;
};

void add_common(CLI::App *cmd, Overrides &o)
{
    cmd->add_option("config", o.config, "Simulation config (JSON)")->required();
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all logical processors)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_flag("--dump-paths", o.dump_paths, "Write paths.jsonl");
}

sbrt::SimulationConfig prepare(const Overrides &o)
{
    auto config = sbrt::load_config(o.config);
    if (o.workers)
        config.workers = *o.workers;
    if (o.out)
        config.output_dir = *o.out;
    if (o.dump_paths)
        config.dump_paths = true;
    config.validate();
    return config;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Shooting-and-bouncing-rays channel simulator"};
    app.require_subcommand(1);
    Overrides o;
    auto *sim = app.add_subcommand("simulate", "Trace one configuration and write the channel report");
    auto *gas = app.add_subcommand("sweep-gas", "Gas attenuation and dispersion over a frequency range");
    auto *arr = app.add_subcommand("sweep-array", "Capacity and per-port power over array sizes");
    for (auto *cmd : {sim, gas, arr})
        add_common(cmd, o);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try
    {
        const auto config = prepare(o);
        std::vector<std::filesystem::path> written;
        if (sim->parsed())
            written = sbrt::run_simulation(config);
        else if (gas->parsed())
            written = {sbrt::run_gas_sweep(config)};
        else
            written = sbrt::run_array_sweep(config);
        for (const auto &p : written)
            std::cout << p.string() << "\n";
        return 0;
    }
    catch (const sbrt::ValidationError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    catch (const sbrt::RangeError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
