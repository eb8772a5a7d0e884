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

#pragma once

#include "sbrt/atmosphere.hpp"
#include "sbrt/bvh.hpp"
#include "sbrt/channel.hpp"
#include "sbrt/geometry.hpp"
#include "sbrt/launch.hpp"
#include "sbrt/tracer.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sbrt
{

struct ArraySpec
{
    ArrayKind kind = ArrayKind::ula;
    std::array<int, 2> counts{1, 1};
    std::optional<double> spacing_m; // default lambda / 2
    Vec3 center = Vec3::Zero();
    std::array<Vec3, 2> axes{Vec3::UnitX(), Vec3::UnitY()};
    std::vector<Vec3> positions; // explicit kind only

    ArrayGeometry build(double wavelength) const;
};

struct FrequencySweep
{
    double start_ghz = 1.0;
    double stop_ghz = 1000.0;
    double step_ghz = 1.0;

    // start, start + step, ... and always stop itself.
    std::vector<double> grid() const;
};

struct SimulationConfig
{
    std::filesystem::path scene_path;
    SceneFormat scene_format = SceneFormat::json;
    std::optional<std::filesystem::path> material_map;
    double frequency_ghz = 0.0;
    ArraySpec tx;
    ArraySpec rx;
    TraceLimits limits;
    int tessellation = 64;
    std::optional<AtmosphereState> atmosphere; // none = vacuum
    std::vector<AtmosphereState> atmospheres;  // sweep-gas curves
    double beta = 1.0;
    std::vector<double> snr_db{10.0};
    std::filesystem::path output_dir = "out";
    int workers = 0;
    double pdp_bin_ns = 1.0;
    FrequencySweep frequency_sweep;
    std::vector<int> array_sizes{16, 32, 64, 128};
    std::optional<std::filesystem::path> gas_table;
    bool dump_paths = false;

    void validate() const;
};

// Relative paths inside the config resolve against `base_dir`. Throws
// ValidationError naming the offending key.
SimulationConfig parse_config(const std::string &text, const std::filesystem::path &base_dir = ".");
SimulationConfig load_config(const std::filesystem::path &path);

struct SimulationResult
{
    double frequency_ghz = 0.0;
    double wavelength = 0.0;
    double beta = 1.0;
    double reference_power = 0.0;
    std::size_t n_tx = 0;
    std::size_t n_rx = 0;
    int tessellation = 0;
    double alpha = 0.0;
    std::vector<PathRecord> paths;
    std::vector<MPC> mpcs; // parallel to paths
    // Per (q, p) pair, index q * n_tx + p
    std::vector<CVec3> pair_field;
    std::vector<double> pair_power;
    std::vector<double> pair_phase;
    std::vector<std::size_t> pair_paths;
    ChannelMatrix h;
    std::optional<AtmosphereState> atmosphere;
    AtmosphericRates rates;
    std::vector<std::string> warnings;
};

const GasLineTable &gas_table_for(const SimulationConfig &config);

Scene load_config_scene(const SimulationConfig &config);

SimulationResult simulate(const SimulationConfig &config, const Scene &scene, const AccelStructure &accel,
                          const std::vector<Vec3> &tx_positions, const std::vector<Vec3> &rx_positions,
                          const RayFan &fan);

// Loads the scene, builds the arrays and runs simulate().
SimulationResult simulate(const SimulationConfig &config);

// Received power per rx port (coherent over all tx elements), dB relative
// to the unit-field reference power; -inf for a blocked port.
std::vector<double> per_port_power_db(const SimulationResult &result);

std::string report_json(const SimulationResult &result, const SimulationConfig &config);

// Writes channel_report.json, pdp.csv, capacity.csv, h_matrix.csv (when
// N_t * N_r > 1) and paths.jsonl (when dump_paths) into config.output_dir.
std::vector<std::filesystem::path> write_outputs(const SimulationResult &result, const SimulationConfig &config);

std::vector<std::filesystem::path> run_simulation(const SimulationConfig &config);

// Wide CSV: frequency_ghz then gamma_db_per_km_a<i>, phi_deg_per_km_a<i>
// for each configured atmosphere. Written to gas_sweep.csv.
std::filesystem::path run_gas_sweep(const SimulationConfig &config);

// capacity_sweep.csv (N, snr_db, capacity) and port_power.csv
// (N, port, power_db) over config.array_sizes.
std::vector<std::filesystem::path> run_array_sweep(const SimulationConfig &config);

// "%.9g"
std::string format_number(double x);

} // namespace sbrt
