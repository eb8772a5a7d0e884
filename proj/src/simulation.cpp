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
#include "sbrt/parallel.hpp"
#include "sbrt/propagation.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

namespace sbrt
{

using nlohmann::json;

std::string format_number(double x)
{
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    if (std::isnan(x))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

ArrayGeometry ArraySpec::build(double wavelength) const
{
    if (kind == ArrayKind::explicit_positions)
        return make_explicit_array(positions);
    const double d = spacing_m.value_or(wavelength / 2.0);
    return make_array(kind, counts, d, center, axes);
}

std::vector<double> FrequencySweep::grid() const
{
    std::vector<double> f;
    for (long i = 0;; ++i)
    {
        const double v = start_ghz + static_cast<double>(i) * step_ghz;
        if (v >= stop_ghz - 1e-9 * step_ghz)
            break;
        f.push_back(v);
    }
    f.push_back(stop_ghz);
    return f;
}

void SimulationConfig::validate() const
{
    if (!(frequency_ghz > 0.05 && frequency_ghz <= 1000.0))
        throw ValidationError("frequency_ghz must lie in (0.05, 1000] GHz");
    if (scene_path.empty())
        throw ValidationError("scene.path is required");
    limits.validate();
    if (tessellation < 1)
        throw ValidationError("tessellation must be >= 1");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ValidationError("beta must be > 0");
    for (double s : snr_db)
        if (!std::isfinite(s))
            throw ValidationError("snr_db entries must be finite");
    if (workers < 0)
        throw ValidationError("workers must be >= 0");
    if (!(pdp_bin_ns > 0.0) || !std::isfinite(pdp_bin_ns))
        throw ValidationError("pdp_bin_ns must be > 0");
    if (atmosphere)
    {
        atmosphere->validate();
        if (frequency_ghz < 1.0)
            throw ValidationError("frequency_ghz must be >= 1 GHz when an atmosphere is configured");
    }
    for (const auto &a : atmospheres)
        a.validate();
    const auto &s = frequency_sweep;
    if (!(s.start_ghz >= 1.0 && s.stop_ghz <= 1000.0 && s.start_ghz <= s.stop_ghz))
        throw ValidationError("sweep.frequency must satisfy 1 <= start_ghz <= stop_ghz <= 1000");
    if (!(s.step_ghz > 0.0) || !std::isfinite(s.step_ghz))
        throw ValidationError("sweep.frequency.step_ghz must be > 0");
    for (int n : array_sizes)
        if (n < 1)
            throw ValidationError("sweep.array_sizes entries must be >= 1");
    for (const auto *spec : {&tx, &rx})
    {
        const std::string name = spec == &tx ? "tx" : "rx";
        if (spec->kind == ArrayKind::explicit_positions)
        {
            if (spec->positions.empty())
                throw ValidationError(name + ".positions must not be empty for an explicit array");
            continue;
        }
        if (spec->counts[0] < 1 || spec->counts[1] < 1)
            throw ValidationError(name + ".counts must be >= 1");
        if (spec->kind == ArrayKind::ula && spec->counts[1] != 1)
            throw ValidationError(name + ".counts: a ULA has n2 = 1");
        if (spec->spacing_m && !(*spec->spacing_m > 0.0))
            throw ValidationError(name + ".spacing_m must be > 0");
    }
}

namespace
{

double number_field(const json &j, const std::string &key, const std::string &path)
{
    if (!j.is_number())
        throw ValidationError(path + key + " must be a number");
    return j.get<double>();
}

int int_field(const json &j, const std::string &key, const std::string &path)
{
    if (!j.is_number_integer())
        throw ValidationError(path + key + " must be an integer");
    return j.get<int>();
}

Vec3 vec_field(const json &j, const std::string &key, const std::string &path)
{
    if (!j.is_array() || j.size() != 3)
        throw ValidationError(path + key + " must be an array of 3 numbers");
    Vec3 v;
    for (int i = 0; i < 3; ++i)
        v[i] = number_field(j[i], key, path);
    return v;
}

void check_keys(const json &j, const std::set<std::string> &allowed, const std::string &path)
{
    if (!j.is_object())
        throw ValidationError((path.empty() ? "config" : path.substr(0, path.size() - 1)) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError("unknown key '" + path + it.key() + "'");
}

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p)
{
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

ArraySpec parse_array(const json &j, const std::string &name)
{
    const std::string path = name + ".";
    check_keys(j, {"kind", "counts", "count", "spacing_m", "center", "axes", "positions"}, path);
    ArraySpec a;
    if (j.contains("kind"))
    {
        if (!j["kind"].is_string())
            throw ValidationError(path + "kind must be a string");
        try
        {
            a.kind = parse_array_kind(j["kind"].get<std::string>());
        }
        catch (const ValidationError &e)
        {
            throw ValidationError(name + "." + e.what());
        }
    }
    if (j.contains("count"))
        a.counts = {int_field(j["count"], "count", path), 1};
    if (j.contains("counts"))
    {
        const auto &c = j["counts"];
        if (c.is_number_integer())
            a.counts = {c.get<int>(), 1};
        else if (c.is_array() && (c.size() == 1 || c.size() == 2))
            a.counts = {int_field(c[0], "counts", path), c.size() == 2 ? int_field(c[1], "counts", path) : 1};
        else
            throw ValidationError(path + "counts must be an integer or [n1, n2]");
    }
    if (j.contains("spacing_m") && !j["spacing_m"].is_null())
        a.spacing_m = number_field(j["spacing_m"], "spacing_m", path);
    if (j.contains("center"))
        a.center = vec_field(j["center"], "center", path);
    if (j.contains("axes"))
    {
        const auto &ax = j["axes"];
        if (!ax.is_array() || ax.empty() || ax.size() > 2)
            throw ValidationError(path + "axes must be [[x,y,z]] or [[x,y,z],[x,y,z]]");
        a.axes[0] = vec_field(ax[0], "axes", path);
        if (ax.size() == 2)
            a.axes[1] = vec_field(ax[1], "axes", path);
    }
    if (j.contains("positions"))
    {
        if (!j["positions"].is_array())
            throw ValidationError(path + "positions must be an array of points");
        for (const auto &p : j["positions"])
            a.positions.push_back(vec_field(p, "positions", path));
    }
    return a;
}

AtmosphereState parse_atmosphere(const json &j, const std::string &name)
{
    const std::string path = name + ".";
    check_keys(j, {"pressure_hpa", "temperature_k", "water_vapor_density"}, path);
    AtmosphereState a;
    if (j.contains("pressure_hpa"))
        a.pressure = number_field(j["pressure_hpa"], "pressure_hpa", path);
    if (j.contains("temperature_k"))
        a.temperature = number_field(j["temperature_k"], "temperature_k", path);
    if (j.contains("water_vapor_density"))
        a.water_vapor_density = number_field(j["water_vapor_density"], "water_vapor_density", path);
    return a;
}

json atmosphere_json(const AtmosphereState &a)
{
    return {{"pressure_hpa", quantize9(a.pressure)},
            {"temperature_k", quantize9(a.temperature)},
            {"water_vapor_density", quantize9(a.water_vapor_density)}};
}

} // namespace

SimulationConfig parse_config(const std::string &text, const std::filesystem::path &base_dir)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ValidationError(std::string("config: invalid JSON at byte ") + std::to_string(e.byte));
    }
    check_keys(j,
               {"scene", "frequency_ghz", "tx", "rx", "limits", "tessellation", "atmosphere", "atmospheres", "beta",
                "snr_db", "output_dir", "workers", "pdp_bin_ns", "sweep", "gas_table", "dump_paths"},
               "");

    SimulationConfig c;
    if (!j.contains("scene"))
        throw ValidationError("scene is required");
    const auto &s = j["scene"];
    if (s.is_string())
        c.scene_path = resolve(base_dir, s.get<std::string>());
    else
    {
        check_keys(s, {"path", "format", "materials"}, "scene.");
        if (!s.contains("path") || !s["path"].is_string())
            throw ValidationError("scene.path is required and must be a string");
        c.scene_path = resolve(base_dir, s["path"].get<std::string>());
        if (s.contains("format"))
        {
            if (!s["format"].is_string())
                throw ValidationError("scene.format must be a string");
            try
            {
                c.scene_format = parse_scene_format(s["format"].get<std::string>());
            }
            catch (const std::exception &e)
            {
                throw ValidationError(std::string("scene.format: ") + e.what());
            }
        }
        if (s.contains("materials") && !s["materials"].is_null())
        {
            if (!s["materials"].is_string())
                throw ValidationError("scene.materials must be a path string");
            c.material_map = resolve(base_dir, s["materials"].get<std::string>());
        }
    }
    if (!j.contains("frequency_ghz"))
        throw ValidationError("frequency_ghz is required");
    c.frequency_ghz = number_field(j["frequency_ghz"], "frequency_ghz", "");
    if (j.contains("tx"))
        c.tx = parse_array(j["tx"], "tx");
    if (j.contains("rx"))
        c.rx = parse_array(j["rx"], "rx");
    else
        c.rx.center = Vec3(1.0, 0.0, 0.0);
    if (j.contains("limits"))
    {
        const auto &l = j["limits"];
        check_keys(l, {"max_reflections", "max_diffractions", "max_scatterings", "max_total_interactions"}, "limits.");
        if (l.contains("max_reflections"))
            c.limits.max_reflections = int_field(l["max_reflections"], "max_reflections", "limits.");
        if (l.contains("max_diffractions"))
            c.limits.max_diffractions = int_field(l["max_diffractions"], "max_diffractions", "limits.");
        if (l.contains("max_scatterings"))
            c.limits.max_scatterings = int_field(l["max_scatterings"], "max_scatterings", "limits.");
        if (l.contains("max_total_interactions"))
            c.limits.max_total_interactions =
                int_field(l["max_total_interactions"], "max_total_interactions", "limits.");
    }
    if (j.contains("tessellation"))
        c.tessellation = int_field(j["tessellation"], "tessellation", "");
    if (j.contains("atmosphere") && !j["atmosphere"].is_null())
        c.atmosphere = parse_atmosphere(j["atmosphere"], "atmosphere");
    if (j.contains("atmospheres"))
    {
        if (!j["atmospheres"].is_array())
            throw ValidationError("atmospheres must be an array");
        for (std::size_t i = 0; i < j["atmospheres"].size(); ++i)
            c.atmospheres.push_back(parse_atmosphere(j["atmospheres"][i], "atmospheres[" + std::to_string(i) + "]"));
    }
    if (j.contains("beta"))
        c.beta = number_field(j["beta"], "beta", "");
    if (j.contains("snr_db"))
    {
        const auto &v = j["snr_db"];
        c.snr_db.clear();
        if (v.is_number())
            c.snr_db.push_back(v.get<double>());
        else if (v.is_array())
            for (const auto &x : v)
                c.snr_db.push_back(number_field(x, "snr_db", ""));
        else
            throw ValidationError("snr_db must be a number or an array of numbers");
    }
    if (j.contains("output_dir"))
    {
        if (!j["output_dir"].is_string())
            throw ValidationError("output_dir must be a string");
        c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    }
    else
        c.output_dir = base_dir / "out";
    if (j.contains("workers"))
        c.workers = int_field(j["workers"], "workers", "");
    if (j.contains("pdp_bin_ns"))
        c.pdp_bin_ns = number_field(j["pdp_bin_ns"], "pdp_bin_ns", "");
    if (j.contains("sweep"))
    {
        const auto &sw = j["sweep"];
        check_keys(sw, {"frequency", "array_sizes"}, "sweep.");
        if (sw.contains("frequency"))
        {
            const auto &f = sw["frequency"];
            check_keys(f, {"start_ghz", "stop_ghz", "step_ghz"}, "sweep.frequency.");
            if (f.contains("start_ghz"))
                c.frequency_sweep.start_ghz = number_field(f["start_ghz"], "start_ghz", "sweep.frequency.");
            if (f.contains("stop_ghz"))
                c.frequency_sweep.stop_ghz = number_field(f["stop_ghz"], "stop_ghz", "sweep.frequency.");
            if (f.contains("step_ghz"))
                c.frequency_sweep.step_ghz = number_field(f["step_ghz"], "step_ghz", "sweep.frequency.");
        }
        if (sw.contains("array_sizes"))
        {
            if (!sw["array_sizes"].is_array())
                throw ValidationError("sweep.array_sizes must be an array of integers");
            c.array_sizes.clear();
            for (const auto &n : sw["array_sizes"])
                c.array_sizes.push_back(int_field(n, "array_sizes", "sweep."));
        }
    }
    if (j.contains("gas_table") && !j["gas_table"].is_null())
    {
        if (!j["gas_table"].is_string())
            throw ValidationError("gas_table must be a path string");
        c.gas_table = resolve(base_dir, j["gas_table"].get<std::string>());
    }
    if (j.contains("dump_paths"))
    {
        if (!j["dump_paths"].is_boolean())
            throw ValidationError("dump_paths must be a boolean");
        c.dump_paths = j["dump_paths"].get<bool>();
    }
    if (c.atmospheres.empty())
    {
        AtmosphereState dry, humid;
        dry.water_vapor_density = 0.0;
        humid.water_vapor_density = 8.0;
        c.atmospheres = {dry, humid};
    }
    c.validate();
    return c;
}

SimulationConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

const GasLineTable &gas_table_for(const SimulationConfig &config)
{
    if (!config.gas_table)
        return GasLineTable::builtin();
    // Small cache keyed by path; tables are immutable once loaded
    static std::mutex mutex;
    static std::map<std::string, std::unique_ptr<GasLineTable>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto &slot = cache[config.gas_table->string()];
    if (!slot)
        slot = std::make_unique<GasLineTable>(GasLineTable::load_csv(*config.gas_table));
    return *slot;
}

Scene load_config_scene(const SimulationConfig &config)
{
    return load_scene(config.scene_path, config.scene_format, config.material_map);
}

SimulationResult simulate(const SimulationConfig &config, const Scene &scene, const AccelStructure &accel,
                          const std::vector<Vec3> &tx_positions, const std::vector<Vec3> &rx_positions,
                          const RayFan &fan)
{
    SimulationResult r;
    r.frequency_ghz = config.frequency_ghz;
    r.wavelength = wavelength_m(config.frequency_ghz);
    r.beta = config.beta;
    r.reference_power = reference_power(r.wavelength, r.beta);
    r.n_tx = tx_positions.size();
    r.n_rx = rx_positions.size();
    r.tessellation = fan.tessellation;
    r.alpha = fan.angular_separation_alpha;
    r.atmosphere = config.atmosphere;
    if (config.atmosphere)
    {
        r.rates = atmospheric_rates(config.frequency_ghz, *config.atmosphere, gas_table_for(config));
        r.warnings = config.atmosphere->warnings();
    }

    TraceOptions opt;
    opt.workers = config.workers;
    r.paths = trace(scene, accel, tx_positions, rx_positions, fan, config.limits, opt);

    std::vector<PolarizedField> fields(r.paths.size());
    r.mpcs.resize(r.paths.size());
    const std::size_t per_task = 256;
    parallel_for((r.paths.size() + per_task - 1) / per_task, config.workers, [&](std::size_t task) {
        const std::size_t end = std::min(r.paths.size(), (task + 1) * per_task);
        for (std::size_t i = task * per_task; i < end; ++i)
        {
            fields[i] = path_field(r.paths[i], config.frequency_ghz, r.rates, scene);
            r.mpcs[i] = make_mpc(r.paths[i], fields[i]);
        }
    });

    const std::size_t pairs = r.n_tx * r.n_rx;
    r.pair_field.assign(pairs, CVec3::Zero());
    r.pair_paths.assign(pairs, 0);
    for (std::size_t i = 0; i < r.paths.size(); ++i)
    {
        const std::size_t k = r.paths[i].rx_index * r.n_tx + r.paths[i].tx_index;
        r.pair_field[k] += r.mpcs[i].field;
        ++r.pair_paths[k];
    }
    r.pair_power.resize(pairs);
    r.pair_phase.resize(pairs);
    for (std::size_t k = 0; k < pairs; ++k)
    {
        r.pair_power[k] = received_power(r.pair_field[k].norm(), r.wavelength, r.beta);
        r.pair_phase[k] = r.pair_power[k] > 0.0 ? field_phase(r.pair_field[k]) : 0.0;
    }
    r.h = channel_matrix(r.n_rx, r.n_tx, r.pair_power, r.pair_phase);
    return r;
}

SimulationResult simulate(const SimulationConfig &config)
{
    config.validate();
    const Scene scene = load_config_scene(config);
    const AccelStructure accel(scene);
    const double lambda = wavelength_m(config.frequency_ghz);
    const auto tx = config.tx.build(lambda);
    const auto rx = config.rx.build(lambda);
    const RayFan fan = geodesic_directions(config.tessellation);
    return simulate(config, scene, accel, tx.element_positions, rx.element_positions, fan);
}

std::vector<double> per_port_power_db(const SimulationResult &result)
{
    std::vector<double> out(result.n_rx);
    for (std::size_t q = 0; q < result.n_rx; ++q)
    {
        CVec3 sum = CVec3::Zero();
        for (std::size_t p = 0; p < result.n_tx; ++p)
            sum += result.pair_field[q * result.n_tx + p];
        const double pw = received_power(sum.norm(), result.wavelength, result.beta);
        out[q] = pw > 0.0 ? 10.0 * std::log10(pw / result.reference_power) : -std::numeric_limits<double>::infinity();
    }
    return out;
}

namespace
{

json number_or_null(double x)
{
    return std::isfinite(x) ? json(quantize9(x)) : json(nullptr);
}

json angles_json(const Angles &a)
{
    return {{"azimuth_deg", quantize9(a.azimuth)}, {"elevation_deg", quantize9(a.elevation)}};
}

double mean_pair_power(const SimulationResult &r)
{
    double sum = 0.0;
    for (double p : r.pair_power)
        sum += p;
    return r.pair_power.empty() ? 0.0 : sum / static_cast<double>(r.pair_power.size());
}

std::optional<double> capacity_or_none(const SimulationResult &r, double snr_db)
{
    if (!(r.h.squaredNorm() > 0.0))
        return std::nullopt;
    return capacity(r.h, std::pow(10.0, snr_db / 10.0));
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

} // namespace

std::string report_json(const SimulationResult &r, const SimulationConfig &config)
{
    json j;
    j["frequency_ghz"] = quantize9(r.frequency_ghz);
    j["wavelength_m"] = quantize9(r.wavelength);
    j["beta"] = quantize9(r.beta);
    j["n_tx"] = r.n_tx;
    j["n_rx"] = r.n_rx;
    j["tessellation"] = r.tessellation;
    j["ray_count"] = 10 * r.tessellation * r.tessellation + 2;
    j["alpha_rad"] = quantize9(r.alpha);
    j["limits"] = {{"max_reflections", config.limits.max_reflections},
                   {"max_diffractions", config.limits.max_diffractions},
                   {"max_scatterings", config.limits.max_scatterings},
                   {"max_total_interactions", config.limits.max_total_interactions}};
    j["atmosphere"] = r.atmosphere ? atmosphere_json(*r.atmosphere) : json(nullptr);
    j["gamma_db_per_km"] = quantize9(r.rates.gamma_db_per_km);
    j["phi_deg_per_km"] = quantize9(r.rates.phi_deg_per_km);
    j["path_count"] = r.paths.size();
    j["reference_power_w"] = quantize9(r.reference_power);

    const double mean_power = mean_pair_power(r);
    const double pl = path_loss_db(r.reference_power, mean_power);
    j["received_power_w"] = quantize9(mean_power);
    j["path_loss_db"] = number_or_null(pl);
    j["blocked"] = !std::isfinite(pl);

    bool has_power = false;
    for (const auto &m : r.mpcs)
        has_power = has_power || m.amplitude > 0.0;
    if (has_power)
    {
        j["rms_delay_spread_s"] = quantize9(rms_delay_spread(r.mpcs));
        const auto ma = mean_angles(r.mpcs);
        j["mean_aod"] = angles_json(ma.aod);
        j["mean_aoa"] = angles_json(ma.aoa);
    }
    else
    {
        j["rms_delay_spread_s"] = nullptr;
        j["mean_aod"] = nullptr;
        j["mean_aoa"] = nullptr;
    }

    json pdp_all = json::array();
    for (const auto &b : pdp(r.mpcs, config.pdp_bin_ns * 1e-9, r.wavelength, r.beta))
        pdp_all.push_back({{"delay_s", quantize9(b.delay)}, {"power_w", quantize9(b.power)}});
    j["pdp"] = pdp_all;

    json caps = json::array();
    for (double s : config.snr_db)
    {
        const auto c = capacity_or_none(r, s);
        caps.push_back({{"snr_db", quantize9(s)}, {"capacity_bps_hz", c ? json(quantize9(*c)) : json(nullptr)}});
    }
    j["capacity"] = caps;

    json pairs = json::array();
    for (std::size_t q = 0; q < r.n_rx; ++q)
        for (std::size_t p = 0; p < r.n_tx; ++p)
        {
            const std::size_t k = q * r.n_tx + p;
            pairs.push_back({{"tx", p},
                             {"rx", q},
                             {"path_count", r.pair_paths[k]},
                             {"power_w", quantize9(r.pair_power[k])},
                             {"path_loss_db", number_or_null(path_loss_db(r.reference_power, r.pair_power[k]))},
                             {"phase_rad", quantize9(r.pair_phase[k])}});
        }
    j["pairs"] = pairs;
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_outputs(const SimulationResult &r, const SimulationConfig &config)
{
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    std::vector<fs::path> written;

    const fs::path report = config.output_dir / "channel_report.json";
    write_text(report, report_json(r, config));
    written.push_back(report);

    // PDP per (tx, rx) pair
    {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<MPC>> by_pair;
        for (const auto &m : r.mpcs)
            by_pair[{m.tx_index, m.rx_index}].push_back(m);
        std::string text = "tx_index,rx_index,delay_s,power_w\n";
        for (const auto &[key, mpcs] : by_pair)
            for (const auto &b : pdp(mpcs, config.pdp_bin_ns * 1e-9, r.wavelength, r.beta))
                text += std::to_string(key.first) + "," + std::to_string(key.second) + "," + format_number(b.delay) +
                        "," + format_number(b.power) + "\n";
        const fs::path p = config.output_dir / "pdp.csv";
        write_text(p, text);
        written.push_back(p);
    }

    {
        std::string text = "snr_db,capacity_bps_hz\n";
        for (double s : config.snr_db)
        {
            const auto c = capacity_or_none(r, s);
            text += format_number(s) + "," + (c ? format_number(*c) : std::string("nan")) + "\n";
        }
        const fs::path p = config.output_dir / "capacity.csv";
        write_text(p, text);
        written.push_back(p);
    }

    if (r.n_tx * r.n_rx > 1)
    {
        std::string text = "rx_index";
        for (std::size_t p = 0; p < r.n_tx; ++p)
            text += ",re_tx" + std::to_string(p) + ",im_tx" + std::to_string(p);
        text += "\n";
        for (std::size_t q = 0; q < r.n_rx; ++q)
        {
            text += std::to_string(q);
            for (std::size_t p = 0; p < r.n_tx; ++p)
                text += "," + format_number(r.h(q, p).real()) + "," + format_number(r.h(q, p).imag());
            text += "\n";
        }
        const fs::path p = config.output_dir / "h_matrix.csv";
        write_text(p, text);
        written.push_back(p);
    }

    if (config.dump_paths)
    {
        std::ostringstream out;
        write_paths_jsonl(out, r.paths);
        const fs::path p = config.output_dir / "paths.jsonl";
        write_text(p, out.str());
        written.push_back(p);
    }
    return written;
}

std::vector<std::filesystem::path> run_simulation(const SimulationConfig &config)
{
    return write_outputs(simulate(config), config);
}

std::filesystem::path run_gas_sweep(const SimulationConfig &config)
{
    config.validate();
    const auto &table = gas_table_for(config);
    const auto grid = config.frequency_sweep.grid();
    std::string text = "frequency_ghz";
    for (std::size_t a = 0; a < config.atmospheres.size(); ++a)
        text += ",gamma_db_per_km_a" + std::to_string(a) + ",phi_deg_per_km_a" + std::to_string(a);
    text += "\n";
    for (double f : grid)
    {
        text += format_number(f);
        for (const auto &atm : config.atmospheres)
        {
            const auto rates = atmospheric_rates(f, atm, table);
            text += "," + format_number(rates.gamma_db_per_km) + "," + format_number(rates.phi_deg_per_km);
        }
        text += "\n";
    }
    std::filesystem::create_directories(config.output_dir);
    const auto path = config.output_dir / "gas_sweep.csv";
    write_text(path, text);
    return path;
}

namespace
{

ArraySpec resized(const ArraySpec &spec, int n, const std::string &name)
{
    ArraySpec s = spec;
    switch (spec.kind)
    {
    case ArrayKind::ula:
        s.counts = {n, 1};
        break;
    case ArrayKind::upa:
    {
        const int n1 = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
        if (n % n1 != 0)
            throw ValidationError("sweep.array_sizes: " + std::to_string(n) + " is not a valid UPA size for " + name +
                                  " (floor(sqrt(N)) must divide N)");
        s.counts = {n1, n / n1};
        break;
    }
    case ArrayKind::explicit_positions:
        throw ValidationError(name + ".kind: sweep-array needs a ULA or UPA");
    }
    return s;
}

} // namespace

std::vector<std::filesystem::path> run_array_sweep(const SimulationConfig &config)
{
    config.validate();
    const Scene scene = load_config_scene(config);
    const AccelStructure accel(scene);
    const RayFan fan = geodesic_directions(config.tessellation);
    const double lambda = wavelength_m(config.frequency_ghz);

    std::string cap_text = "n,snr_db,capacity_bps_hz\n";
    std::string port_text = "n,port,power_db\n";
    for (int n : config.array_sizes)
    {
        const auto tx = resized(config.tx, n, "tx").build(lambda);
        const auto rx = resized(config.rx, n, "rx").build(lambda);
        const auto r = simulate(config, scene, accel, tx.element_positions, rx.element_positions, fan);
        for (double s : config.snr_db)
        {
            const auto c = capacity_or_none(r, s);
            cap_text += std::to_string(n) + "," + format_number(s) + "," +
                        (c ? format_number(*c) : std::string("nan")) + "\n";
        }
        const auto ports = per_port_power_db(r);
        for (std::size_t q = 0; q < ports.size(); ++q)
            port_text += std::to_string(n) + "," + std::to_string(q) + "," + format_number(ports[q]) + "\n";
    }
    std::filesystem::create_directories(config.output_dir);
    const auto cap_path = config.output_dir / "capacity_sweep.csv";
    const auto port_path = config.output_dir / "port_power.csv";
    write_text(cap_path, cap_text);
    write_text(port_path, port_text);
    return {cap_path, port_path};
}

} // namespace sbrt
