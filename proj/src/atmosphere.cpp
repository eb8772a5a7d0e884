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

#include "sbrt/atmosphere.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sbrt
{

void AtmosphereState::validate() const
{
    if (!(pressure > 0.0) || !std::isfinite(pressure))
        throw ValidationError("atmosphere.pressure_hpa must be > 0");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw ValidationError("atmosphere.temperature_k must be > 0");
    if (!(water_vapor_density >= 0.0) || !std::isfinite(water_vapor_density))
        throw ValidationError("atmosphere.water_vapor_density must be >= 0");
}

std::vector<std::string> AtmosphereState::warnings() const
{
    std::vector<std::string> w;
    if (pressure > 1100.0)
        w.push_back("atmosphere.pressure_hpa above 1100 hPa");
    if (temperature < 150.0 || temperature > 350.0)
        w.push_back("atmosphere.temperature_k outside 150-350 K");
    return w;
}

double AtmosphereState::water_vapor_pressure() const
{
    return water_vapor_density * temperature / 216.7;
}

double AtmosphereState::dry_pressure() const
{
    return pressure;
}

double AtmosphereState::total_pressure() const
{
    return pressure + water_vapor_pressure();
}

GasLineTable GasLineTable::parse_csv(const std::string &text, const std::string &origin)
{
    GasLineTable table;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!header)
        {
            if (line.rfind("species,", 0) != 0)
                throw FormatError(origin + ":" + std::to_string(line_no) + ": expected header 'species,f0_GHz,...'");
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 8)
            throw FormatError(origin + ":" + std::to_string(line_no) + ": expected 8 columns, got " +
                              std::to_string(cells.size()));
        GasLine g;
        if (cells[0] == "oxygen")
            g.species = GasSpecies::oxygen;
        else if (cells[0] == "water_vapour" || cells[0] == "water_vapor")
            g.species = GasSpecies::water_vapour;
        else
            throw FormatError(origin + ":" + std::to_string(line_no) + ": unknown species '" + cells[0] + "'");
        for (int k = 0; k < 7; ++k)
        {
            char *end = nullptr;
            const double v = std::strtod(cells[k + 1].c_str(), &end);
            if (end == cells[k + 1].c_str() || !std::isfinite(v))
                throw FormatError(origin + ":" + std::to_string(line_no) + ": bad number '" + cells[k + 1] + "'");
            if (k == 0)
                g.f0 = v;
            else
                g.c[k - 1] = v;
        }
        auto &dst = g.species == GasSpecies::oxygen ? table.oxygen_ : table.water_;
        if (!dst.empty() && !(g.f0 > dst.back().f0))
            throw FormatError(origin + ":" + std::to_string(line_no) +
                              ": line centers must be strictly increasing per species");
        dst.push_back(g);
    }
    if (table.oxygen_.empty() || table.water_.empty())
        throw FormatError(origin + ": table needs both oxygen and water_vapour lines");
    return table;
}

GasLineTable GasLineTable::load_csv(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError(path.string() + ": cannot open gas line table");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path.string());
}

const GasLineTable &GasLineTable::builtin()
{
    static const GasLineTable table = [] {
        std::filesystem::path dir;
        if (const char *env = std::getenv("SBRT_DATA_DIR"); env && *env)
            dir = env;
        else
        {
#ifdef SBRT_DEFAULT_DATA_DIR
            dir = SBRT_DEFAULT_DATA_DIR;
#else
            dir = "data";
#endif
        }
        return load_csv(dir / "gas_lines_p676.csv");
    }();
    return table;
}

Refractivity gas_refractivity(double f, const AtmosphereState &atm, const GasLineTable &table)
{
    if (!(f >= 1.0 && f <= 1000.0))
        throw RangeError("frequency " + std::to_string(f) + " GHz outside the 1-1000 GHz gas model range");
    atm.validate();
    const double theta = 300.0 / atm.temperature;
    const double e = atm.water_vapor_pressure();
    const double p = atm.dry_pressure();

    Refractivity n;
    for (const auto &l : table.oxygen())
    {
        const auto &a = l.c;
        const double s = a[0] * 1e-7 * p * std::pow(theta, 3) * std::exp(a[1] * (1.0 - theta));
        double df = a[2] * 1e-4 * (p * std::pow(theta, 0.8 - a[3]) + 1.1 * e * theta);
        df = std::sqrt(df * df + 2.25e-6);
        const double delta = (a[4] + a[5] * theta) * 1e-4 * (p + e) * std::pow(theta, 0.8);
        const double d1 = (l.f0 - f) * (l.f0 - f) + df * df;
        const double d2 = (l.f0 + f) * (l.f0 + f) + df * df;
        const double fi = f / l.f0 * ((df - delta * (l.f0 - f)) / d1 + (df - delta * (l.f0 + f)) / d2);
        const double fr = f / l.f0 * (((l.f0 - f) + delta * df) / d1 - ((l.f0 + f) + delta * df) / d2);
        n.oxygen_imag += s * fi;
        n.oxygen_real += s * fr;
    }
    // Dry continuum: Debye spectrum of oxygen plus pressure-induced nitrogen
    const double d = 5.6e-4 * (p + e) * std::pow(theta, 0.8);
    const double x = f / d;
    n.oxygen_imag += f * p * theta * theta *
                     (6.14e-5 / (d * (1.0 + x * x)) + 1.4e-12 * p * std::pow(theta, 1.5) / (1.0 + 1.9e-5 * std::pow(f, 1.5)));
    n.oxygen_real += -6.14e-5 * p * theta * theta * x * x / (1.0 + x * x);

    for (const auto &l : table.water_vapour())
    {
        const auto &b = l.c;
        const double s = b[0] * 1e-1 * e * std::pow(theta, 3.5) * std::exp(b[1] * (1.0 - theta));
        double df = b[2] * 1e-4 * (p * std::pow(theta, b[3]) + b[4] * e * std::pow(theta, b[5]));
        df = 0.535 * df + std::sqrt(0.217 * df * df + 2.1316e-12 * l.f0 * l.f0 / theta);
        const double d1 = (l.f0 - f) * (l.f0 - f) + df * df;
        const double d2 = (l.f0 + f) * (l.f0 + f) + df * df;
        const double fi = f / l.f0 * (df / d1 + df / d2);
        const double fr = f / l.f0 * ((l.f0 - f) / d1 - (l.f0 + f) / d2);
        n.water_imag += s * fi;
        n.water_real += s * fr;
    }
    return n;
}

double specific_attenuation(double f, const AtmosphereState &atm, const GasLineTable &table)
{
    const auto n = gas_refractivity(f, atm, table);
    return 0.1820 * f * (n.oxygen_imag + n.water_imag);
}

double specific_dispersion(double f, const AtmosphereState &atm, const GasLineTable &table)
{
    const auto n = gas_refractivity(f, atm, table);
    return -1.2008 * f * (n.oxygen_real + n.water_real);
}

AtmosphericRates atmospheric_rates(double f, const AtmosphereState &atm, const GasLineTable &table)
{
    const auto n = gas_refractivity(f, atm, table);
    return {0.1820 * f * (n.oxygen_imag + n.water_imag), -1.2008 * f * (n.oxygen_real + n.water_real)};
}

} // namespace sbrt
