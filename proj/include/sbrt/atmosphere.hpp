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

#include "sbrt/common.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace sbrt
{

struct AtmosphereState
{
    double pressure = 1013.25;          // dry-air pressure, hPa
    double temperature = 288.15;        // K
    double water_vapor_density = 7.5;   // g/m^3

    void validate() const;
    // Soft range checks (pressure above 1100 hPa, temperature outside 150-350 K).
    std::vector<std::string> warnings() const;
    double water_vapor_pressure() const; // e = rho * T / 216.7, hPa
    double dry_pressure() const;         // p = pressure
    double total_pressure() const;       // p + e
};

enum class GasSpecies
{
    oxygen,
    water_vapour
};

struct GasLine
{
    GasSpecies species = GasSpecies::oxygen;
    double f0 = 0.0; // GHz
    std::array<double, 6> c{}; // a1..a6 (oxygen) or b1..b6 (water vapour)
};

class GasLineTable
{
  public:
    GasLineTable() = default;

    // CSV with header species,f0_GHz,c1..c6; lines starting with '#' are comments.
    static GasLineTable load_csv(const std::filesystem::path &path);
    static GasLineTable parse_csv(const std::string &text, const std::string &origin = "<string>");

    // Table shipped in the data directory ($SBRT_DATA_DIR, else the build-time default).
    static const GasLineTable &builtin();

    const std::vector<GasLine> &oxygen() const { return oxygen_; }
    const std::vector<GasLine> &water_vapour() const { return water_; }

  private:
    std::vector<GasLine> oxygen_;
    std::vector<GasLine> water_;
};

struct Refractivity
{
    double oxygen_imag = 0.0; // N'' oxygen lines plus dry continuum
    double water_imag = 0.0;
    double oxygen_real = 0.0; // N'
    double water_real = 0.0;
};

// Line-by-line complex refractivity (ppm). Throws RangeError outside 1-1000 GHz.
Refractivity gas_refractivity(double frequency_ghz, const AtmosphereState &atm, const GasLineTable &table);

// gamma = 0.1820 f N'' (dB/km)
double specific_attenuation(double frequency_ghz, const AtmosphereState &atm, const GasLineTable &table);

// phi = -1.2008 f N' (deg/km)
double specific_dispersion(double frequency_ghz, const AtmosphereState &atm, const GasLineTable &table);

struct AtmosphericRates
{
    double gamma_db_per_km = 0.0;
    double phi_deg_per_km = 0.0;
};

AtmosphericRates atmospheric_rates(double frequency_ghz, const AtmosphereState &atm, const GasLineTable &table);

} // namespace sbrt
