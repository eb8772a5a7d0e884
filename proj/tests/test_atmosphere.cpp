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

#include <doctest.h>

#include <cmath>

using namespace sbrt;

namespace
{

AtmosphereState standard(double rho)
{
    AtmosphereState a;
    a.pressure = 1013.25;
    a.temperature = 288.15;
    a.water_vapor_density = rho;
    return a;
}

// Reference line-by-line values (dB/km), dry-air pressure 1013.25 hPa, 288.15 K,
// computed with the open-source itur package (exact line-by-line branch).
const double kFreqs[10] = {10, 22.235, 50, 60, 100, 118.75, 183.31, 300, 557, 900};
const double kDry[10] = {0.008144046821, 0.01315772957, 0.2739476282, 14.6511497,  0.03321232359,
                         1.348182561,    0.01266929426, 0.02571129743, 0.07703133641, 0.1640727161};
const double kHumid75[10] = {0.01419854195, 0.1922706706, 0.3884271858, 14.77831664, 0.4580589648,
                             1.94892829,    28.02046658,  5.247088617,  17107.15367, 106.9579141};
const double kHumid8[10] = {0.0146614356, 0.2039365201, 0.3974274016, 14.78875271, 0.4918147664,
                            1.996707283,  29.81735754,  5.651410172,  18195.32882, 115.1370081};

} // namespace

TEST_CASE("builtin table has the expected line counts")
{
    const auto &t = GasLineTable::builtin();
    CHECK(t.oxygen().size() == 44);
    CHECK(t.water_vapour().size() == 35);
    CHECK(t.oxygen().front().f0 == doctest::Approx(50.474214));
    CHECK(t.water_vapour().front().f0 == doctest::Approx(22.235080));
}

TEST_CASE("specific attenuation against the reference implementation")
{
    const auto &t = GasLineTable::builtin();
    const double *tables[3] = {kDry, kHumid75, kHumid8};
    const double rho[3] = {0.0, 7.5, 8.0};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 10; ++i)
        {
            const double g = specific_attenuation(kFreqs[i], standard(rho[k]), t);
            CHECK(g == doctest::Approx(tables[k][i]).epsilon(1e-6));
        }
}

TEST_CASE("humid curve lies above the dry curve")
{
    const auto &t = GasLineTable::builtin();
    for (double f = 1.0; f <= 1000.0; f += 0.37)
        CHECK(specific_attenuation(f, standard(8.0), t) >= specific_attenuation(f, standard(0.0), t));
}

TEST_CASE("dispersion changes sign across strong lines")
{
    const auto &t = GasLineTable::builtin();
    const auto a = standard(8.0);
    CHECK(specific_dispersion(55.0, a, t) < 0.0);
    CHECK(specific_dispersion(65.0, a, t) > 0.0);
    CHECK(specific_dispersion(180.0, a, t) < specific_dispersion(186.0, a, t));
    const auto r = atmospheric_rates(60.0, a, t);
    CHECK(r.gamma_db_per_km == specific_attenuation(60.0, a, t));
    CHECK(r.phi_deg_per_km == specific_dispersion(60.0, a, t));
}

TEST_CASE("frequency outside 1 to 1000 GHz is a range error")
{
    const auto &t = GasLineTable::builtin();
    CHECK_THROWS_AS(specific_attenuation(0.5, standard(7.5), t), RangeError);
    CHECK_THROWS_AS(specific_attenuation(1000.5, standard(7.5), t), RangeError);
    CHECK_NOTHROW(specific_attenuation(1.0, standard(7.5), t));
    CHECK_NOTHROW(specific_attenuation(1000.0, standard(7.5), t));
}

TEST_CASE("state validation and warnings")
{
    AtmosphereState a = standard(7.5);
    CHECK_NOTHROW(a.validate());
    CHECK(a.warnings().empty());
    CHECK(a.water_vapor_pressure() == doctest::Approx(7.5 * 288.15 / 216.7));
    CHECK(a.dry_pressure() == 1013.25);
    CHECK(a.total_pressure() == doctest::Approx(1013.25 + a.water_vapor_pressure()));
    a.pressure = 1200.0;
    CHECK(a.warnings().size() == 1);
    a.temperature = 400.0;
    CHECK(a.warnings().size() == 2);
    AtmosphereState bad = standard(-1.0);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = standard(7.5);
    bad.temperature = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = standard(7.5);
    bad.pressure = -3.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("line table parsing")
{
    const std::string ok = "# comment\nspecies,f0_GHz,c1,c2,c3,c4,c5,c6\n"
                           "oxygen,60.0,1,2,3,4,5,6\n"
                           "water_vapour,22.0,1,2,3,4,5,6\n";
    const auto t = GasLineTable::parse_csv(ok);
    CHECK(t.oxygen().size() == 1);
    CHECK(t.water_vapour().size() == 1);
    CHECK(t.oxygen()[0].c[5] == 6.0);
    CHECK_THROWS_AS(GasLineTable::parse_csv("species,f0_GHz,c1,c2,c3,c4,c5,c6\nozone,1,1,1,1,1,1,1\n"), FormatError);
    CHECK_THROWS_AS(GasLineTable::parse_csv("species,f0_GHz,c1,c2,c3,c4,c5,c6\noxygen,1,1,1\n"), FormatError);
    CHECK_THROWS_AS(GasLineTable::parse_csv("species,f0_GHz,c1,c2,c3,c4,c5,c6\n"
                                            "oxygen,60,1,1,1,1,1,1\noxygen,59,1,1,1,1,1,1\n"),
                    FormatError);
}

TEST_CASE("a lone water line follows the line shape")
{
    // Independent evaluation of one water vapour line with its Doppler-corrected width
    const std::string csv = "species,f0_GHz,c1,c2,c3,c4,c5,c6\noxygen,60.0,0,0,1,0.8,0,0\nwater_vapour,183.310087,2.3,0.8,28.5,0.7,4.5,0.6\n";
    const auto t = GasLineTable::parse_csv(csv);
    const auto a = standard(7.5);
    const double th = 300.0 / a.temperature;
    const double e = a.water_vapor_pressure();
    const double p = a.pressure;
    const double f0 = 183.310087, f = 190.0;
    const double s = 2.3 * 1e-1 * e * std::pow(th, 3.5) * std::exp(0.8 * (1 - th));
    double df = 28.5 * 1e-4 * (p * std::pow(th, 0.7) + 4.5 * e * std::pow(th, 0.6));
    df = 0.535 * df + std::sqrt(0.217 * df * df + 2.1316e-12 * f0 * f0 / th);
    const double shape = f / f0 * (df / ((f0 - f) * (f0 - f) + df * df) + df / ((f0 + f) * (f0 + f) + df * df));
    const auto n = gas_refractivity(f, a, t);
    CHECK(n.water_imag == doctest::Approx(s * shape).epsilon(1e-12));
}
