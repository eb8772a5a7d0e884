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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <complex>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sbrt
{

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Box3 = Eigen::AlignedBox3d;
using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kFreeSpaceImpedance = 376.730; // Ohm
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;

inline double wavelength_m(double frequency_ghz)
{
    return kSpeedOfLight / (frequency_ghz * 1e9);
}

// Rounds to the value printed with 9 significant digits, so text output
// re-reads to the same double.
inline double quantize9(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::strtod(buf, nullptr);
}

// Error taxonomy. Every library failure derives from one of the standard
// exception types so callers can catch coarsely.

// Malformed input file. The message carries the location (line/column or byte offset).
class FormatError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Input parsed but violates a documented invariant.
class ValidationError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

class RangeError : public std::out_of_range
{
  public:
    using std::out_of_range::out_of_range;
};

// A statistic has no defined value for the given input (e.g. zero total power).
class UndefinedValueError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

} // namespace sbrt
