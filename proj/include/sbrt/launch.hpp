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
#include <string>
#include <vector>

namespace sbrt
{

struct RayFan
{
    std::vector<Vec3> directions;
    double angular_separation_alpha = 0.0; // radians, max nearest-neighbour angle
    double max_edge_angle = 0.0;           // radians, longest edge of the subdivided mesh
    int tessellation = 0;
};

// Class-I geodesic subdivision of the regular icosahedron with frequency T,
// 10*T^2 + 2 unit directions. Ordering: the 12 icosahedron vertices, then edge
// points, then face-interior points. Throws ValidationError for T < 1.
RayFan geodesic_directions(int tessellation);

enum class ArrayKind
{
    ula,
    upa,
    explicit_positions
};

ArrayKind parse_array_kind(const std::string &name);
std::string to_string(ArrayKind kind);

struct ArrayGeometry
{
    ArrayKind kind = ArrayKind::ula;
    std::vector<Vec3> element_positions;
    std::size_t element_count = 0;
    double spacing = 0.0;
    std::array<Vec3, 2> orientation{Vec3::UnitX(), Vec3::UnitY()};
    Vec3 center = Vec3::Zero();
};

// ULA: n1 elements along axes[0] (n2 must be 1). UPA: n1 x n2 grid spanned by
// axes[0] and axes[1]; element (i, j) has index i * n2 + j. Elements are
// centred on `center`.
ArrayGeometry make_array(ArrayKind kind, std::array<int, 2> counts, double spacing, const Vec3 &center,
                         const std::array<Vec3, 2> &axes = {Vec3::UnitX(), Vec3::UnitY()});

ArrayGeometry make_explicit_array(std::vector<Vec3> positions);

} // namespace sbrt
