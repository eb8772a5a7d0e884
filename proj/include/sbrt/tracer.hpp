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

#include "sbrt/bvh.hpp"
#include "sbrt/launch.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sbrt
{

enum class InteractionKind
{
    reflection = 0,
    diffraction = 1,
    scattering = 2
};

std::string to_string(InteractionKind kind);

struct Interaction
{
    InteractionKind kind = InteractionKind::reflection;
    Vec3 point = Vec3::Zero();
    Vec3 surface_normal = Vec3::Zero(); // reflection/scattering: facet normal; diffraction: face-0 normal
    std::uint32_t material_id = 0;
    double incidence_angle = 0.0;
    // Signature id: surface (reflection), triangle (scattering), edge (diffraction)
    std::uint32_t feature_id = 0;
    std::uint32_t triangle_id = 0;

    // Diffraction only. (face_tangent, surface_normal, edge_direction) is a
    // right-handed frame; face_tangent points from the edge into face 0.
    Vec3 edge_direction = Vec3::Zero();
    Vec3 face_tangent = Vec3::Zero();
    double wedge_interior_angle = 0.0;
};

struct PathRecord
{
    std::uint32_t tx_index = 0;
    std::uint32_t rx_index = 0;
    std::vector<Interaction> interactions;
    std::vector<double> segment_lengths;
    double unfolded_length = 0.0;
    Vec3 departure_dir = Vec3::Zero(); // first leg, leaving the tx
    Vec3 arrival_dir = Vec3::Zero();   // last leg, propagation direction at the rx
    double capture_distance = 0.0;     // raw reception-sphere distance (0 for deterministic paths)

    std::vector<std::pair<int, std::uint32_t>> signature() const;
};

struct TraceLimits
{
    int max_reflections = 3;
    int max_diffractions = 0;
    int max_scatterings = 0;
    int max_total_interactions = 10;

    void validate() const;
};

struct ReceptionCapture
{
    double distance = 0.0; // perpendicular distance from rx to the segment
    double foot = 0.0;     // segment parameter of the perpendicular foot
    double radius = 0.0;
};

// Reception-sphere test with r = alpha * L / sqrt(3), L being the unfolded
// length from the tx to the perpendicular foot. `unfolded_len_at_origin` is
// the unfolded length already travelled when the segment starts.
std::optional<ReceptionCapture> reception_test(const Vec3 &segment_origin, const Vec3 &segment_dir,
                                               double segment_len, const Vec3 &rx, double alpha,
                                               double unfolded_len_at_origin);

// Keeps one record per (tx, rx, signature): the smallest capture distance.
// Output is in canonical order.
std::vector<PathRecord> dedupe(std::vector<PathRecord> records);

// Canonical order: (tx, rx, unfolded_length, signature).
void canonical_sort(std::vector<PathRecord> &records);

struct DiffractionEdge
{
    Vec3 a = Vec3::Zero(), b = Vec3::Zero(); // b - a is along `direction`
    Vec3 direction = Vec3::Zero();
    Vec3 face_tangent = Vec3::Zero();
    Vec3 face_normal = Vec3::Zero();
    double interior_angle = 0.0;
    std::uint32_t triangles[2] = {0, 0};
    std::uint32_t material_id = 0;
};

// Edges shared by exactly two triangles whose interior wedge angle is below
// 179 degrees, in ascending (vertex id, vertex id) order.
std::vector<DiffractionEdge> find_diffraction_edges(const Scene &scene);

struct TraceOptions
{
    int workers = 1;             // 0 = hardware concurrency
    double length_cap_factor = 10.0; // bounce loop stops past this many scene diagonals
};

std::vector<PathRecord> trace(const Scene &scene, const AccelStructure &accel, const std::vector<Vec3> &tx_positions,
                              const std::vector<Vec3> &rx_positions, const RayFan &fan, const TraceLimits &limits,
                              const TraceOptions &options = {});

std::string path_to_json_line(const PathRecord &path);
void write_paths_jsonl(std::ostream &out, const std::vector<PathRecord> &paths);

} // namespace sbrt
