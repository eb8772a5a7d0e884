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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sbrt
{

// Electromagnetic surface description.
//
// Complex permittivity convention: eps_r = eps' - j*eps'' with an exp(+j*w*t)
// time dependence, so a lossy material has rel_permittivity_imag > 0.
// A nonzero conductivity (S/m) adds sigma / (w * eps0) to eps'' at the
// simulation frequency.
struct Material
{
    std::string name;
    double rel_permittivity_real = 1.0;
    double rel_permittivity_imag = 0.0;
    double roughness_sigma = 0.0;  // RMS surface height, meters
    double scattering_coeff = 0.0; // effective-roughness S in [0, 1]
    int scattering_lobe_width = 1; // effective-roughness lobe exponent alpha_R
    double conductivity = 0.0;     // S/m

    std::complex<double> permittivity(double frequency_ghz) const;

    // Throws ValidationError naming the offending field.
    void validate() const;
};

struct Triangle
{
    std::array<std::uint32_t, 3> vertex_ids{};
    std::array<Vec3, 3> vertices;
    Vec3 normal = Vec3::Zero(); // unit, from the vertex winding
    std::uint32_t material_id = 0;
    std::uint32_t surface_id = 0;
    double area = 0.0;

    Vec3 centroid() const { return (vertices[0] + vertices[1] + vertices[2]) / 3.0; }
};

// A planar patch made of one or more coplanar triangles sharing a material.
// Specular path signatures are expressed in surfaces, not triangles, so a wall
// split into two triangles is still a single reflector.
struct Surface
{
    std::uint32_t material_id = 0;
    std::vector<std::uint32_t> triangles;
    Vec3 normal = Vec3::Zero();
    double offset = 0.0; // plane: normal . x = offset
};

// Polygon input record, fan-triangulated on construction.
struct PolygonInput
{
    std::vector<Vec3> vertices;
    std::string material;
    // Optional explicit triangulation (local vertex indices). Empty = fan.
    std::vector<std::array<std::uint32_t, 3>> triangles;
};

struct Hit
{
    double t = 0.0;
    Vec3 point = Vec3::Zero();
    std::uint32_t triangle_id = 0;
    double u = 0.0, v = 0.0; // barycentric, u, v >= 0, u + v <= 1
    bool front_facing = false;
};

// Immutable after construction; safe to share between threads.
class Scene
{
  public:
    Scene() = default;

    // Builds a scene from polygons. Vertices closer than weld_tolerance are
    // merged (first occurrence wins). Throws ValidationError on unknown
    // materials or degenerate triangles.
    static Scene from_polygons(std::vector<Material> materials, const std::vector<PolygonInput> &polygons,
                               double weld_tolerance = 1e-6);

    // Builds a scene from a triangle soup. Coplanar edge-connected triangles
    // with equal material are grouped into one surface.
    static Scene from_triangles(std::vector<Material> materials, const std::vector<std::array<Vec3, 3>> &triangles,
                                const std::vector<std::uint32_t> &material_ids, double weld_tolerance = 1e-6);

    const std::vector<Triangle> &triangles() const { return triangles_; }
    const std::vector<Material> &materials() const { return materials_; }
    const std::vector<Surface> &surfaces() const { return surfaces_; }
    const std::vector<Vec3> &vertices() const { return vertices_; }
    const Box3 &bounds() const { return bounds_; }

    bool empty() const { return triangles_.empty(); }
    double diagonal() const;
    std::optional<std::uint32_t> material_index(const std::string &name) const;

  private:
    void finalize(double weld_tolerance, const std::vector<std::array<Vec3, 3>> &raw,
                  const std::vector<std::uint32_t> &material_ids, const std::vector<std::uint32_t> &surface_ids);

    std::vector<Material> materials_;
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Surface> surfaces_;
    Box3 bounds_;
};

enum class SceneFormat
{
    json,
    stl
};

SceneFormat parse_scene_format(const std::string &name);

// Loads a scene. STL input needs a sidecar material map: a JSON object with a
// "materials" array and keys "all", "<first>-<last>" or "<index>" mapping
// (zero-based, inclusive) triangle ranges to material names.
Scene load_scene(const std::filesystem::path &path, SceneFormat format,
                 const std::optional<std::filesystem::path> &material_map = std::nullopt);

Scene parse_scene_json(const std::string &text, const std::string &origin = "<string>");
Scene parse_stl(const std::string &bytes, const std::string &material_map_json, const std::string &origin = "<string>");

// Writes the JSON scene schema; vertex coordinates round-trip bit-exactly.
std::string scene_to_json(const Scene &scene);
void save_scene_json(const Scene &scene, const std::filesystem::path &path);

// Moeller-Trumbore test against a single triangle, double precision.
// Rays with |direction . normal| < 1e-12 are treated as misses. Edges are
// closed with a 1e-10 barycentric tolerance so shared edges cannot leak.
std::optional<Hit> intersect_triangle(const Triangle &tri, std::uint32_t triangle_id, const Vec3 &origin,
                                      const Vec3 &direction, double t_min);

// Self-intersection guard used when re-launching from a surface.
double self_intersection_guard(const Scene &scene);

} // namespace sbrt
