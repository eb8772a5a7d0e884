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

#include "sbrt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace sbrt
{

std::complex<double> Material::permittivity(double frequency_ghz) const
{
    double loss = rel_permittivity_imag;
    if (conductivity > 0.0)
        loss += conductivity / (2.0 * kPi * frequency_ghz * 1e9 * kVacuumPermittivity);
    return {rel_permittivity_real, -loss};
}

void Material::validate() const
{
    const std::string where = "material '" + name + "': ";
    if (name.empty())
        throw ValidationError("material: name must not be empty");
    if (!(rel_permittivity_real >= 1.0))
        throw ValidationError(where + "rel_permittivity_real must be >= 1");
    if (!(rel_permittivity_imag >= 0.0))
        throw ValidationError(where + "rel_permittivity_imag must be >= 0");
    if (!(roughness_sigma >= 0.0))
        throw ValidationError(where + "roughness_sigma must be >= 0");
    if (!(scattering_coeff >= 0.0 && scattering_coeff <= 1.0))
        throw ValidationError(where + "scattering_coeff must lie in [0, 1]");
    if (scattering_lobe_width < 1)
        throw ValidationError(where + "scattering_lobe_width must be >= 1");
    if (!(conductivity >= 0.0))
        throw ValidationError(where + "conductivity must be >= 0");
}

namespace
{

// Merges points closer than `tol` onto the first point seen.
class VertexWelder
{
  public:
    VertexWelder(double tol, std::vector<Vec3> &out) : tol_(tol), out_(out) {}

    std::uint32_t add(const Vec3 &p)
    {
        const Cell c = cell_of(p);
        std::uint32_t best = UINT32_MAX;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz)
                {
                    auto it = cells_.find({c[0] + dx, c[1] + dy, c[2] + dz});
                    if (it == cells_.end())
                        continue;
                    for (std::uint32_t id : it->second)
                        if (id < best && (out_[id] - p).norm() <= tol_)
                            best = id;
                }
        if (best != UINT32_MAX)
            return best;
        const auto id = static_cast<std::uint32_t>(out_.size());
        out_.push_back(p);
        cells_[c].push_back(id);
        return id;
    }

  private:
    using Cell = std::array<std::int64_t, 3>;
    struct CellHash
    {
        std::size_t operator()(const Cell &c) const noexcept
        {
            std::size_t h = 1469598103934665603ull;
            for (auto v : c)
                h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
            return h;
        }
    };

    Cell cell_of(const Vec3 &p) const
    {
        return {static_cast<std::int64_t>(std::floor(p.x() / tol_)), static_cast<std::int64_t>(std::floor(p.y() / tol_)),
                static_cast<std::int64_t>(std::floor(p.z() / tol_))};
    }

    double tol_;
    std::vector<Vec3> &out_;
    std::unordered_map<Cell, std::vector<std::uint32_t>, CellHash> cells_;
};

struct DisjointSets
{
    std::vector<std::uint32_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t x)
    {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

} // namespace

Scene Scene::from_polygons(std::vector<Material> materials, const std::vector<PolygonInput> &polygons,
                           double weld_tolerance)
{
    Scene scene;
    scene.materials_ = std::move(materials);
    for (const auto &m : scene.materials_)
        m.validate();

    std::vector<std::array<Vec3, 3>> raw;
    std::vector<std::uint32_t> material_ids, surface_ids;
    for (std::size_t s = 0; s < polygons.size(); ++s)
    {
        const auto &poly = polygons[s];
        const auto mat = scene.material_index(poly.material);
        if (!mat)
            throw ValidationError("surface " + std::to_string(s) + ": unknown material '" + poly.material + "'");
        if (poly.vertices.size() < 3)
            throw ValidationError("surface " + std::to_string(s) + ": needs at least 3 vertices");

        std::vector<std::array<std::uint32_t, 3>> local = poly.triangles;
        if (local.empty())
            for (std::uint32_t k = 1; k + 1 < poly.vertices.size(); ++k)
                local.push_back({0, k, k + 1});

        for (const auto &t : local)
        {
            for (auto idx : t)
                if (idx >= poly.vertices.size())
                    throw ValidationError("surface " + std::to_string(s) + ": triangle index " + std::to_string(idx) +
                                          " out of range");
            raw.push_back({poly.vertices[t[0]], poly.vertices[t[1]], poly.vertices[t[2]]});
            material_ids.push_back(*mat);
            surface_ids.push_back(static_cast<std::uint32_t>(s));
        }
    }
    scene.finalize(weld_tolerance, raw, material_ids, surface_ids);
    return scene;
}

Scene Scene::from_triangles(std::vector<Material> materials, const std::vector<std::array<Vec3, 3>> &triangles,
                            const std::vector<std::uint32_t> &material_ids, double weld_tolerance)
{
    Scene scene;
    scene.materials_ = std::move(materials);
    for (const auto &m : scene.materials_)
        m.validate();
    if (material_ids.size() != triangles.size())
        throw ValidationError("material id count does not match triangle count");
    for (std::size_t i = 0; i < material_ids.size(); ++i)
        if (material_ids[i] >= scene.materials_.size())
            throw ValidationError("triangle " + std::to_string(i) + ": material id out of range");
    scene.finalize(weld_tolerance, triangles, material_ids, {});
    return scene;
}

void Scene::finalize(double weld_tolerance, const std::vector<std::array<Vec3, 3>> &raw,
                     const std::vector<std::uint32_t> &material_ids, const std::vector<std::uint32_t> &surface_ids)
{
    VertexWelder welder(weld_tolerance, vertices_);
    triangles_.resize(raw.size());

    std::vector<std::size_t> degenerate;
    for (std::size_t i = 0; i < raw.size(); ++i)
    {
        Triangle &tri = triangles_[i];
        for (int k = 0; k < 3; ++k)
            tri.vertex_ids[k] = welder.add(raw[i][k]);
        for (int k = 0; k < 3; ++k)
            tri.vertices[k] = vertices_[tri.vertex_ids[k]];
        tri.material_id = material_ids[i];

        const Vec3 e1 = tri.vertices[1] - tri.vertices[0];
        const Vec3 e2 = tri.vertices[2] - tri.vertices[0];
        const Vec3 c = e1.cross(e2);
        const double cn = c.norm();
        const bool collapsed = tri.vertex_ids[0] == tri.vertex_ids[1] || tri.vertex_ids[1] == tri.vertex_ids[2] ||
                               tri.vertex_ids[0] == tri.vertex_ids[2];
        if (collapsed || !(cn > 1e-12 * e1.norm() * e2.norm()))
        {
            degenerate.push_back(i);
            continue;
        }
        tri.normal = c / cn;
        tri.area = 0.5 * cn;
    }
    if (!degenerate.empty())
    {
        std::ostringstream msg;
        msg << "degenerate triangle(s):";
        for (std::size_t k = 0; k < degenerate.size() && k < 20; ++k)
            msg << ' ' << degenerate[k];
        if (degenerate.size() > 20)
            msg << " ... (" << degenerate.size() << " total)";
        throw ValidationError(msg.str());
    }

    // Surface grouping
    std::vector<std::uint32_t> group(triangles_.size());
    if (!surface_ids.empty())
    {
        group = surface_ids;
    }
    else
    {
        DisjointSets sets(triangles_.size());
        std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> edges;
        for (std::uint32_t i = 0; i < triangles_.size(); ++i)
            for (int k = 0; k < 3; ++k)
                edges[edge_key(triangles_[i].vertex_ids[k], triangles_[i].vertex_ids[(k + 1) % 3])].push_back(i);

        for (auto &[key, tris] : edges)
            for (std::size_t a = 0; a < tris.size(); ++a)
                for (std::size_t b = a + 1; b < tris.size(); ++b)
                {
                    const Triangle &ta = triangles_[tris[a]];
                    const Triangle &tb = triangles_[tris[b]];
                    if (ta.material_id != tb.material_id)
                        continue;
                    if (std::abs(ta.normal.dot(tb.normal)) < 1.0 - 1e-9)
                        continue;
                    const double scale = std::sqrt(std::max(ta.area, tb.area));
                    bool coplanar = true;
                    for (const auto &v : tb.vertices)
                        coplanar = coplanar && std::abs(ta.normal.dot(v - ta.vertices[0])) <= 1e-9 * scale;
                    if (coplanar)
                        sets.unite(tris[a], tris[b]);
                }
        for (std::uint32_t i = 0; i < triangles_.size(); ++i)
            group[i] = sets.find(i);
    }

    // Renumber groups densely, in order of first appearance.
    std::map<std::uint32_t, std::uint32_t> dense;
    for (std::uint32_t i = 0; i < triangles_.size(); ++i)
    {
        auto [it, inserted] = dense.try_emplace(group[i], static_cast<std::uint32_t>(dense.size()));
        (void)inserted;
        triangles_[i].surface_id = it->second;
    }
    surfaces_.assign(dense.size(), Surface{});
    for (std::uint32_t i = 0; i < triangles_.size(); ++i)
    {
        Surface &s = surfaces_[triangles_[i].surface_id];
        if (s.triangles.empty())
        {
            s.material_id = triangles_[i].material_id;
            s.normal = triangles_[i].normal;
            s.offset = s.normal.dot(triangles_[i].vertices[0]);
        }
        s.triangles.push_back(i);
    }

    bounds_.setEmpty();
    for (const auto &v : vertices_)
        bounds_.extend(v);
}

double Scene::diagonal() const
{
    return bounds_.isEmpty() ? 0.0 : bounds_.diagonal().norm();
}

std::optional<std::uint32_t> Scene::material_index(const std::string &name) const
{
    for (std::size_t i = 0; i < materials_.size(); ++i)
        if (materials_[i].name == name)
            return static_cast<std::uint32_t>(i);
    return std::nullopt;
}

SceneFormat parse_scene_format(const std::string &name)
{
    if (name == "json")
        return SceneFormat::json;
    if (name == "stl")
        return SceneFormat::stl;
    throw ValidationError("scene format must be 'json' or 'stl', got '" + name + "'");
}

std::optional<Hit> intersect_triangle(const Triangle &tri, std::uint32_t triangle_id, const Vec3 &origin,
                                      const Vec3 &direction, double t_min)
{
    constexpr double kEdgeTol = 1e-10;
    const double dn = direction.dot(tri.normal);
    if (std::abs(dn) < 1e-12)
        return std::nullopt;

    const Vec3 e1 = tri.vertices[1] - tri.vertices[0];
    const Vec3 e2 = tri.vertices[2] - tri.vertices[0];
    const Vec3 p = direction.cross(e2);
    const double det = e1.dot(p);
    if (det == 0.0)
        return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = origin - tri.vertices[0];
    const double u = s.dot(p) * inv;
    if (u < -kEdgeTol || u > 1.0 + kEdgeTol)
        return std::nullopt;
    const Vec3 q = s.cross(e1);
    const double v = direction.dot(q) * inv;
    if (v < -kEdgeTol || u + v > 1.0 + kEdgeTol)
        return std::nullopt;
    const double t = e2.dot(q) * inv;
    if (!(t > t_min))
        return std::nullopt;

    Hit hit;
    hit.t = t;
    hit.point = origin + t * direction;
    hit.triangle_id = triangle_id;
    hit.u = std::clamp(u, 0.0, 1.0);
    hit.v = std::clamp(v, 0.0, 1.0 - hit.u);
    hit.front_facing = dn < 0.0;
    return hit;
}

double self_intersection_guard(const Scene &scene)
{
    const double d = scene.diagonal();
    return d > 0.0 ? 1e-6 * d : 1e-9;
}

} // namespace sbrt
