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

#include "sbrt/launch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace sbrt
{

namespace
{

double angle_between(const Vec3 &a, const Vec3 &b)
{
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

struct Icosahedron
{
    std::array<Vec3, 12> vertices;
    std::vector<std::array<int, 3>> faces;         // 20, i < j < k
    std::vector<std::pair<int, int>> edges;        // 30, first < second
};

Icosahedron make_icosahedron()
{
    Icosahedron ico;
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    int n = 0;
    for (double s1 : {-1.0, 1.0})
        for (double s2 : {-phi, phi})
        {
            ico.vertices[n++] = Vec3(0.0, s1, s2);
            ico.vertices[n++] = Vec3(s1, s2, 0.0);
            ico.vertices[n++] = Vec3(s2, 0.0, s1);
        }
    // Neighbouring vertices are exactly 2 apart in these coordinates
    auto adjacent = [&](int a, int b) { return std::abs((ico.vertices[a] - ico.vertices[b]).norm() - 2.0) < 1e-9; };
    for (int i = 0; i < 12; ++i)
        for (int j = i + 1; j < 12; ++j)
        {
            if (!adjacent(i, j))
                continue;
            ico.edges.emplace_back(i, j);
            for (int k = j + 1; k < 12; ++k)
                if (adjacent(i, k) && adjacent(j, k))
                    ico.faces.push_back({i, j, k});
        }
    for (auto &v : ico.vertices)
        v.normalize();
    return ico;
}

} // namespace

RayFan geodesic_directions(int tessellation)
{
    if (tessellation < 1)
        throw ValidationError("tessellation must be >= 1");
    const int T = tessellation;
    const Icosahedron ico = make_icosahedron();

    RayFan fan;
    fan.tessellation = T;
    fan.directions.reserve(10 * static_cast<std::size_t>(T) * T + 2);

    auto point = [&](const std::array<int, 3> &corner, const std::array<int, 3> &weight) {
        Vec3 p = Vec3::Zero();
        for (int m = 0; m < 3; ++m)
            p += static_cast<double>(weight[m]) * ico.vertices[corner[m]];
        return Vec3(p.normalized());
    };

    for (const auto &v : ico.vertices)
        fan.directions.push_back(v);

    std::map<std::pair<int, int>, int> edge_index;
    for (std::size_t e = 0; e < ico.edges.size(); ++e)
    {
        const auto [a, b] = ico.edges[e];
        edge_index[{a, b}] = static_cast<int>(e);
        for (int k = 1; k < T; ++k)
            fan.directions.push_back(point({a, b, a}, {T - k, k, 0}));
    }

    // Global id of the face point with weights (T - i - j, i, j) on (a, b, c)
    std::map<std::tuple<int, int, int>, int> interior;
    const int edge_base = 12;
    for (std::size_t f = 0; f < ico.faces.size(); ++f)
    {
        const auto &c = ico.faces[f];
        for (int i = 1; i < T; ++i)
            for (int j = 1; i + j < T; ++j)
            {
                interior[{static_cast<int>(f), i, j}] = static_cast<int>(fan.directions.size());
                fan.directions.push_back(point(c, {T - i - j, i, j}));
            }
    }

    auto global_id = [&](int f, int i, int j) -> int {
        const auto &c = ico.faces[f];
        const std::array<int, 3> w{T - i - j, i, j};
        int nonzero = 0;
        for (int m = 0; m < 3; ++m)
            nonzero += w[m] > 0;
        if (nonzero == 1)
        {
            for (int m = 0; m < 3; ++m)
                if (w[m] > 0)
                    return c[m];
        }
        if (nonzero == 2)
        {
            int lo = -1, hi = -1, k = 0;
            for (int m = 0; m < 3; ++m)
            {
                if (w[m] == 0)
                    continue;
                if (lo < 0)
                    lo = m;
                else
                    hi = m;
            }
            // c is sorted, so c[lo] < c[hi]; the weight of the higher vertex is k
            k = w[hi];
            return edge_base + edge_index.at({c[lo], c[hi]}) * (T - 1) + (k - 1);
        }
        return interior.at({f, i, j});
    };

    std::vector<double> nearest(fan.directions.size(), std::numeric_limits<double>::infinity());
    auto visit_edge = [&](int p, int q) {
        const double a = angle_between(fan.directions[p], fan.directions[q]);
        nearest[p] = std::min(nearest[p], a);
        nearest[q] = std::min(nearest[q], a);
        fan.max_edge_angle = std::max(fan.max_edge_angle, a);
    };
    for (int f = 0; f < 20; ++f)
        for (int i = 0; i < T; ++i)
            for (int j = 0; i + j < T; ++j)
            {
                const int p0 = global_id(f, i, j);
                const int p1 = global_id(f, i + 1, j);
                const int p2 = global_id(f, i, j + 1);
                visit_edge(p0, p1);
                visit_edge(p1, p2);
                visit_edge(p2, p0);
            }
    fan.angular_separation_alpha = *std::max_element(nearest.begin(), nearest.end());
    return fan;
}

ArrayKind parse_array_kind(const std::string &name)
{
    if (name == "ULA" || name == "ula")
        return ArrayKind::ula;
    if (name == "UPA" || name == "upa")
        return ArrayKind::upa;
    if (name == "explicit")
        return ArrayKind::explicit_positions;
    throw ValidationError("kind: unknown array kind '" + name + "' (expected ULA, UPA or explicit)");
}

std::string to_string(ArrayKind kind)
{
    switch (kind)
    {
    case ArrayKind::ula:
        return "ULA";
    case ArrayKind::upa:
        return "UPA";
    case ArrayKind::explicit_positions:
        return "explicit";
    }
    return "?";
}

ArrayGeometry make_array(ArrayKind kind, std::array<int, 2> counts, double spacing, const Vec3 &center,
                         const std::array<Vec3, 2> &axes)
{
    if (kind == ArrayKind::explicit_positions)
        throw ValidationError("kind: use make_explicit_array for explicit element positions");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ValidationError("spacing_m must be > 0");
    if (counts[0] < 1 || counts[1] < 1)
        throw ValidationError("counts must be >= 1");
    if (kind == ArrayKind::ula && counts[1] != 1)
        throw ValidationError("counts: a ULA has a single row (n2 = 1)");
    if (!(axes[0].norm() > 0.0) || (kind == ArrayKind::upa && !(axes[1].norm() > 0.0)))
        throw ValidationError("axes must be nonzero");

    ArrayGeometry g;
    g.kind = kind;
    g.spacing = spacing;
    g.center = center;
    g.orientation = {axes[0].normalized(), axes[1].norm() > 0.0 ? Vec3(axes[1].normalized()) : Vec3::UnitY()};
    if (kind == ArrayKind::upa && g.orientation[0].cross(g.orientation[1]).norm() < 1e-9)
        throw ValidationError("axes: UPA axes must not be parallel");

    const int n1 = counts[0], n2 = counts[1];
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
        {
            const double a = (i - 0.5 * (n1 - 1)) * spacing;
            const double b = (j - 0.5 * (n2 - 1)) * spacing;
            g.element_positions.push_back(center + a * g.orientation[0] + b * g.orientation[1]);
        }
    g.element_count = g.element_positions.size();
    return g;
}

ArrayGeometry make_explicit_array(std::vector<Vec3> positions)
{
    if (positions.empty())
        throw ValidationError("positions must not be empty");
    ArrayGeometry g;
    g.kind = ArrayKind::explicit_positions;
    g.element_positions = std::move(positions);
    g.element_count = g.element_positions.size();
    Vec3 c = Vec3::Zero();
    for (const auto &p : g.element_positions)
        c += p;
    g.center = c / static_cast<double>(g.element_count);
    return g;
}

} // namespace sbrt
