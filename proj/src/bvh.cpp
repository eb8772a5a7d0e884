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

#include "sbrt/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace sbrt
{

namespace
{

constexpr std::uint32_t kLeafSize = 4;
constexpr int kBins = 12;

double surface_area(const Box3 &b)
{
    if (b.isEmpty())
        return 0.0;
    const Vec3 d = b.diagonal();
    return 2.0 * (d.x() * d.y() + d.y() * d.z() + d.z() * d.x());
}

// Slab test; boxes are padded at build time so the closed triangle test can
// never hit outside its node.
bool ray_box(const Box3 &box, const Vec3 &o, const Vec3 &d, const Vec3 &inv, double t_min, double t_max,
             double &t_enter)
{
    double lo = t_min, hi = t_max;
    for (int a = 0; a < 3; ++a)
    {
        if (d[a] == 0.0)
        {
            if (o[a] < box.min()[a] || o[a] > box.max()[a])
                return false;
            continue;
        }
        double t0 = (box.min()[a] - o[a]) * inv[a];
        double t1 = (box.max()[a] - o[a]) * inv[a];
        if (t0 > t1)
            std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
        if (lo > hi)
            return false;
    }
    t_enter = lo;
    return true;
}

bool closer(const Hit &a, const Hit &b)
{
    return a.t < b.t || (a.t == b.t && a.triangle_id < b.triangle_id);
}

} // namespace

AccelStructure::AccelStructure(const Scene &scene)
{
    const auto &tris = scene.triangles();
    if (tris.empty())
        return;
    prims_ = tris;
    prim_ids_.resize(tris.size());
    std::iota(prim_ids_.begin(), prim_ids_.end(), 0u);

    std::vector<Vec3> centroids(tris.size());
    for (std::size_t i = 0; i < tris.size(); ++i)
        centroids[i] = tris[i].centroid();

    nodes_.reserve(2 * tris.size());
    build(0, static_cast<std::uint32_t>(tris.size()), centroids);
}

std::uint32_t AccelStructure::build(std::uint32_t first, std::uint32_t count, std::vector<Vec3> &centroids)
{
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    Box3 box, cbox;
    box.setEmpty();
    cbox.setEmpty();
    for (std::uint32_t i = first; i < first + count; ++i)
    {
        for (const auto &v : prims_[i].vertices)
            box.extend(v);
        cbox.extend(centroids[i]);
    }
    const double pad = 1e-9 * (1.0 + box.diagonal().norm());
    box.min().array() -= pad;
    box.max().array() += pad;
    nodes_[index].box = box;

    auto make_leaf = [&] {
        nodes_[index].first = first;
        nodes_[index].count = count;
        return index;
    };
    if (count <= kLeafSize)
        return make_leaf();

    // Binned SAH over the centroid bounds
    int best_axis = -1;
    int best_split = 0;
    double best_cost = static_cast<double>(count) * surface_area(box);
    const Vec3 extent = cbox.diagonal();
    for (int axis = 0; axis < 3; ++axis)
    {
        if (!(extent[axis] > 0.0))
            continue;
        std::array<Box3, kBins> bins;
        std::array<std::uint32_t, kBins> counts{};
        for (auto &b : bins)
            b.setEmpty();
        const double scale = kBins / extent[axis];
        for (std::uint32_t i = first; i < first + count; ++i)
        {
            int b = static_cast<int>((centroids[i][axis] - cbox.min()[axis]) * scale);
            b = std::clamp(b, 0, kBins - 1);
            ++counts[b];
            for (const auto &v : prims_[i].vertices)
                bins[b].extend(v);
        }
        std::array<double, kBins> left_area{}, right_area{};
        std::array<std::uint32_t, kBins> left_count{}, right_count{};
        Box3 acc;
        acc.setEmpty();
        std::uint32_t n = 0;
        for (int b = 0; b < kBins; ++b)
        {
            acc.extend(bins[b]);
            n += counts[b];
            left_area[b] = surface_area(acc);
            left_count[b] = n;
        }
        acc.setEmpty();
        n = 0;
        for (int b = kBins - 1; b >= 0; --b)
        {
            acc.extend(bins[b]);
            n += counts[b];
            right_area[b] = surface_area(acc);
            right_count[b] = n;
        }
        for (int s = 0; s + 1 < kBins; ++s)
        {
            if (left_count[s] == 0 || right_count[s + 1] == 0)
                continue;
            const double cost = left_count[s] * left_area[s] + right_count[s + 1] * right_area[s + 1];
            if (cost < best_cost)
            {
                best_cost = cost;
                best_axis = axis;
                best_split = s;
            }
        }
    }

    std::uint32_t mid = first;
    if (best_axis >= 0)
    {
        const double scale = kBins / extent[best_axis];
        auto goes_left = [&](std::uint32_t i) {
            int b = static_cast<int>((centroids[i][best_axis] - cbox.min()[best_axis]) * scale);
            return std::clamp(b, 0, kBins - 1) <= best_split;
        };
        // Partition prims_, prim_ids_ and centroids together
        std::uint32_t lo = first, hi = first + count;
        while (lo < hi)
        {
            if (goes_left(lo))
                ++lo;
            else
            {
                --hi;
                std::swap(prims_[lo], prims_[hi]);
                std::swap(prim_ids_[lo], prim_ids_[hi]);
                std::swap(centroids[lo], centroids[hi]);
            }
        }
        mid = lo;
    }
    if (mid == first || mid == first + count)
    {
        if (count <= 4 * kLeafSize)
            return make_leaf();
        // SAH found nothing useful: median split on the widest centroid axis
        int axis = 0;
        extent.maxCoeff(&axis);
        std::vector<std::uint32_t> order(count);
        std::iota(order.begin(), order.end(), first);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return centroids[a][axis] < centroids[b][axis];
        });
        std::vector<Triangle> p;
        std::vector<std::uint32_t> ids;
        std::vector<Vec3> c;
        for (auto i : order)
        {
            p.push_back(prims_[i]);
            ids.push_back(prim_ids_[i]);
            c.push_back(centroids[i]);
        }
        std::copy(p.begin(), p.end(), prims_.begin() + first);
        std::copy(ids.begin(), ids.end(), prim_ids_.begin() + first);
        std::copy(c.begin(), c.end(), centroids.begin() + first);
        mid = first + count / 2;
    }

    const std::uint32_t left = build(first, mid - first, centroids);
    const std::uint32_t right = build(mid, first + count - mid, centroids);
    nodes_[index].first = left;
    nodes_[index].right = right;
    nodes_[index].count = 0;
    return index;
}

const Box3 &AccelStructure::root_bounds() const
{
    static const Box3 empty_box = [] {
        Box3 b;
        b.setEmpty();
        return b;
    }();
    return nodes_.empty() ? empty_box : nodes_.front().box;
}

std::optional<Hit> AccelStructure::intersect(const Vec3 &origin, const Vec3 &direction, double t_min,
                                             double t_max) const
{
    if (nodes_.empty())
        return std::nullopt;
    const Vec3 inv = direction.cwiseInverse();
    std::optional<Hit> best;
    double best_t = t_max;

    std::vector<std::uint32_t> stack(64);
    std::size_t top = 0;
    auto push = [&](std::uint32_t n) {
        if (top == stack.size())
            stack.resize(2 * top);
        stack[top++] = n;
    };
    push(0);
    while (top > 0)
    {
        const Node &node = nodes_[stack[--top]];
        double t_enter = 0.0;
        if (!ray_box(node.box, origin, direction, inv, t_min, best_t, t_enter))
            continue;
        if (node.count > 0)
        {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i)
            {
                auto hit = intersect_triangle(prims_[i], prim_ids_[i], origin, direction, t_min);
                if (!hit || hit->t > t_max)
                    continue;
                if (!best || closer(*hit, *best))
                {
                    best = hit;
                    best_t = hit->t;
                }
            }
            continue;
        }
        // Visit the nearer child first
        const Node &l = nodes_[node.first];
        const Node &r = nodes_[node.right];
        double tl = 0.0, tr = 0.0;
        const bool hl = ray_box(l.box, origin, direction, inv, t_min, best_t, tl);
        const bool hr = ray_box(r.box, origin, direction, inv, t_min, best_t, tr);
        if (hl && hr)
        {
            if (tl <= tr)
            {
                push(node.right);
                push(node.first);
            }
            else
            {
                push(node.first);
                push(node.right);
            }
        }
        else if (hl)
            push(node.first);
        else if (hr)
            push(node.right);
    }
    return best;
}

bool AccelStructure::any_hit(const Vec3 &origin, const Vec3 &direction, double t_min, double t_max) const
{
    if (nodes_.empty() || !(t_max > t_min))
        return false;
    const Vec3 inv = direction.cwiseInverse();
    std::vector<std::uint32_t> stack(64);
    std::size_t top = 0;
    auto push = [&](std::uint32_t n) {
        if (top == stack.size())
            stack.resize(2 * top);
        stack[top++] = n;
    };
    push(0);
    while (top > 0)
    {
        const Node &node = nodes_[stack[--top]];
        double t_enter = 0.0;
        if (!ray_box(node.box, origin, direction, inv, t_min, t_max, t_enter))
            continue;
        if (node.count > 0)
        {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i)
            {
                auto hit = intersect_triangle(prims_[i], prim_ids_[i], origin, direction, t_min);
                if (hit && hit->t < t_max)
                    return true;
            }
            continue;
        }
        push(node.first);
        push(node.right);
    }
    return false;
}

bool AccelStructure::occluded(const Vec3 &from, const Vec3 &to, double guard) const
{
    const Vec3 d = to - from;
    const double len = d.norm();
    if (len <= 2.0 * guard)
        return false;
    return any_hit(from, d / len, guard, len - guard);
}

std::optional<Hit> intersect(const AccelStructure &accel, const Vec3 &origin, const Vec3 &direction, double t_min)
{
    return accel.intersect(origin, direction, t_min);
}

} // namespace sbrt
