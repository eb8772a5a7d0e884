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

#include "sbrt/geometry.hpp"

#include <limits>

namespace sbrt
{

// Bounding-volume hierarchy over the scene triangles (binned SAH build).
//
// Nearest-hit queries return exactly what a linear scan over all triangles
// with intersect_triangle() would return, including the tie-break on equal
// t (lowest triangle index wins). The structure keeps its own copy of the
// triangles and does not reference the scene after construction.
class AccelStructure
{
  public:
    struct Node
    {
        Box3 box;
        std::uint32_t first = 0; // leaf: first primitive; inner: left child index
        std::uint32_t count = 0; // leaf: primitive count; 0 marks an inner node
        std::uint32_t right = 0; // inner only
    };

    AccelStructure() = default;
    explicit AccelStructure(const Scene &scene);

    std::optional<Hit> intersect(const Vec3 &origin, const Vec3 &direction, double t_min,
                                 double t_max = std::numeric_limits<double>::infinity()) const;

    // True when any triangle is hit with t in (t_min, t_max).
    bool any_hit(const Vec3 &origin, const Vec3 &direction, double t_min, double t_max) const;

    // Segment visibility with a guard distance excluded at both ends.
    bool occluded(const Vec3 &from, const Vec3 &to, double guard) const;

    bool empty() const { return nodes_.empty(); }
    const Box3 &root_bounds() const;
    const std::vector<Node> &nodes() const { return nodes_; }

  private:
    std::uint32_t build(std::uint32_t first, std::uint32_t count, std::vector<Vec3> &centroids);

    std::vector<Node> nodes_;
    std::vector<Triangle> prims_;          // BVH order
    std::vector<std::uint32_t> prim_ids_;  // BVH order -> scene triangle index
};

std::optional<Hit> intersect(const AccelStructure &accel, const Vec3 &origin, const Vec3 &direction, double t_min);

} // namespace sbrt
