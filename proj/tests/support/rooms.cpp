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

#include "support/rooms.hpp"

#include <cmath>

namespace rooms
{

sbrt::Material concrete()
{
    sbrt::Material m;
    m.name = "concrete";
    m.rel_permittivity_real = 5.31;
    m.rel_permittivity_imag = 0.5;
    return m;
}

sbrt::Material metal()
{
    sbrt::Material m;
    m.name = "metal";
    m.rel_permittivity_real = 1.0;
    m.rel_permittivity_imag = 1e7;
    return m;
}

RoomSpec box_room(double lx, double ly, double lz, const sbrt::Material &wall)
{
    RoomSpec r;
    r.materials.push_back(wall);
    const std::string m = wall.name;
    const Vec3 X(lx, 0, 0), Y(0, ly, 0), Z(0, 0, lz), O = Vec3::Zero();
    // u x v points into the room
    r.rects.push_back({O, Y, Z, m});     // x = 0
    r.rects.push_back({X, Z, Y, m});     // x = lx
    r.rects.push_back({O, Z, X, m});     // y = 0
    r.rects.push_back({Y, X, Z, m});     // y = ly
    r.rects.push_back({O, X, Y, m});     // floor
    r.rects.push_back({Z, Y, X, m});     // ceiling
    return r;
}

void add_box(RoomSpec &room, const Vec3 &lo, const Vec3 &hi, const std::string &material)
{
    const Vec3 d = hi - lo;
    const Vec3 X(d.x(), 0, 0), Y(0, d.y(), 0), Z(0, 0, d.z());
    room.rects.push_back({lo, Z, Y, material});
    room.rects.push_back({lo + X, Y, Z, material});
    room.rects.push_back({lo, X, Z, material});
    room.rects.push_back({lo + Y, Z, X, material});
    room.rects.push_back({lo, Y, X, material});
    room.rects.push_back({lo + Z, X, Y, material});
}

sbrt::Scene build(const RoomSpec &room)
{
    std::vector<sbrt::PolygonInput> polys;
    for (const auto &r : room.rects)
    {
        sbrt::PolygonInput p;
        p.vertices = {r.corner, r.corner + r.u, r.corner + r.u + r.v, r.corner + r.v};
        p.material = r.material;
        polys.push_back(p);
    }
    return sbrt::Scene::from_polygons(room.materials, polys);
}

namespace
{

Vec3 normal_of(const Rect &r)
{
    return r.u.cross(r.v).normalized();
}

Vec3 mirror(const Vec3 &p, const Rect &r)
{
    const Vec3 n = normal_of(r);
    return p - 2.0 * n.dot(p - r.corner) * n;
}

// Segment parameter where a->b meets the rect plane, with the in-rect test.
bool crosses(const Vec3 &a, const Vec3 &b, const Rect &r, double margin, double &t_out, Vec3 &p_out)
{
    const Vec3 n = normal_of(r);
    const double da = n.dot(a - r.corner);
    const double db = n.dot(b - r.corner);
    if (da == db)
        return false;
    const double t = da / (da - db);
    const Vec3 p = a + t * (b - a);
    const Vec3 q = p - r.corner;
    const double s = q.dot(r.u) / r.u.squaredNorm();
    const double w = q.dot(r.v) / r.v.squaredNorm();
    if (s < margin || s > 1.0 - margin || w < margin || w > 1.0 - margin)
        return false;
    t_out = t;
    p_out = p;
    return true;
}

bool visible(const RoomSpec &room, const Vec3 &a, const Vec3 &b)
{
    const double len = (b - a).norm();
    const double eps = 1e-7 / std::max(len, 1e-12);
    for (const auto &r : room.rects)
    {
        double t;
        Vec3 p;
        if (crosses(a, b, r, -1e-9, t, p) && t > eps && t < 1.0 - eps)
            return false;
    }
    return true;
}

void recurse(const RoomSpec &room, const Vec3 &tx, const Vec3 &rx, int max_order, std::vector<std::uint32_t> &seq,
             std::vector<Vec3> &images, std::vector<ImagePath> &out)
{
    if (!seq.empty())
    {
        // Back-trace from rx through the images
        std::vector<Vec3> pts(seq.size());
        Vec3 target = rx;
        bool ok = true;
        for (std::size_t k = seq.size(); k-- > 0 && ok;)
        {
            double t;
            Vec3 p;
            ok = crosses(images[k], target, room.rects[seq[k]], 1e-9, t, p) && t > 0.0 && t < 1.0;
            if (ok)
            {
                pts[k] = p;
                target = p;
            }
        }
        if (ok)
        {
            std::vector<Vec3> chain;
            chain.push_back(tx);
            for (const auto &p : pts)
                chain.push_back(p);
            chain.push_back(rx);
            for (std::size_t k = 0; k + 1 < chain.size() && ok; ++k)
                ok = visible(room, chain[k], chain[k + 1]);
            // Both legs on the same (reflecting) side of each plane
            for (std::size_t k = 0; k < seq.size() && ok; ++k)
            {
                const Vec3 n = normal_of(room.rects[seq[k]]);
                const double s0 = n.dot(chain[k] - pts[k]);
                const double s1 = n.dot(chain[k + 2] - pts[k]);
                ok = s0 * s1 > 0.0;
            }
            if (ok)
            {
                ImagePath ip;
                ip.surfaces = seq;
                ip.points = pts;
                for (std::size_t k = 0; k + 1 < chain.size(); ++k)
                    ip.length += (chain[k + 1] - chain[k]).norm();
                out.push_back(ip);
            }
        }
    }
    if (static_cast<int>(seq.size()) == max_order)
        return;
    const Vec3 src = images.empty() ? tx : images.back();
    for (std::uint32_t s = 0; s < room.rects.size(); ++s)
    {
        if (!seq.empty() && seq.back() == s)
            continue;
        seq.push_back(s);
        images.push_back(mirror(src, room.rects[s]));
        recurse(room, tx, rx, max_order, seq, images, out);
        seq.pop_back();
        images.pop_back();
    }
}

} // namespace

std::vector<ImagePath> image_method(const RoomSpec &room, const Vec3 &tx, const Vec3 &rx, int max_order)
{
    std::vector<ImagePath> out;
    if (visible(room, tx, rx))
        out.push_back({{}, {}, (rx - tx).norm()});
    std::vector<std::uint32_t> seq;
    std::vector<Vec3> images;
    recurse(room, tx, rx, max_order, seq, images, out);
    return out;
}

} // namespace rooms
