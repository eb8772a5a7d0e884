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

#include "sbrt/tracer.hpp"
#include "sbrt/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

namespace sbrt
{

std::string to_string(InteractionKind kind)
{
    switch (kind)
    {
    case InteractionKind::reflection:
        return "reflection";
    case InteractionKind::diffraction:
        return "diffraction";
    case InteractionKind::scattering:
        return "scattering";
    }
    return "?";
}

std::vector<std::pair<int, std::uint32_t>> PathRecord::signature() const
{
    std::vector<std::pair<int, std::uint32_t>> sig;
    sig.reserve(interactions.size());
    for (const auto &it : interactions)
        sig.emplace_back(static_cast<int>(it.kind), it.feature_id);
    return sig;
}

void TraceLimits::validate() const
{
    if (max_reflections < 0)
        throw ValidationError("limits.max_reflections must be >= 0");
    if (max_diffractions < 0)
        throw ValidationError("limits.max_diffractions must be >= 0");
    if (max_scatterings < 0)
        throw ValidationError("limits.max_scatterings must be >= 0");
    if (max_total_interactions < 0)
        throw ValidationError("limits.max_total_interactions must be >= 0");
}

std::optional<ReceptionCapture> reception_test(const Vec3 &segment_origin, const Vec3 &segment_dir,
                                               double segment_len, const Vec3 &rx, double alpha,
                                               double unfolded_len_at_origin)
{
    const Vec3 w = rx - segment_origin;
    const double foot = w.dot(segment_dir);
    if (foot < 0.0 || foot > segment_len)
        return std::nullopt;
    const double dist = (w - foot * segment_dir).norm();
    const double radius = alpha * (unfolded_len_at_origin + foot) / std::sqrt(3.0);
    if (dist > radius)
        return std::nullopt;
    return ReceptionCapture{dist, foot, radius};
}

namespace
{

bool canonical_less(const PathRecord &a, const PathRecord &b)
{
    if (a.tx_index != b.tx_index)
        return a.tx_index < b.tx_index;
    if (a.rx_index != b.rx_index)
        return a.rx_index < b.rx_index;
    if (a.unfolded_length != b.unfolded_length)
        return a.unfolded_length < b.unfolded_length;
    return a.signature() < b.signature();
}

} // namespace

void canonical_sort(std::vector<PathRecord> &records)
{
    std::stable_sort(records.begin(), records.end(), canonical_less);
}

std::vector<PathRecord> dedupe(std::vector<PathRecord> records)
{
    using Key = std::tuple<std::uint32_t, std::uint32_t, std::vector<std::pair<int, std::uint32_t>>>;
    std::map<Key, std::size_t> best;
    for (std::size_t i = 0; i < records.size(); ++i)
    {
        Key key{records[i].tx_index, records[i].rx_index, records[i].signature()};
        auto [it, inserted] = best.emplace(std::move(key), i);
        if (!inserted && records[i].capture_distance < records[it->second].capture_distance)
            it->second = i;
    }
    std::vector<PathRecord> out;
    out.reserve(best.size());
    for (const auto &[key, idx] : best)
        out.push_back(std::move(records[idx]));
    canonical_sort(out);
    return out;
}

std::vector<DiffractionEdge> find_diffraction_edges(const Scene &scene)
{
    const auto &tris = scene.triangles();
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> shared;
    for (std::uint32_t t = 0; t < tris.size(); ++t)
        for (int k = 0; k < 3; ++k)
        {
            std::uint32_t u = tris[t].vertex_ids[k], v = tris[t].vertex_ids[(k + 1) % 3];
            if (u > v)
                std::swap(u, v);
            shared[{u, v}].push_back(t);
        }

    const double max_interior = 179.0 * kPi / 180.0;
    std::vector<DiffractionEdge> edges;
    for (const auto &[key, owners] : shared)
    {
        if (owners.size() != 2)
            continue;
        const Vec3 &p = scene.vertices()[key.first];
        const Vec3 &q = scene.vertices()[key.second];
        const Vec3 e = (q - p).normalized();

        auto tangent = [&](std::uint32_t t) {
            Vec3 c = Vec3::Zero();
            for (int k = 0; k < 3; ++k)
                if (tris[t].vertex_ids[k] != key.first && tris[t].vertex_ids[k] != key.second)
                    c = tris[t].vertices[k];
            Vec3 w = c - p;
            w -= w.dot(e) * e;
            return Vec3(w.normalized());
        };
        const Vec3 t0 = tangent(owners[0]);
        const Vec3 t1 = tangent(owners[1]);
        const double interior = std::atan2(t0.cross(t1).norm(), t0.dot(t1));
        if (!(interior < max_interior) || !(interior > 0.0))
            continue;

        Vec3 n0 = tris[owners[0]].normal;
        if (n0.dot(t1) > 0.0)
            n0 = -n0;

        DiffractionEdge edge;
        edge.direction = t0.cross(n0).normalized();
        if ((q - p).dot(edge.direction) > 0.0)
        {
            edge.a = p;
            edge.b = q;
        }
        else
        {
            edge.a = q;
            edge.b = p;
        }
        edge.face_tangent = t0;
        edge.face_normal = n0;
        edge.interior_angle = interior;
        edge.triangles[0] = owners[0];
        edge.triangles[1] = owners[1];
        edge.material_id = tris[owners[0]].material_id;
        edges.push_back(edge);
    }
    return edges;
}

namespace
{

using Signature = std::vector<std::uint32_t>; // surface ids, reflection-only

struct RawCapture
{
    std::uint32_t rx = 0;
    Signature surfaces;
    double distance = 0.0;
};

struct CaptureKey
{
    std::uint32_t tx;
    std::uint32_t rx;
    Signature surfaces;

    bool operator<(const CaptureKey &o) const
    {
        return std::tie(tx, rx, surfaces) < std::tie(o.tx, o.rx, o.surfaces);
    }
};

Vec3 reflect(const Vec3 &d, const Vec3 &n)
{
    return d - 2.0 * d.dot(n) * n;
}

bool point_in_triangle(const Triangle &tri, const Vec3 &p, double tol)
{
    const Vec3 e1 = tri.vertices[1] - tri.vertices[0];
    const Vec3 e2 = tri.vertices[2] - tri.vertices[0];
    const Vec3 w = p - tri.vertices[0];
    const double d11 = e1.dot(e1), d12 = e1.dot(e2), d22 = e2.dot(e2);
    const double w1 = w.dot(e1), w2 = w.dot(e2);
    const double det = d11 * d22 - d12 * d12;
    if (!(det > 0.0))
        return false;
    const double u = (d22 * w1 - d12 * w2) / det;
    const double v = (d11 * w2 - d12 * w1) / det;
    return u >= -tol && v >= -tol && u + v <= 1.0 + tol;
}

// Image-method refinement of a captured reflection chain. Returns nothing
// when the chain has no valid specular realisation.
std::optional<PathRecord> correct_specular(const Scene &scene, const AccelStructure &accel, std::uint32_t tx_index,
                                           const Vec3 &tx, std::uint32_t rx_index, const Vec3 &rx,
                                           const Signature &surfaces, double guard)
{
    const auto &surf = scene.surfaces();
    const std::size_t k = surfaces.size();
    std::vector<Vec3> images(k + 1);
    images[0] = tx;
    for (std::size_t j = 0; j < k; ++j)
    {
        const Surface &s = surf[surfaces[j]];
        const double h = s.normal.dot(images[j]) - s.offset;
        images[j + 1] = images[j] - 2.0 * h * s.normal;
    }

    std::vector<Vec3> points(k);
    std::vector<std::uint32_t> hit_tri(k);
    Vec3 target = rx;
    for (std::size_t jj = k; jj-- > 0;)
    {
        const Surface &s = surf[surfaces[jj]];
        const Vec3 d = images[jj + 1] - target;
        const double denom = s.normal.dot(d);
        if (std::abs(denom) < 1e-15)
            return std::nullopt;
        const double t = (s.offset - s.normal.dot(target)) / denom;
        if (!(t > 0.0 && t < 1.0))
            return std::nullopt;
        const Vec3 p = target + t * d;
        bool inside = false;
        for (std::uint32_t tri : s.triangles)
            if (point_in_triangle(scene.triangles()[tri], p, 1e-9))
            {
                inside = true;
                hit_tri[jj] = tri;
                break;
            }
        if (!inside)
            return std::nullopt;
        points[jj] = p;
        target = p;
    }

    PathRecord rec;
    rec.tx_index = tx_index;
    rec.rx_index = rx_index;
    Vec3 prev = tx;
    for (std::size_t j = 0; j <= k; ++j)
    {
        const Vec3 next = j < k ? points[j] : rx;
        const double len = (next - prev).norm();
        if (!(len > 0.0))
            return std::nullopt;
        if (accel.occluded(prev, next, guard))
            return std::nullopt;
        rec.segment_lengths.push_back(len);
        const Vec3 dir = (next - prev) / len;
        if (j == 0)
            rec.departure_dir = dir;
        if (j == k)
            rec.arrival_dir = dir;
        if (j < k)
        {
            const Surface &s = surf[surfaces[j]];
            Interaction it;
            it.kind = InteractionKind::reflection;
            it.point = points[j];
            it.surface_normal = s.normal.dot(dir) > 0.0 ? Vec3(-s.normal) : s.normal;
            it.material_id = s.material_id;
            it.incidence_angle = std::acos(std::min(1.0, std::abs(dir.dot(s.normal))));
            it.feature_id = surfaces[j];
            it.triangle_id = hit_tri[j];
            rec.interactions.push_back(it);
        }
        prev = next;
    }
    rec.unfolded_length = 0.0;
    for (double l : rec.segment_lengths)
        rec.unfolded_length += l;
    return rec;
}

// Ordered pairs of surfaces sharing at least one triangle edge.
std::set<std::pair<std::uint32_t, std::uint32_t>> surface_adjacency(const Scene &scene)
{
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::set<std::uint32_t>> edge_surfaces;
    for (const auto &t : scene.triangles())
        for (int k = 0; k < 3; ++k)
        {
            const auto a = t.vertex_ids[k], b = t.vertex_ids[(k + 1) % 3];
            edge_surfaces[{std::min(a, b), std::max(a, b)}].insert(t.surface_id);
        }
    std::set<std::pair<std::uint32_t, std::uint32_t>> out;
    for (const auto &[edge, surfs] : edge_surfaces)
        for (auto i : surfs)
            for (auto j : surfs)
                if (i != j)
                    out.insert({i, j});
    return out;
}

constexpr std::size_t kDirectionsPerTask = 256;

} // namespace

std::vector<PathRecord> trace(const Scene &scene, const AccelStructure &accel, const std::vector<Vec3> &tx_positions,
                              const std::vector<Vec3> &rx_positions, const RayFan &fan, const TraceLimits &limits,
                              const TraceOptions &options)
{
    limits.validate();
    if (tx_positions.empty() || rx_positions.empty())
        throw ValidationError("trace: tx and rx position lists must be nonempty");

    const double guard = self_intersection_guard(scene);
    Box3 extent = scene.bounds();
    for (const auto &p : tx_positions)
        extent.extend(p);
    for (const auto &p : rx_positions)
        extent.extend(p);
    const double length_cap = options.length_cap_factor * extent.diagonal().norm();
    const int max_refl = std::min(limits.max_reflections, limits.max_total_interactions);
    const double alpha = fan.angular_separation_alpha;

    std::vector<PathRecord> out;

    // Line of sight
    for (std::uint32_t t = 0; t < tx_positions.size(); ++t)
        for (std::uint32_t r = 0; r < rx_positions.size(); ++r)
        {
            const Vec3 d = rx_positions[r] - tx_positions[t];
            const double len = d.norm();
            if (!(len > 0.0))
                continue;
            const Vec3 u = d / len;
            if (accel.any_hit(tx_positions[t], u, 0.0, len))
                continue;
            PathRecord rec;
            rec.tx_index = t;
            rec.rx_index = r;
            rec.segment_lengths = {len};
            rec.unfolded_length = len;
            rec.departure_dir = u;
            rec.arrival_dir = u;
            out.push_back(std::move(rec));
        }

    // Shooting and bouncing
    if (max_refl >= 1 && !scene.empty())
    {
        const std::size_t chunks = (fan.directions.size() + kDirectionsPerTask - 1) / kDirectionsPerTask;
        const std::size_t tasks = tx_positions.size() * chunks;
        std::vector<std::vector<RawCapture>> task_captures(tasks);

        parallel_for(tasks, options.workers, [&](std::size_t task) {
            const std::size_t t = task / chunks;
            const std::size_t c = task % chunks;
            const Vec3 &tx = tx_positions[t];
            const std::size_t first = c * kDirectionsPerTask;
            const std::size_t last = std::min(first + kDirectionsPerTask, fan.directions.size());
            std::map<std::pair<std::uint32_t, Signature>, std::size_t> local;
            auto &captures = task_captures[task];
            Signature chain;
            for (std::size_t i = first; i < last; ++i)
            {
                Vec3 origin = tx;
                Vec3 dir = fan.directions[i];
                double unfolded = 0.0;
                chain.clear();
                for (int bounce = 0; bounce <= max_refl; ++bounce)
                {
                    const auto hit = accel.intersect(origin, dir, bounce == 0 ? 0.0 : guard);
                    double seg_len = std::min(hit ? hit->t : std::numeric_limits<double>::infinity(),
                                              length_cap - unfolded);
                    if (!(seg_len > 0.0))
                        break;
                    // A segment cut short by a wall just before rx still nominates
                    // the chain; correction decides whether the path exists
                    const double slack = hit ? alpha * (unfolded + seg_len) / std::sqrt(3.0) : 0.0;
                    if (bounce >= 1)
                        for (std::uint32_t r = 0; r < rx_positions.size(); ++r)
                        {
                            const auto cap =
                                reception_test(origin, dir, seg_len + slack, rx_positions[r], alpha, unfolded);
                            if (!cap)
                                continue;
                            auto [it, inserted] = local.emplace(std::make_pair(r, chain), captures.size());
                            if (inserted)
                                captures.push_back({r, chain, cap->distance});
                            else if (cap->distance < captures[it->second].distance)
                                captures[it->second].distance = cap->distance;
                        }
                    if (!hit || bounce == max_refl || unfolded + hit->t >= length_cap)
                        break;
                    const Triangle &tri = scene.triangles()[hit->triangle_id];
                    chain.push_back(tri.surface_id);
                    origin = hit->point;
                    dir = reflect(dir, tri.normal).normalized();
                    unfolded += hit->t;
                }
            }
        });

        std::map<CaptureKey, double> merged;
        for (std::size_t task = 0; task < tasks; ++task)
        {
            const std::uint32_t t = static_cast<std::uint32_t>(task / chunks);
            for (auto &cap : task_captures[task])
            {
                auto [it, inserted] = merged.emplace(CaptureKey{t, cap.rx, std::move(cap.surfaces)}, cap.distance);
                if (!inserted && cap.distance < it->second)
                    it->second = cap.distance;
            }
        }
        task_captures.clear();

        // Rays that graze the edge between two surfaces can record the two
        // reflections in swapped order; offer the swapped chain to correction
        const auto adjacent = surface_adjacency(scene);
        std::vector<std::pair<CaptureKey, double>> swapped;
        for (const auto &[key, dist] : merged)
            for (std::size_t j = 0; j + 1 < key.surfaces.size(); ++j)
                if (adjacent.count({key.surfaces[j], key.surfaces[j + 1]}))
                {
                    CaptureKey alt = key;
                    std::swap(alt.surfaces[j], alt.surfaces[j + 1]);
                    swapped.emplace_back(std::move(alt), dist);
                }
        for (auto &[key, dist] : swapped)
        {
            auto [it, inserted] = merged.emplace(std::move(key), dist);
            if (!inserted && dist < it->second)
                it->second = dist;
        }

        std::vector<std::pair<CaptureKey, double>> unique(merged.begin(), merged.end());
        merged.clear();
        std::vector<std::optional<PathRecord>> corrected(unique.size());
        const std::size_t per_task = 64;
        parallel_for((unique.size() + per_task - 1) / per_task, options.workers, [&](std::size_t task) {
            const std::size_t end = std::min(unique.size(), (task + 1) * per_task);
            for (std::size_t i = task * per_task; i < end; ++i)
            {
                const auto &[key, dist] = unique[i];
                corrected[i] = correct_specular(scene, accel, key.tx, tx_positions[key.tx], key.rx,
                                                rx_positions[key.rx], key.surfaces, guard);
                if (corrected[i])
                    corrected[i]->capture_distance = dist;
            }
        });
        for (auto &rec : corrected)
            if (rec)
                out.push_back(std::move(*rec));
    }

    // Single diffraction by edge enumeration
    if (limits.max_diffractions >= 1 && limits.max_total_interactions >= 1)
    {
        const auto edges = find_diffraction_edges(scene);
        for (std::uint32_t t = 0; t < tx_positions.size(); ++t)
            for (std::uint32_t e = 0; e < edges.size(); ++e)
            {
                const auto &edge = edges[e];
                const double len = (edge.b - edge.a).norm();
                const double outer = 2.0 * kPi - edge.interior_angle;
                auto cylindrical = [&](const Vec3 &p, double &z, double &rho, double &phi) {
                    const Vec3 w = p - edge.a;
                    z = w.dot(edge.direction);
                    const Vec3 v = w - z * edge.direction;
                    rho = v.norm();
                    phi = std::atan2(v.dot(edge.face_normal), v.dot(edge.face_tangent));
                    if (phi < 0.0)
                        phi += 2.0 * kPi;
                };
                double z1, rho1, phi1;
                cylindrical(tx_positions[t], z1, rho1, phi1);
                if (!(rho1 > 1e-9) || !(phi1 > 0.0 && phi1 < outer))
                    continue;
                for (std::uint32_t r = 0; r < rx_positions.size(); ++r)
                {
                    double z2, rho2, phi2;
                    cylindrical(rx_positions[r], z2, rho2, phi2);
                    if (!(rho2 > 1e-9) || !(phi2 > 0.0 && phi2 < outer))
                        continue;
                    const double zq = z1 + (z2 - z1) * rho1 / (rho1 + rho2);
                    if (!(zq > 1e-9 * len && zq < len * (1.0 - 1e-9)))
                        continue;
                    const Vec3 q = edge.a + zq * edge.direction;
                    if (accel.occluded(tx_positions[t], q, guard) || accel.occluded(q, rx_positions[r], guard))
                        continue;
                    PathRecord rec;
                    rec.tx_index = t;
                    rec.rx_index = r;
                    const double s1 = (q - tx_positions[t]).norm();
                    const double s2 = (rx_positions[r] - q).norm();
                    rec.segment_lengths = {s1, s2};
                    rec.unfolded_length = s1 + s2;
                    rec.departure_dir = (q - tx_positions[t]) / s1;
                    rec.arrival_dir = (rx_positions[r] - q) / s2;
                    Interaction it;
                    it.kind = InteractionKind::diffraction;
                    it.point = q;
                    it.surface_normal = edge.face_normal;
                    it.material_id = edge.material_id;
                    it.incidence_angle = std::acos(std::clamp(rec.departure_dir.dot(edge.direction), -1.0, 1.0));
                    it.feature_id = e;
                    it.triangle_id = edge.triangles[0];
                    it.edge_direction = edge.direction;
                    it.face_tangent = edge.face_tangent;
                    it.wedge_interior_angle = edge.interior_angle;
                    rec.interactions.push_back(it);
                    out.push_back(std::move(rec));
                }
            }
    }

    // Single-bounce diffuse scattering from triangle centroids
    if (limits.max_scatterings >= 1 && limits.max_total_interactions >= 1)
    {
        const auto &tris = scene.triangles();
        std::vector<std::uint32_t> sources;
        for (std::uint32_t i = 0; i < tris.size(); ++i)
            if (scene.materials()[tris[i].material_id].scattering_coeff > 0.0)
                sources.push_back(i);
        auto visible = [&](const std::vector<Vec3> &points) {
            std::vector<char> v(points.size() * sources.size(), 0);
            parallel_for(points.size(), options.workers, [&](std::size_t p) {
                for (std::size_t s = 0; s < sources.size(); ++s)
                {
                    const Triangle &tri = tris[sources[s]];
                    const Vec3 c = tri.centroid();
                    if (tri.normal.dot(points[p] - c) == 0.0)
                        continue;
                    v[p * sources.size() + s] = !accel.occluded(points[p], c, guard);
                }
            });
            return v;
        };
        const auto tx_vis = visible(tx_positions);
        const auto rx_vis = visible(rx_positions);
        for (std::uint32_t t = 0; t < tx_positions.size(); ++t)
            for (std::uint32_t r = 0; r < rx_positions.size(); ++r)
                for (std::size_t s = 0; s < sources.size(); ++s)
                {
                    if (!tx_vis[t * sources.size() + s] || !rx_vis[r * sources.size() + s])
                        continue;
                    const Triangle &tri = tris[sources[s]];
                    const Vec3 c = tri.centroid();
                    const double side_t = tri.normal.dot(tx_positions[t] - c);
                    const double side_r = tri.normal.dot(rx_positions[r] - c);
                    if (side_t * side_r <= 0.0)
                        continue;
                    PathRecord rec;
                    rec.tx_index = t;
                    rec.rx_index = r;
                    const double s1 = (c - tx_positions[t]).norm();
                    const double s2 = (rx_positions[r] - c).norm();
                    rec.segment_lengths = {s1, s2};
                    rec.unfolded_length = s1 + s2;
                    rec.departure_dir = (c - tx_positions[t]) / s1;
                    rec.arrival_dir = (rx_positions[r] - c) / s2;
                    Interaction it;
                    it.kind = InteractionKind::scattering;
                    it.point = c;
                    it.surface_normal = side_t > 0.0 ? tri.normal : Vec3(-tri.normal);
                    it.material_id = tri.material_id;
                    it.incidence_angle =
                        std::acos(std::min(1.0, std::abs(rec.departure_dir.dot(it.surface_normal))));
                    it.feature_id = sources[s];
                    it.triangle_id = sources[s];
                    rec.interactions.push_back(it);
                    out.push_back(std::move(rec));
                }
    }

    canonical_sort(out);
    return out;
}

namespace
{

nlohmann::json vec_json(const Vec3 &v)
{
    return nlohmann::json::array({quantize9(v.x()), quantize9(v.y()), quantize9(v.z())});
}

} // namespace

std::string path_to_json_line(const PathRecord &path)
{
    nlohmann::json j;
    j["tx_index"] = path.tx_index;
    j["rx_index"] = path.rx_index;
    j["unfolded_length"] = quantize9(path.unfolded_length);
    nlohmann::json segs = nlohmann::json::array();
    for (double s : path.segment_lengths)
        segs.push_back(quantize9(s));
    j["segment_lengths"] = segs;
    j["departure_dir"] = vec_json(path.departure_dir);
    j["arrival_dir"] = vec_json(path.arrival_dir);
    j["capture_distance"] = quantize9(path.capture_distance);
    nlohmann::json inter = nlohmann::json::array();
    for (const auto &it : path.interactions)
    {
        nlohmann::json e;
        e["kind"] = to_string(it.kind);
        e["feature_id"] = it.feature_id;
        e["triangle_id"] = it.triangle_id;
        e["material_id"] = it.material_id;
        e["point"] = vec_json(it.point);
        e["surface_normal"] = vec_json(it.surface_normal);
        e["incidence_angle"] = quantize9(it.incidence_angle);
        if (it.kind == InteractionKind::diffraction)
        {
            e["edge_direction"] = vec_json(it.edge_direction);
            e["wedge_interior_angle"] = quantize9(it.wedge_interior_angle);
        }
        inter.push_back(std::move(e));
    }
    j["interactions"] = inter;
    return j.dump();
}

void write_paths_jsonl(std::ostream &out, const std::vector<PathRecord> &paths)
{
    for (const auto &p : paths)
        out << path_to_json_line(p) << '\n';
}

} // namespace sbrt
