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

// Scene file formats: the JSON scene schema, binary/ASCII STL, and the STL
// sidecar material map.

#include "sbrt/geometry.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace sbrt
{

using nlohmann::json;

namespace
{

std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string location_of(const std::string &text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
            ++col;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json_text(const std::string &text, const std::string &origin)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        // e.byte is one past the offending character
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw FormatError(origin + ": " + location_of(text, at) + ": JSON syntax error");
    }
}

const json &require(const json &obj, const char *key, const std::string &where)
{
    if (!obj.is_object() || !obj.contains(key))
        throw FormatError(where + ": missing key '" + key + "'");
    return obj.at(key);
}

double number_at(const json &value, const std::string &where)
{
    if (!value.is_number())
        throw FormatError(where + ": expected a number");
    return value.get<double>();
}

Vec3 point_at(const json &value, const std::string &where)
{
    if (!value.is_array() || value.size() != 3)
        throw FormatError(where + ": expected [x, y, z]");
    return {number_at(value[0], where), number_at(value[1], where), number_at(value[2], where)};
}

Material material_from_json(const json &j, const std::string &where)
{
    Material m;
    const auto &name = require(j, "name", where);
    if (!name.is_string())
        throw FormatError(where + ".name: expected a string");
    m.name = name.get<std::string>();
    m.rel_permittivity_real = number_at(require(j, "rel_permittivity_real", where), where + ".rel_permittivity_real");
    auto optional_number = [&](const char *key, double fallback) {
        return j.contains(key) ? number_at(j.at(key), where + "." + key) : fallback;
    };
    m.rel_permittivity_imag = optional_number("rel_permittivity_imag", 0.0);
    m.roughness_sigma = optional_number("roughness_sigma", 0.0);
    m.scattering_coeff = optional_number("scattering_coeff", 0.0);
    m.conductivity = optional_number("conductivity", 0.0);
    if (j.contains("scattering_lobe_width"))
    {
        const auto &lobe = j.at("scattering_lobe_width");
        if (!lobe.is_number_integer())
            throw FormatError(where + ".scattering_lobe_width: expected an integer");
        m.scattering_lobe_width = lobe.get<int>();
    }
    return m;
}

json material_to_json(const Material &m)
{
    json j;
    j["name"] = m.name;
    j["rel_permittivity_real"] = m.rel_permittivity_real;
    j["rel_permittivity_imag"] = m.rel_permittivity_imag;
    j["roughness_sigma"] = m.roughness_sigma;
    j["scattering_coeff"] = m.scattering_coeff;
    j["scattering_lobe_width"] = m.scattering_lobe_width;
    if (m.conductivity > 0.0)
        j["conductivity"] = m.conductivity;
    return j;
}

std::vector<Material> materials_from_json(const json &arr, const std::string &where)
{
    if (!arr.is_array())
        throw FormatError(where + ": expected an array");
    std::vector<Material> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(material_from_json(arr[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

// ---------- STL ----------

struct StlTokenizer
{
    const std::string &text;
    std::string origin;
    std::size_t pos = 0;
    std::size_t line = 1;

    std::string_view next()
    {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
        {
            if (text[pos] == '\n')
                ++line;
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
        return std::string_view(text).substr(start, pos - start);
    }

    void rest_of_line()
    {
        while (pos < text.size() && text[pos] != '\n')
            ++pos;
    }

    [[noreturn]] void fail(const std::string &what) const
    {
        throw FormatError(origin + ": line " + std::to_string(line) + ": " + what);
    }

    void expect(std::string_view word)
    {
        const auto tok = next();
        if (tok != word)
            fail("expected '" + std::string(word) + "', got '" + std::string(tok) + "'");
    }

    double number()
    {
        const auto tok = next();
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            fail("expected a number, got '" + std::string(tok) + "'");
        return value;
    }
};

std::vector<std::array<Vec3, 3>> parse_ascii_stl(const std::string &text, const std::string &origin)
{
    StlTokenizer tok{text, origin};
    std::vector<std::array<Vec3, 3>> tris;
    auto first = tok.next();
    if (first != "solid")
        tok.fail("ASCII STL must start with 'solid'");
    tok.rest_of_line();
    for (;;)
    {
        const auto word = tok.next();
        if (word.empty())
            tok.fail("unexpected end of file (missing 'endsolid')");
        if (word == "endsolid")
        {
            tok.rest_of_line();
            const auto more = tok.next();
            if (more.empty())
                break;
            if (more != "solid")
                tok.fail("expected 'solid' or end of file");
            tok.rest_of_line();
            continue;
        }
        if (word != "facet")
            tok.fail("expected 'facet', got '" + std::string(word) + "'");
        tok.expect("normal");
        for (int k = 0; k < 3; ++k)
            tok.number(); // the stored normal is ignored, winding decides
        tok.expect("outer");
        tok.expect("loop");
        std::array<Vec3, 3> tri;
        for (auto &v : tri)
        {
            tok.expect("vertex");
            const double x = tok.number();
            const double y = tok.number();
            const double z = tok.number();
            v = {x, y, z};
        }
        tok.expect("endloop");
        tok.expect("endfacet");
        tris.push_back(tri);
    }
    return tris;
}

std::vector<std::array<Vec3, 3>> parse_binary_stl(const std::string &bytes)
{
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    std::vector<std::array<Vec3, 3>> tris(count);
    for (std::uint32_t i = 0; i < count; ++i)
    {
        const char *rec = bytes.data() + 84 + 50 * static_cast<std::size_t>(i);
        float f[12];
        std::memcpy(f, rec, sizeof f);
        for (int k = 0; k < 3; ++k)
            tris[i][k] = {f[3 + 3 * k], f[4 + 3 * k], f[5 + 3 * k]};
    }
    return tris;
}

bool looks_binary_stl(const std::string &bytes)
{
    if (bytes.size() < 84)
        return false;
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    return bytes.size() == 84 + 50 * static_cast<std::size_t>(count);
}

std::vector<std::uint32_t> apply_material_map(const json &map, const std::vector<Material> &materials,
                                              std::size_t triangle_count, const std::string &origin)
{
    auto index_of = [&](const json &value, const std::string &key) {
        if (!value.is_string())
            throw FormatError(origin + ": entry '" + key + "' must name a material");
        const auto name = value.get<std::string>();
        for (std::size_t i = 0; i < materials.size(); ++i)
            if (materials[i].name == name)
                return static_cast<std::uint32_t>(i);
        throw ValidationError(origin + ": unknown material '" + name + "' for '" + key + "'");
    };

    constexpr std::uint32_t kUnset = UINT32_MAX;
    std::vector<std::uint32_t> ids(triangle_count, kUnset);
    if (map.contains("all"))
        std::fill(ids.begin(), ids.end(), index_of(map.at("all"), "all"));

    std::vector<bool> ranged(triangle_count, false);
    for (const auto &[key, value] : map.items())
    {
        if (key == "all" || key == "materials")
            continue;
        std::size_t first = 0, last = 0;
        const auto dash = key.find('-');
        auto parse_index = [&](std::string_view s) {
            std::size_t v = 0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
                throw FormatError(origin + ": bad triangle range '" + key + "'");
            return v;
        };
        if (dash == std::string::npos)
            first = last = parse_index(key);
        else
        {
            first = parse_index(std::string_view(key).substr(0, dash));
            last = parse_index(std::string_view(key).substr(dash + 1));
        }
        if (first > last || last >= triangle_count)
            throw ValidationError(origin + ": triangle range '" + key + "' outside 0-" +
                                  std::to_string(triangle_count == 0 ? 0 : triangle_count - 1));
        const auto mat = index_of(value, key);
        for (std::size_t i = first; i <= last; ++i)
        {
            if (ranged[i])
                throw ValidationError(origin + ": triangle " + std::to_string(i) + " assigned by overlapping ranges");
            ranged[i] = true;
            ids[i] = mat;
        }
    }
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == kUnset)
            throw ValidationError(origin + ": triangle " + std::to_string(i) + " has no material");
    return ids;
}

} // namespace

Scene parse_scene_json(const std::string &text, const std::string &origin)
{
    const json doc = parse_json_text(text, origin);
    if (!doc.is_object())
        throw FormatError(origin + ": top level must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "materials" && it.key() != "surfaces")
            throw FormatError(origin + ": unknown key '" + it.key() + "'");

    std::vector<Material> materials;
    if (doc.contains("materials"))
        materials = materials_from_json(doc.at("materials"), origin + ": materials");

    std::vector<PolygonInput> polygons;
    if (doc.contains("surfaces"))
    {
        const auto &surfaces = doc.at("surfaces");
        if (!surfaces.is_array())
            throw FormatError(origin + ": surfaces: expected an array");
        for (std::size_t s = 0; s < surfaces.size(); ++s)
        {
            const std::string where = origin + ": surfaces[" + std::to_string(s) + "]";
            const auto &entry = surfaces[s];
            PolygonInput poly;
            const auto &mat = require(entry, "material", where);
            if (!mat.is_string())
                throw FormatError(where + ".material: expected a string");
            poly.material = mat.get<std::string>();
            const auto &verts = require(entry, "vertices", where);
            if (!verts.is_array())
                throw FormatError(where + ".vertices: expected an array");
            for (std::size_t k = 0; k < verts.size(); ++k)
                poly.vertices.push_back(point_at(verts[k], where + ".vertices[" + std::to_string(k) + "]"));
            if (entry.contains("triangles"))
            {
                for (const auto &t : entry.at("triangles"))
                {
                    if (!t.is_array() || t.size() != 3)
                        throw FormatError(where + ".triangles: expected [i, j, k] entries");
                    for (const auto &i : t)
                        if (!i.is_number_unsigned())
                            throw FormatError(where + ".triangles: expected non-negative integers");
                    poly.triangles.push_back({t[0].get<std::uint32_t>(), t[1].get<std::uint32_t>(),
                                              t[2].get<std::uint32_t>()});
                }
            }
            polygons.push_back(std::move(poly));
        }
    }
    return Scene::from_polygons(std::move(materials), polygons);
}

Scene parse_stl(const std::string &bytes, const std::string &material_map_json, const std::string &origin)
{
    const auto tris = looks_binary_stl(bytes) ? parse_binary_stl(bytes) : parse_ascii_stl(bytes, origin);

    const json map = parse_json_text(material_map_json, origin + " (material map)");
    if (!map.is_object())
        throw FormatError(origin + " (material map): top level must be an object");
    std::vector<Material> materials;
    if (map.contains("materials"))
        materials = materials_from_json(map.at("materials"), origin + " (material map): materials");
    const auto ids = apply_material_map(map, materials, tris.size(), origin + " (material map)");
    return Scene::from_triangles(std::move(materials), tris, ids);
}

Scene load_scene(const std::filesystem::path &path, SceneFormat format,
                 const std::optional<std::filesystem::path> &material_map)
{
    const std::string text = read_file(path);
    if (format == SceneFormat::json)
        return parse_scene_json(text, path.string());
    if (!material_map)
        throw ValidationError("STL scene '" + path.string() + "' needs a sidecar material map");
    return parse_stl(text, read_file(*material_map), path.string());
}

std::string scene_to_json(const Scene &scene)
{
    json doc;
    doc["materials"] = json::array();
    for (const auto &m : scene.materials())
        doc["materials"].push_back(material_to_json(m));
    doc["surfaces"] = json::array();
    for (const auto &surface : scene.surfaces())
    {
        std::map<std::uint32_t, std::uint32_t> local;
        json verts = json::array();
        json tris = json::array();
        for (auto t : surface.triangles)
        {
            json idx = json::array();
            for (auto vid : scene.triangles()[t].vertex_ids)
            {
                auto [it, inserted] = local.try_emplace(vid, static_cast<std::uint32_t>(local.size()));
                if (inserted)
                {
                    const Vec3 &p = scene.vertices()[vid];
                    verts.push_back({p.x(), p.y(), p.z()});
                }
                idx.push_back(it->second);
            }
            tris.push_back(idx);
        }
        doc["surfaces"].push_back(
            {{"material", scene.materials()[surface.material_id].name}, {"vertices", verts}, {"triangles", tris}});
    }
    return doc.dump(2);
}

void save_scene_json(const Scene &scene, const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << scene_to_json(scene) << '\n';
}

} // namespace sbrt
