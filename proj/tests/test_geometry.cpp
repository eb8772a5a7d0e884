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
#include "support/rooms.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

using namespace sbrt;

TEST_CASE("box room has six surfaces and twelve triangles")
{
    const Scene s = rooms::build(rooms::box_room(7.2, 7.2, 3.0));
    CHECK(s.triangles().size() == 12);
    CHECK(s.surfaces().size() == 6);
    CHECK(s.vertices().size() == 8);
    for (const auto &surf : s.surfaces())
        CHECK(surf.triangles.size() == 2);
    CHECK(s.diagonal() == doctest::Approx(std::sqrt(7.2 * 7.2 * 2 + 9.0)));
    // Inward normals
    const Vec3 mid(3.6, 3.6, 1.5);
    for (const auto &t : s.triangles())
        CHECK(t.normal.dot(mid - t.centroid()) > 0.0);
}

TEST_CASE("unknown material and degenerate polygons are rejected")
{
    std::vector<Material> mats{rooms::concrete()};
    PolygonInput p;
    p.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    p.material = "glass";
    CHECK_THROWS_AS(Scene::from_polygons(mats, {p}), ValidationError);
    p.material = "concrete";
    p.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
    CHECK_THROWS_AS(Scene::from_polygons(mats, {p}), ValidationError);
}

TEST_CASE("material validation names the field")
{
    Material m = rooms::concrete();
    m.rel_permittivity_real = 0.5;
    try
    {
        m.validate();
        FAIL("expected ValidationError");
    }
    catch (const ValidationError &e)
    {
        CHECK(std::string(e.what()).find("rel_permittivity_real") != std::string::npos);
    }
}

TEST_CASE("conductivity adds to the loss term")
{
    Material m = rooms::concrete();
    m.conductivity = 0.1;
    const double f = 28.0;
    const auto eps = m.permittivity(f);
    const double expected = 0.5 + 0.1 / (2.0 * kPi * f * 1e9 * 8.8541878128e-12);
    CHECK(eps.real() == doctest::Approx(5.31));
    CHECK(-eps.imag() == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("json scene round trip is bit exact")
{
    rooms::RoomSpec room = rooms::box_room(7.2, 7.2, 3.0);
    room.materials.push_back(rooms::metal());
    rooms::add_box(room, Vec3(1.1, 2.2, 0.0), Vec3(1.3, 3.7, 2.9), "metal");
    const Scene a = rooms::build(room);
    const Scene b = parse_scene_json(scene_to_json(a));
    REQUIRE(a.triangles().size() == b.triangles().size());
    for (std::size_t i = 0; i < a.triangles().size(); ++i)
    {
        for (int k = 0; k < 3; ++k)
            CHECK(std::memcmp(a.triangles()[i].vertices[k].data(), b.triangles()[i].vertices[k].data(),
                              3 * sizeof(double)) == 0);
        CHECK(a.triangles()[i].material_id == b.triangles()[i].material_id);
        CHECK(a.triangles()[i].surface_id == b.triangles()[i].surface_id);
    }
    CHECK(b.materials().size() == 2);
    CHECK(b.materials()[1].name == "metal");
}

TEST_CASE("json scene errors")
{
    CHECK_THROWS_AS(parse_scene_json("{"), FormatError);
    CHECK_THROWS_AS(parse_scene_json("[]"), FormatError);
    CHECK_THROWS_AS(parse_scene_json(R"({"surfaces": 3})"), FormatError);
    CHECK_THROWS_AS(parse_scene_json(R"({"scene": "x.json"})"), FormatError);
    CHECK_THROWS_AS(parse_scene_json(R"({"materials": [], "surfaces": [{"vertices": [[0,0,0],[1,0,0],[0,1,0]]}]})"),
                    FormatError);
    CHECK(parse_scene_json(R"({"materials": [], "surfaces": []})").empty());
}

namespace
{

const char *kAsciiStl = R"(solid two
facet normal 0 0 1
 outer loop
  vertex 0 0 0
  vertex 1 0 0
  vertex 1 1 0
 endloop
endfacet
facet normal 0 0 1
 outer loop
  vertex 0 0 0
  vertex 1 1 0
  vertex 0 1 0
 endloop
endfacet
facet normal 1 0 0
 outer loop
  vertex 1 0 0
  vertex 1 1 0
  vertex 1 1 1
 endloop
endfacet
endsolid two
)";

const char *kMap = R"({"materials": [{"name": "concrete", "rel_permittivity_real": 5.31},
                                     {"name": "glass", "rel_permittivity_real": 6.27}],
                      "all": "concrete", "2": "glass"})";

std::string binary_stl(const std::vector<std::array<float, 9>> &tris)
{
    std::string out(80, ' ');
    const std::uint32_t n = static_cast<std::uint32_t>(tris.size());
    out.append(reinterpret_cast<const char *>(&n), 4);
    for (const auto &t : tris)
    {
        const float normal[3] = {0, 0, 0};
        out.append(reinterpret_cast<const char *>(normal), 12);
        out.append(reinterpret_cast<const char *>(t.data()), 36);
        out.append(2, '\0');
    }
    return out;
}

} // namespace

TEST_CASE("ascii stl with material map")
{
    const Scene s = parse_stl(kAsciiStl, kMap);
    REQUIRE(s.triangles().size() == 3);
    CHECK(s.materials()[s.triangles()[0].material_id].name == "concrete");
    CHECK(s.materials()[s.triangles()[2].material_id].name == "glass");
    // Coplanar pair merges, the vertical facet stays separate
    CHECK(s.triangles()[0].surface_id == s.triangles()[1].surface_id);
    CHECK(s.triangles()[2].surface_id != s.triangles()[0].surface_id);
    CHECK(s.surfaces().size() == 2);
}

TEST_CASE("binary stl matches ascii")
{
    const auto bin = binary_stl({{0, 0, 0, 1, 0, 0, 1, 1, 0}, {0, 0, 0, 1, 1, 0, 0, 1, 0}, {1, 0, 0, 1, 1, 0, 1, 1, 1}});
    const Scene a = parse_stl(kAsciiStl, kMap);
    const Scene b = parse_stl(bin, kMap);
    REQUIRE(b.triangles().size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            CHECK((a.triangles()[i].vertices[k] - b.triangles()[i].vertices[k]).norm() == 0.0);
}

TEST_CASE("stl errors")
{
    CHECK_THROWS_AS(parse_stl("solid x\nfacet normal 0 0 1\n outer loop\n vertex 0 0\n", kMap), FormatError);
    CHECK_THROWS_AS(parse_stl(kAsciiStl, "{}"), std::exception);
    CHECK_THROWS_AS(parse_stl(kAsciiStl, R"({"materials": [{"name": "a", "rel_permittivity_real": 2}], "all": "b"})"),
                    std::exception);
}

TEST_CASE("load_scene reads files and reports missing ones")
{
    const auto dir = std::filesystem::temp_directory_path() / "sbrt_test_geometry";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "a.stl") << kAsciiStl;
        std::ofstream(dir / "a.map.json") << kMap;
    }
    const Scene s = load_scene(dir / "a.stl", SceneFormat::stl, dir / "a.map.json");
    CHECK(s.triangles().size() == 3);
    CHECK_THROWS(load_scene(dir / "missing.json", SceneFormat::json));
    const Scene box = rooms::build(rooms::box_room(2, 3, 4));
    save_scene_json(box, dir / "box.json");
    CHECK(load_scene(dir / "box.json", SceneFormat::json).triangles().size() == 12);
    CHECK(parse_scene_format("stl") == SceneFormat::stl);
    CHECK(parse_scene_format("json") == SceneFormat::json);
    CHECK_THROWS(parse_scene_format("obj"));
}

TEST_CASE("single triangle intersection")
{
    Triangle t;
    t.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    t.normal = Vec3::UnitZ();
    const auto h = intersect_triangle(t, 7, Vec3(0.25, 0.25, 1.0), Vec3(0, 0, -1), 0.0);
    REQUIRE(h);
    CHECK(h->t == doctest::Approx(1.0));
    CHECK(h->triangle_id == 7);
    CHECK(h->front_facing);
    CHECK_FALSE(intersect_triangle(t, 0, Vec3(0.75, 0.75, 1.0), Vec3(0, 0, -1), 0.0));
    CHECK_FALSE(intersect_triangle(t, 0, Vec3(0.25, 0.25, 1.0), Vec3(1, 0, 0), 0.0));
    CHECK_FALSE(intersect_triangle(t, 0, Vec3(0.25, 0.25, 1.0), Vec3(0, 0, -1), 1.5));
    // Shared edge is closed
    CHECK(intersect_triangle(t, 0, Vec3(0.5, 0.5, 1.0), Vec3(0, 0, -1), 0.0));
}
