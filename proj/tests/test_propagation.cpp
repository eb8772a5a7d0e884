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

#include "sbrt/propagation.hpp"
#include "support/rooms.hpp"

#include <doctest.h>

#include <cmath>

using namespace sbrt;

TEST_CASE("fresnel coefficients at normal incidence")
{
    CHECK(std::abs(fresnel_reflection(4.0, 0.0, Polarization::te) - cplx(-1.0 / 3.0)) < 1e-12);
    CHECK(std::abs(fresnel_reflection(4.0, 0.0, Polarization::tm) - cplx(-1.0 / 3.0)) < 1e-12);
    CHECK(std::abs(fresnel_reflection(1.0, 0.7, Polarization::te)) == 0.0);
}

TEST_CASE("brewster zero for the parallel polarization")
{
    CHECK(std::abs(fresnel_reflection(4.0, std::atan(2.0), Polarization::tm)) < 1e-9);
    CHECK(std::abs(fresnel_reflection(4.0, std::atan(2.0), Polarization::te)) > 0.5);
}

TEST_CASE("fresnel coefficients against the textbook formulas")
{
    const cplx eps(5.31, -0.5);
    for (double th : {0.1, 0.5, 1.0, 1.4})
    {
        const double c = std::cos(th), s = std::sin(th);
        const cplx root = std::sqrt(eps - s * s);
        const cplx te = (c - root) / (c + root);
        const cplx tm = (root - eps * c) / (root + eps * c);
        CHECK(std::abs(fresnel_reflection(eps, th, Polarization::te) - te) < 1e-14);
        CHECK(std::abs(fresnel_reflection(eps, th, Polarization::tm) - tm) < 1e-14);
        CHECK(std::abs(fresnel_reflection(eps, th, Polarization::te)) <= 1.0);
    }
    CHECK(fresnel_reflection(eps, kPi / 2, Polarization::te) == cplx(-1.0));
    CHECK(fresnel_reflection(eps, kPi / 2, Polarization::tm) == cplx(1.0));
}

TEST_CASE("rayleigh roughness factor")
{
    const double lambda = 0.01;
    CHECK(rayleigh_roughness_factor(0.0, 0.3, lambda) == 1.0);
    CHECK(std::abs(rayleigh_roughness_factor(lambda / (4 * kPi), 0.0, lambda) - std::exp(-0.5)) < 1e-12);
    double prev = 2.0;
    for (int i = 0; i < 100; ++i)
    {
        const double r = rayleigh_roughness_factor(1e-4 * i, 0.6, lambda);
        CHECK(r < prev);
        prev = r;
    }
    const cplx g = fresnel_reflection(4.0, 0.6, Polarization::te);
    CHECK(std::abs(modified_reflection(4.0, 0.6, Polarization::te, 5e-4, lambda) -
                   g * rayleigh_roughness_factor(5e-4, 0.6, lambda)) < 1e-15);
}

TEST_CASE("fresnel integrals against reference values")
{
    // z, C(z), S(z)
    const double ref[][3] = {{0.1, 0.09999753262708506, 0.0005235895476122108},
                             {0.5, 0.4923442258714464, 0.06473243285999929},
                             {1.0, 0.779893400376823, 0.4382591473903547},
                             {1.4, 0.5430957835462566, 0.7135250773634121},
                             {1.6, 0.3654616834404876, 0.6388876835093806},
                             {2.5, 0.4574130096417771, 0.6191817558195929},
                             {5.0, 0.5636311887040122, 0.4991913819171169},
                             {10.0, 0.4998986942055157, 0.4681699785848822},
                             {40.0, 0.4999984168574454, 0.4920422537902731}};
    for (const auto &r : ref)
    {
        const auto [c, s] = fresnel_integrals(r[0]);
        CHECK(std::abs(c - r[1]) < 1e-12);
        CHECK(std::abs(s - r[2]) < 1e-12);
    }
    const auto [c0, s0] = fresnel_integrals(0.0);
    CHECK(c0 == 0.0);
    CHECK(s0 == 0.0);
    const auto [cn, sn] = fresnel_integrals(-1.0);
    CHECK(cn == doctest::Approx(-0.779893400376823));
    CHECK(sn == doctest::Approx(-0.4382591473903547));
}

TEST_CASE("utd transition function")
{
    const double ref[][3] = {{0.01, 0.1242051857737637, 0.1065789737918827},
                             {0.3, 0.5717132383007475, 0.2729915465634243},
                             {1.0, 0.8095254817474087, 0.2321993900552645},
                             {3.0, 0.9472422587410702, 0.1325782618306261},
                             {10.0, 0.9930411270116264, 0.04835149556165247},
                             {100.0, 0.9999250654633629, 0.004998127942624886}};
    for (const auto &r : ref)
        CHECK(std::abs(utd_transition(r[0]) - cplx(r[1], r[2])) < 1e-10);
    // Small-argument expansion (sqrt(pi X) - 2 X exp(j pi/4)) exp(j (pi/4 + X))
    const double x = 1e-6;
    const cplx approx = (std::sqrt(kPi * x) - 2.0 * x * std::exp(cplx(0, kPi / 4))) * std::exp(cplx(0, kPi / 4 + x));
    CHECK(std::abs(utd_transition(x) - approx) < 1e-10);
}

namespace
{

// Half-plane (interior angle 0) in the xz plane along z, face 0 at phi = 0.
struct HalfPlane
{
    double k;
    double lambda;
    double s_src;
    double phi_src;

    Vec3 source() const { return s_src * Vec3(std::cos(phi_src), std::sin(phi_src), 0); }

    cplx spherical(const Vec3 &a, const Vec3 &b) const
    {
        const double r = (b - a).norm();
        return std::exp(cplx(0, -k * r)) / r;
    }

    // Geometric-optics plus diffracted field, soft or hard.
    cplx total(double s, double phi, bool soft) const
    {
        const Vec3 p = s * Vec3(std::cos(phi), std::sin(phi), 0);
        cplx u = 0.0;
        if (phi < kPi + phi_src)
            u += spherical(source(), p);
        const Vec3 image = s_src * Vec3(std::cos(-phi_src), std::sin(-phi_src), 0);
        if (phi < kPi - phi_src)
            u += (soft ? -1.0 : 1.0) * spherical(image, p);
        UtdGeometry g;
        g.interior_angle = 0.0;
        g.phi_incident = phi_src;
        g.phi_diffracted = phi;
        g.beta0 = kPi / 2;
        g.s_incident = s_src;
        g.s_diffracted = s;
        const UtdResult d = utd_diffraction(g, lambda);
        const cplx coeff = soft ? d.soft : d.hard;
        u += std::exp(cplx(0, -k * s_src)) / s_src * coeff * d.spreading * std::exp(cplx(0, -k * s));
        return u;
    }
};

} // namespace

TEST_CASE("utd keeps the half-plane field continuous at both shadow boundaries")
{
    const double lambda = wavelength_m(28.0);
    HalfPlane hp{2 * kPi / lambda, lambda, 3.0, kPi / 3};
    const double s = 2.0, delta = 1e-7;
    for (bool soft : {true, false})
        for (double boundary : {kPi + hp.phi_src, kPi - hp.phi_src})
        {
            const cplx a = hp.total(s, boundary - delta, soft);
            const cplx b = hp.total(s, boundary + delta, soft);
            CHECK(std::abs(a - b) / std::abs(a) < 0.01);
        }
}

TEST_CASE("diffracted field decays into the deep shadow")
{
    const double lambda = wavelength_m(28.0);
    UtdGeometry g;
    g.interior_angle = 0.0;
    g.phi_incident = kPi / 3;
    g.s_incident = 3.0;
    g.s_diffracted = 2.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double phi = kPi + g.phi_incident + 0.05; phi < 2 * kPi - 0.3; phi += 0.02)
    {
        g.phi_diffracted = phi;
        const double m = std::abs(utd_diffraction(g, lambda).soft);
        CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("utd spreading factor and frequency scaling")
{
    UtdGeometry g;
    g.interior_angle = kPi / 2;
    g.phi_incident = 0.5;
    g.phi_diffracted = 3.5;
    g.s_incident = 4.0;
    g.s_diffracted = 1.0;
    const auto r = utd_diffraction(g, 0.01);
    CHECK(r.spreading == doctest::Approx(std::sqrt(4.0 / (1.0 * 5.0))));
    // Deep shadow, far from boundaries: |D| ~ 1 / sqrt(k)
    const auto r2 = utd_diffraction(g, 0.0025);
    CHECK(std::abs(r.soft) / std::abs(r2.soft) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("scattering lobe integral matches quadrature")
{
    for (int alpha : {1, 2, 4, 10})
        for (double th : {0.0, 0.4, 1.0, 1.4})
        {
            const Vec3 spec(std::sin(th), 0.0, std::cos(th));
            const int nt = 600, np = 1200;
            double sum = 0.0;
            for (int i = 0; i < nt; ++i)
            {
                const double t = (i + 0.5) * (kPi / 2) / nt;
                for (int j = 0; j < np; ++j)
                {
                    const double p = (j + 0.5) * 2 * kPi / np;
                    const Vec3 d(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
                    sum += std::pow((1 + d.dot(spec)) / 2, alpha) * std::sin(t);
                }
            }
            sum *= (kPi / 2 / nt) * (2 * kPi / np);
            CHECK(er_lobe_integral(alpha, th) == doctest::Approx(sum).epsilon(1e-4));
        }
}

TEST_CASE("scattered field ratio")
{
    const Vec3 n = Vec3::UnitZ();
    const Vec3 in = Vec3(1, 0, -1).normalized();
    const Vec3 spec = Vec3(1, 0, 1).normalized();
    const double th = kPi / 4;
    const double f = er_lobe_integral(3, th);
    const double e = er_scattering(0.5, 3, in, spec, n, 0.2, 2.0);
    CHECK(e == doctest::Approx(0.5 * std::sqrt(0.2 * std::cos(th) / f) / 2.0));
    // Off-specular directions are weaker
    CHECK(er_scattering(0.5, 3, in, Vec3(0, 0, 1), n, 0.2, 2.0) < e);
    // Below the surface nothing is scattered
    CHECK(er_scattering(0.5, 3, in, Vec3(1, 0, -1).normalized(), n, 0.2, 2.0) == 0.0);
    CHECK(er_scattering(0.0, 3, in, spec, n, 0.2, 2.0) == 0.0);
}

TEST_CASE("free space attenuation")
{
    const double lambda = 0.125;
    const cplx a = free_space_attenuation(10.0, lambda);
    CHECK(std::abs(a) == doctest::Approx(lambda / (4 * kPi * 10.0)));
    CHECK(std::arg(a * std::exp(cplx(0, 2 * kPi * 10.0 / lambda))) == doctest::Approx(0.0));
    CHECK_THROWS_AS(free_space_attenuation(0.0, lambda), ValidationError);
}

TEST_CASE("spherical basis is right handed")
{
    for (const Vec3 &k : {Vec3(1, 0, 0), Vec3(0.3, -0.4, 0.866), Vec3(-1, 2, -0.5)})
    {
        const Vec3 u = k.normalized();
        const Vec3 t = theta_hat(u), p = phi_hat(u);
        CHECK(std::abs(t.dot(p)) < 1e-14);
        CHECK(std::abs(t.dot(u)) < 1e-14);
        CHECK((t.cross(p) - u).norm() < 1e-14);
    }
    CHECK((theta_hat(Vec3::UnitX()) - Vec3(0, 0, -1)).norm() < 1e-15);
}

namespace
{

Scene ground(const Material &m)
{
    rooms::RoomSpec r;
    r.materials.push_back(m);
    r.rects.push_back({Vec3(-50, -50, 0), Vec3(100, 0, 0), Vec3(0, 100, 0), m.name});
    return rooms::build(r);
}

} // namespace

TEST_CASE("direct path field is the free space Green's function")
{
    const Scene empty;
    const AccelStructure accel(empty);
    const auto paths = trace(empty, accel, {Vec3::Zero()}, {Vec3(12, 0, 0)}, geodesic_directions(2), TraceLimits{});
    REQUIRE(paths.size() == 1);
    const double f = 28.0, lambda = wavelength_m(f);
    const auto e = path_field(paths[0], f, AtmosphericRates{}, empty);
    const CVec3 v = e.vector();
    CHECK(v.norm() == doctest::Approx(lambda / (4 * kPi * 12.0)).epsilon(1e-12));
    CHECK(std::abs(e.e_phi) == 0.0);
    AtmosphericRates rates;
    rates.gamma_db_per_km = 10.0;
    const auto att = path_field(paths[0], f, rates, empty);
    CHECK(20 * std::log10(v.norm() / att.vector().norm()) == doctest::Approx(0.12).epsilon(1e-9));
}

TEST_CASE("ground reflection applies the matching fresnel coefficient")
{
    Material m = rooms::concrete();
    m.rel_permittivity_real = 4.0;
    m.rel_permittivity_imag = 0.0;
    const Scene scene = ground(m);
    const AccelStructure accel(scene);
    TraceLimits lim;
    lim.max_reflections = 1;
    const Vec3 tx(0, 0, 2), rx(6, 0, 1);
    const auto paths = trace(scene, accel, {tx}, {rx}, geodesic_directions(32), lim);
    REQUIRE(paths.size() == 2);
    const PathRecord &refl = paths[1];
    REQUIRE(refl.interactions.size() == 1);
    const double len = std::hypot(6.0, 3.0);
    CHECK(refl.unfolded_length == doctest::Approx(len).epsilon(1e-12));
    const double th = std::atan2(6.0, 3.0);
    const double f = 10.0, lambda = wavelength_m(f);
    const double c = std::cos(th), s2 = std::sin(th) * std::sin(th);
    const double root = std::sqrt(4.0 - s2);
    const double g_tm = (root - 4.0 * c) / (root + 4.0 * c);
    const double g_te = (c - root) / (c + root);
    // theta_hat launch lies in the plane of incidence
    const auto e_tm = path_field(refl, f, AtmosphericRates{}, scene);
    CHECK(e_tm.vector().norm() == doctest::Approx(std::abs(g_tm) * lambda / (4 * kPi * len)).epsilon(1e-9));
    // phi_hat launch is perpendicular to it
    const CVec3 launch = phi_hat(refl.departure_dir).cast<cplx>();
    const auto e_te = path_field(refl, f, AtmosphericRates{}, scene, launch);
    CHECK(e_te.vector().norm() == doctest::Approx(std::abs(g_te) * lambda / (4 * kPi * len)).epsilon(1e-9));
    // Field stays transverse to the arrival direction
    CHECK(std::abs(e_tm.vector().dot(refl.arrival_dir.cast<cplx>())) < 1e-15);
}

TEST_CASE("polarized field round trip")
{
    PolarizedField p;
    p.direction = Vec3(0.2, 0.5, -0.3).normalized();
    p.e_theta = cplx(0.3, -0.1);
    p.e_phi = cplx(-0.7, 0.25);
    const auto q = PolarizedField::from_vector(p.vector(), p.direction);
    CHECK(std::abs(q.e_theta - p.e_theta) < 1e-15);
    CHECK(std::abs(q.e_phi - p.e_phi) < 1e-15);
}
