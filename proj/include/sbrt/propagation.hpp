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

#include "sbrt/atmosphere.hpp"
#include "sbrt/geometry.hpp"
#include "sbrt/tracer.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace sbrt
{

// All field quantities use an exp(+j*w*t) time dependence: a wave travelling
// a distance d picks up exp(-j*k*d), and lossy media have Im(eps_r) <= 0.

enum class Polarization
{
    te, // perpendicular (horizontal) to the plane of incidence
    tm  // parallel to the plane of incidence
};

// Air-to-material Fresnel coefficient. TE: (cos - root) / (cos + root);
// TM: (root - eps*cos) / (root + eps*cos), root = sqrt(eps - sin^2). With this
// TM sign both polarizations agree at normal incidence. theta_i >= pi/2
// returns the grazing limits -1 (TE) and +1 (TM).
cplx fresnel_reflection(cplx eps_r, double theta_i, Polarization pol);

// rho = exp(-g/2), g = (4*pi*sigma*cos(theta_i)/lambda)^2
double rayleigh_roughness_factor(double sigma, double theta_i, double wavelength);

cplx modified_reflection(cplx eps_r, double theta_i, Polarization pol, double sigma, double wavelength);

// Fresnel integrals C(z), S(z) with the pi/2 normalisation.
std::pair<double, double> fresnel_integrals(double z);

// UTD transition function F(X) = 2j sqrt(X) exp(jX) int_{sqrt X}^inf exp(-j t^2) dt
cplx utd_transition(double x);

struct UtdGeometry
{
    double interior_angle = 0.0; // wedge interior angle, radians; n = (2*pi - interior) / pi
    double phi_incident = 0.0;   // phi', measured from face 0 inside the exterior region
    double phi_diffracted = 0.0; // phi
    double beta0 = kPi / 2;      // angle between incident ray and edge
    double s_incident = 1.0;     // s', meters
    double s_diffracted = 1.0;   // s, meters
};

struct UtdResult
{
    cplx soft;        // D_s (Dirichlet, E parallel to the edge plane of incidence)
    cplx hard;        // D_h
    double spreading; // A = sqrt(s' / (s (s' + s)))
};

// Kouyoumjian-Pathak coefficients for a perfectly conducting wedge, spherical
// wave incidence.
UtdResult utd_diffraction(const UtdGeometry &geometry, double wavelength);

// ((1 + cos psi) / 2)^(alpha_R / 2)
double er_lobe_factor(int alpha_r, double cos_psi);

// Hemispherical integral of ((1 + cos psi_R) / 2)^alpha_R for a specular
// direction at theta_i from the normal, closed form.
double er_lobe_integral(int alpha_r, double theta_i);

// Scattered-to-incident field ratio at distance r_s for a patch of area
// `area`: S * sqrt(area * cos(theta_i) / F) * lobe / r_s. Directions point
// along propagation; `normal` faces the incident side.
double er_scattering(double scatter_coeff, int alpha_r, const Vec3 &incident_dir, const Vec3 &scattered_dir,
                     const Vec3 &normal, double area, double r_s);

// lambda / (4 pi d) * exp(-j 2 pi d / lambda); throws ValidationError for d <= 0
cplx free_space_attenuation(double distance, double wavelength);

// Spherical basis at a propagation direction k: theta_hat, phi_hat, k form
// a right-handed frame.
Vec3 theta_hat(const Vec3 &k);
Vec3 phi_hat(const Vec3 &k);

struct PolarizedField
{
    cplx e_theta{0.0, 0.0};
    cplx e_phi{0.0, 0.0};
    Vec3 direction = Vec3::UnitZ();

    CVec3 vector() const;
    static PolarizedField from_vector(const CVec3 &e, const Vec3 &direction);
};

// Field of one path at its receiver. The launch field is unit amplitude along
// theta_hat(departure) unless `launch` supplies another polarisation vector.
PolarizedField path_field(const PathRecord &path, double frequency_ghz, const AtmosphericRates &rates,
                          const Scene &scene, const std::optional<CVec3> &launch = std::nullopt);

PolarizedField path_field(const PathRecord &path, double frequency_ghz, const AtmosphereState &atmosphere,
                          const GasLineTable &table, const Scene &scene);

} // namespace sbrt
