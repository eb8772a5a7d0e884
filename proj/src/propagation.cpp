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

#include <algorithm>
#include <cmath>

namespace sbrt
{

namespace
{

constexpr cplx kJ{0.0, 1.0};

cplx cdot(const Vec3 &v, const CVec3 &e)
{
    return v.x() * e.x() + v.y() * e.y() + v.z() * e.z();
}

CVec3 to_complex(const Vec3 &v)
{
    return v.cast<cplx>();
}

double wrap_angle(double a)
{
    return a < 0.0 ? a + 2.0 * kPi : a;
}

} // namespace

cplx fresnel_reflection(cplx eps_r, double theta_i, Polarization pol)
{
    if (eps_r == cplx(1.0, 0.0))
        return 0.0;
    if (theta_i >= kPi / 2)
        return pol == Polarization::te ? -1.0 : 1.0;
    const double c = std::cos(theta_i);
    const double s = std::sin(theta_i);
    const cplx root = std::sqrt(eps_r - s * s);
    if (pol == Polarization::te)
        return (c - root) / (c + root);
    return (root - eps_r * c) / (root + eps_r * c);
}

double rayleigh_roughness_factor(double sigma, double theta_i, double wavelength)
{
    const double x = 4.0 * kPi * sigma * std::cos(theta_i) / wavelength;
    return std::exp(-0.5 * x * x);
}

cplx modified_reflection(cplx eps_r, double theta_i, Polarization pol, double sigma, double wavelength)
{
    return rayleigh_roughness_factor(sigma, theta_i, wavelength) * fresnel_reflection(eps_r, theta_i, pol);
}

namespace
{

// Returns G(z) = int_z^inf exp(j pi t^2 / 2) dt = (1/2 - C) + j (1/2 - S), z >= 0.
cplx fresnel_complement(double z)
{
    constexpr double kEps = 1e-16;
    constexpr double kFpMin = 1e-300;
    constexpr int kMaxIt = 200;
    if (z <= 1.5)
    {
        const auto [c, s] = fresnel_integrals(z);
        return {0.5 - c, 0.5 - s};
    }
    // Continued fraction (modified Lentz) for the complementary error function
    const double pix2 = kPi * z * z;
    cplx b(1.0, -pix2);
    cplx cc(1.0 / kFpMin, 0.0);
    cplx d = 1.0 / b;
    cplx h = d;
    int n = -1;
    for (int k = 2; k <= kMaxIt; ++k)
    {
        n += 2;
        const double a = -static_cast<double>(n) * (n + 1);
        b += 4.0;
        d = 1.0 / (a * d + b);
        cc = b + a / cc;
        const cplx del = cc * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps)
            break;
    }
    h *= cplx(z, -z);
    return cplx(0.5, 0.5) * std::polar(1.0, 0.5 * pix2) * h;
}

} // namespace

std::pair<double, double> fresnel_integrals(double z)
{
    constexpr double kEps = 1e-16;
    constexpr int kMaxIt = 200;
    const double ax = std::abs(z);
    double c = 0.0, s = 0.0;
    if (ax < 1e-150)
    {
        c = ax;
    }
    else if (ax <= 1.5)
    {
        // Power series
        double sum = 0.0, sums = 0.0, sumc = ax;
        double sign = 1.0;
        const double fact = kPi / 2 * ax * ax;
        bool odd = true;
        double term = ax;
        int n = 3;
        for (int k = 1; k <= kMaxIt; ++k)
        {
            term *= fact / k;
            sum += sign * term / n;
            const double test = std::abs(sum) * kEps;
            if (odd)
            {
                sign = -sign;
                sums = sum;
                sum = sumc;
            }
            else
            {
                sumc = sum;
                sum = sums;
            }
            if (term < test)
                break;
            odd = !odd;
            n += 2;
        }
        s = sums;
        c = sumc;
    }
    else
    {
        const cplx g = fresnel_complement(ax);
        c = 0.5 - g.real();
        s = 0.5 - g.imag();
    }
    if (z < 0.0)
    {
        c = -c;
        s = -s;
    }
    return {c, s};
}

cplx utd_transition(double x)
{
    if (!(x > 0.0))
        return 0.0;
    const double sx = std::sqrt(x);
    const cplx g = fresnel_complement(sx * std::sqrt(2.0 / kPi));
    return 2.0 * kJ * sx * std::polar(1.0, x) * std::sqrt(kPi / 2) * std::conj(g);
}

UtdResult utd_diffraction(const UtdGeometry &geo, double wavelength)
{
    if (!(geo.interior_angle >= 0.0 && geo.interior_angle < kPi))
        throw ValidationError("utd: wedge interior angle must lie in [0, pi)");
    if (!(geo.s_incident > 0.0) || !(geo.s_diffracted > 0.0))
        throw ValidationError("utd: distances must be > 0");
    const double n = (2.0 * kPi - geo.interior_angle) / kPi;
    const double k = 2.0 * kPi / wavelength;
    const double sb = std::sin(geo.beta0);
    const double L = geo.s_incident * geo.s_diffracted * sb * sb / (geo.s_incident + geo.s_diffracted);
    const cplx e_pi4 = std::polar(1.0, kPi / 4);

    // cot((pi + sign*beta) / 2n) * F(k L a^sign(beta))
    auto term = [&](double beta, int sign) -> cplx {
        const double N = std::round((beta + sign * kPi) / (2.0 * kPi * n));
        const double eps = sign > 0 ? kPi + beta - 2.0 * kPi * n * N : kPi - beta + 2.0 * kPi * n * N;
        if (std::abs(eps) < 1e-6)
        {
            const double sg = eps > 0.0 ? 1.0 : (eps < 0.0 ? -1.0 : 0.0);
            return n * (std::sqrt(2.0 * kPi * k * L) * sg - 2.0 * k * L * eps * e_pi4) * e_pi4;
        }
        const double c = std::cos((2.0 * n * kPi * N - beta) / 2.0);
        const double a = 2.0 * c * c;
        return utd_transition(k * L * a) / std::tan((kPi + sign * beta) / (2.0 * n));
    };

    const double bm = geo.phi_diffracted - geo.phi_incident;
    const double bp = geo.phi_diffracted + geo.phi_incident;
    const cplx incident_part = term(bm, +1) + term(bm, -1);
    const cplx reflected_part = term(bp, +1) + term(bp, -1);
    const cplx pre = -std::polar(1.0, -kPi / 4) / (2.0 * n * std::sqrt(2.0 * kPi * k) * sb);

    UtdResult r;
    r.soft = pre * (incident_part - reflected_part);
    r.hard = pre * (incident_part + reflected_part);
    r.spreading =
        std::sqrt(geo.s_incident / (geo.s_diffracted * (geo.s_incident + geo.s_diffracted)));
    return r;
}

double er_lobe_factor(int alpha_r, double cos_psi)
{
    return std::pow(std::max(0.0, (1.0 + cos_psi) / 2.0), 0.5 * alpha_r);
}

double er_lobe_integral(int alpha_r, double theta_i)
{
    const double ct = std::cos(theta_i);
    const double st2 = std::sin(theta_i) * std::sin(theta_i);
    double total = 0.0;
    double binom = 1.0; // C(alpha_r, j)
    for (int j = 0; j <= alpha_r; ++j)
    {
        double ij = 2.0 * kPi / (j + 1);
        if (j % 2 == 1)
        {
            double sum = 0.0;
            double central = 1.0; // C(2w, w) / 4^w
            double pw = 1.0;      // sin^{2w}
            for (int w = 0; w <= (j - 1) / 2; ++w)
            {
                sum += central * pw;
                central *= (2.0 * w + 1.0) * (2.0 * w + 2.0) / ((w + 1.0) * (w + 1.0) * 4.0);
                pw *= st2;
            }
            ij *= ct * sum;
        }
        total += binom * ij;
        binom = binom * (alpha_r - j) / (j + 1);
    }
    return total / std::pow(2.0, alpha_r);
}

double er_scattering(double scatter_coeff, int alpha_r, const Vec3 &incident_dir, const Vec3 &scattered_dir,
                     const Vec3 &normal, double area, double r_s)
{
    if (scatter_coeff <= 0.0 || !(r_s > 0.0) || !(area > 0.0))
        return 0.0;
    const Vec3 nrm = normal.dot(incident_dir) > 0.0 ? Vec3(-normal) : normal;
    const double cos_i = -incident_dir.dot(nrm);
    if (!(cos_i > 0.0) || !(scattered_dir.dot(nrm) > 0.0))
        return 0.0;
    const Vec3 specular = incident_dir - 2.0 * incident_dir.dot(nrm) * nrm;
    const double lobe = er_lobe_factor(alpha_r, specular.dot(scattered_dir));
    const double f = er_lobe_integral(alpha_r, std::acos(std::min(1.0, cos_i)));
    return scatter_coeff * std::sqrt(area * cos_i / f) * lobe / r_s;
}

cplx free_space_attenuation(double distance, double wavelength)
{
    if (!(distance > 0.0))
        throw ValidationError("free_space_attenuation: distance must be > 0");
    return wavelength / (4.0 * kPi * distance) * std::polar(1.0, -2.0 * kPi * distance / wavelength);
}

Vec3 theta_hat(const Vec3 &k)
{
    const double theta = std::acos(std::clamp(k.z(), -1.0, 1.0));
    const double phi = std::atan2(k.y(), k.x());
    return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta)};
}

Vec3 phi_hat(const Vec3 &k)
{
    const double phi = std::atan2(k.y(), k.x());
    return {-std::sin(phi), std::cos(phi), 0.0};
}

CVec3 PolarizedField::vector() const
{
    return e_theta * to_complex(theta_hat(direction)) + e_phi * to_complex(phi_hat(direction));
}

PolarizedField PolarizedField::from_vector(const CVec3 &e, const Vec3 &direction)
{
    PolarizedField f;
    f.direction = direction;
    f.e_theta = cdot(theta_hat(direction), e);
    f.e_phi = cdot(phi_hat(direction), e);
    return f;
}

namespace
{

CVec3 reflect_field(const CVec3 &e, const Vec3 &d_in, const Vec3 &d_out, const Interaction &it, const Material &mat,
                    double frequency_ghz)
{
    const double lambda = wavelength_m(frequency_ghz);
    Vec3 n = it.surface_normal;
    if (n.dot(d_in) > 0.0)
        n = -n;
    const double theta = std::acos(std::min(1.0, -d_in.dot(n)));
    Vec3 e_perp = d_in.cross(n);
    if (e_perp.norm() < 1e-12)
        e_perp = n.unitOrthogonal();
    e_perp.normalize();
    const Vec3 e_par_i = e_perp.cross(d_in);
    const Vec3 e_par_r = d_out.cross(e_perp);
    const cplx eps = mat.permittivity(frequency_ghz);
    const double keep = std::sqrt(std::max(0.0, 1.0 - mat.scattering_coeff * mat.scattering_coeff));
    const cplx rte = keep * modified_reflection(eps, theta, Polarization::te, mat.roughness_sigma, lambda);
    const cplx rtm = keep * modified_reflection(eps, theta, Polarization::tm, mat.roughness_sigma, lambda);
    return rte * cdot(e_perp, e) * to_complex(e_perp) + rtm * cdot(e_par_i, e) * to_complex(e_par_r);
}

CVec3 diffract_field(const CVec3 &e, const Vec3 &d_in, const Vec3 &d_out, const Interaction &it, double s_in,
                     double s_out, double wavelength)
{
    const Vec3 &edge = it.edge_direction;
    const Vec3 &t0 = it.face_tangent;
    const Vec3 &n0 = it.surface_normal;
    auto azimuth = [&](const Vec3 &v) {
        const Vec3 w = v - v.dot(edge) * edge;
        return wrap_angle(std::atan2(w.dot(n0), w.dot(t0)));
    };
    UtdGeometry g;
    g.interior_angle = it.wedge_interior_angle;
    g.phi_incident = azimuth(-d_in);
    g.phi_diffracted = azimuth(d_out);
    g.beta0 = std::acos(std::clamp(d_in.dot(edge), -1.0, 1.0));
    g.s_incident = s_in;
    g.s_diffracted = s_out;
    const UtdResult d = utd_diffraction(g, wavelength);

    const Vec3 phi_i = -(edge.cross(d_in)).normalized();
    const Vec3 beta_i = phi_i.cross(d_in);
    const Vec3 phi_d = edge.cross(d_out).normalized();
    const Vec3 beta_d = phi_d.cross(d_out);
    return d.spreading *
           (-d.soft * cdot(beta_i, e) * to_complex(beta_d) - d.hard * cdot(phi_i, e) * to_complex(phi_d));
}

CVec3 scatter_field(const CVec3 &e, const Vec3 &d_in, const Vec3 &d_out, const Interaction &it, const Scene &scene,
                    double r_s)
{
    const Material &mat = scene.materials()[it.material_id];
    const Triangle &tri = scene.triangles()[it.triangle_id];
    const double amp =
        er_scattering(mat.scattering_coeff, mat.scattering_lobe_width, d_in, d_out, it.surface_normal, tri.area, r_s);
    if (amp == 0.0)
        return CVec3::Zero();
    CVec3 t = e - cdot(d_out, e) * to_complex(d_out);
    const double tn = t.norm();
    const double en = e.norm();
    if (tn < 1e-12 * en)
    {
        // Incident polarisation along the scattered direction: keep the
        // incident phase on theta_hat.
        const cplx ref = std::abs(e.x()) >= std::abs(e.y()) && std::abs(e.x()) >= std::abs(e.z())
                             ? e.x()
                             : (std::abs(e.y()) >= std::abs(e.z()) ? e.y() : e.z());
        return amp * en * std::polar(1.0, std::arg(ref)) * to_complex(theta_hat(d_out));
    }
    return amp * (en / tn) * t;
}

} // namespace

PolarizedField path_field(const PathRecord &path, double frequency_ghz, const AtmosphericRates &rates,
                          const Scene &scene, const std::optional<CVec3> &launch)
{
    const double lambda = wavelength_m(frequency_ghz);
    const double total = path.unfolded_length;
    if (!(total > 0.0))
        throw ValidationError("path_field: unfolded length must be > 0");

    CVec3 e = launch ? *launch : to_complex(theta_hat(path.departure_dir));
    bool spread = false;
    double travelled = 0.0;
    Vec3 d_in = path.departure_dir;
    const auto &inter = path.interactions;
    for (std::size_t j = 0; j < inter.size(); ++j)
    {
        travelled += path.segment_lengths.at(j);
        const Vec3 d_out =
            j + 1 < inter.size() ? Vec3((inter[j + 1].point - inter[j].point).normalized()) : path.arrival_dir;
        const Interaction &it = inter[j];
        switch (it.kind)
        {
        case InteractionKind::reflection:
            e = reflect_field(e, d_in, d_out, it, scene.materials().at(it.material_id), frequency_ghz);
            break;
        case InteractionKind::diffraction:
            if (!spread)
            {
                e *= lambda / (4.0 * kPi * travelled);
                spread = true;
            }
            e = diffract_field(e, d_in, d_out, it, travelled, total - travelled, lambda);
            break;
        case InteractionKind::scattering:
            if (!spread)
            {
                e *= lambda / (4.0 * kPi * travelled);
                spread = true;
            }
            e = scatter_field(e, d_in, d_out, it, scene, total - travelled);
            break;
        }
        d_in = d_out;
    }
    if (!spread)
        e *= lambda / (4.0 * kPi * total);
    e *= std::polar(1.0, -2.0 * kPi * total / lambda);

    if (rates.gamma_db_per_km != 0.0 || rates.phi_deg_per_km != 0.0)
    {
        const double d_km = total / 1000.0;
        const double amp = std::pow(10.0, -rates.gamma_db_per_km * d_km / 20.0);
        e *= amp * std::polar(1.0, rates.phi_deg_per_km * d_km * kPi / 180.0);
    }
    return PolarizedField::from_vector(e, path.arrival_dir);
}

PolarizedField path_field(const PathRecord &path, double frequency_ghz, const AtmosphereState &atmosphere,
                          const GasLineTable &table, const Scene &scene)
{
    return path_field(path, frequency_ghz, atmospheric_rates(frequency_ghz, atmosphere, table), scene);
}

} // namespace sbrt
