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

#include "sbrt/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace sbrt
{

Angles direction_angles(const Vec3 &d)
{
    const Vec3 u = d.normalized();
    return {std::atan2(u.y(), u.x()) * 180.0 / kPi, std::asin(std::clamp(u.z(), -1.0, 1.0)) * 180.0 / kPi};
}

Vec3 reference_polarization()
{
    return -Vec3::UnitZ();
}

double field_phase(const CVec3 &e)
{
    const Vec3 p = reference_polarization();
    const cplx proj = p.x() * e.x() + p.y() * e.y() + p.z() * e.z();
    if (std::abs(proj) > 1e-6 * e.norm())
        return std::arg(proj);
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(e[i]) > std::abs(e[best]))
            best = i;
    return std::arg(e[best]);
}

MPC make_mpc(const PathRecord &path, const PolarizedField &field)
{
    MPC m;
    m.field = field.vector();
    m.amplitude = m.field.norm();
    m.delay = path.unfolded_length / kSpeedOfLight;
    m.phase = -field_phase(m.field);
    m.aod = direction_angles(path.departure_dir);
    m.aoa = direction_angles(-path.arrival_dir);
    m.tx_index = path.tx_index;
    m.rx_index = path.rx_index;
    return m;
}

CVec3 coherent_vector_sum(const std::vector<PolarizedField> &fields)
{
    CVec3 sum = CVec3::Zero();
    for (const auto &f : fields)
        sum += f.vector();
    return sum;
}

double coherent_sum(const std::vector<PolarizedField> &fields)
{
    return coherent_vector_sum(fields).norm();
}

double received_power(double er, double wavelength, double beta)
{
    return wavelength * wavelength * beta / (8.0 * kPi * kFreeSpaceImpedance) * er * er;
}

double reference_power(double wavelength, double beta)
{
    return received_power(1.0, wavelength, beta);
}

double path_loss_db(double reference_power_w, double received_power_w)
{
    if (!(reference_power_w > 0.0))
        throw ValidationError("path_loss: reference power must be > 0");
    if (!(received_power_w > 0.0))
        return std::numeric_limits<double>::infinity();
    return -10.0 * std::log10(received_power_w / reference_power_w);
}

std::vector<CirTap> cir(const std::vector<MPC> &mpcs)
{
    std::vector<std::size_t> order(mpcs.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mpcs[a].delay < mpcs[b].delay; });

    std::vector<CirTap> taps;
    double magnitude_sum = 0.0;
    for (std::size_t i : order)
    {
        const MPC &m = mpcs[i];
        const cplx v = std::polar(m.amplitude, -m.phase);
        if (!taps.empty() && m.delay - taps.back().delay <= 1e-12)
        {
            taps.back().value += v;
            magnitude_sum += m.amplitude;
        }
        else
        {
            if (!taps.empty())
                taps.back().cancelled = std::abs(taps.back().value) <= 1e-12 * magnitude_sum;
            taps.push_back({m.delay, v, false});
            magnitude_sum = m.amplitude;
        }
    }
    if (!taps.empty())
        taps.back().cancelled = std::abs(taps.back().value) <= 1e-12 * magnitude_sum;
    return taps;
}

double rms_delay_spread(const std::vector<MPC> &mpcs)
{
    double p_sum = 0.0, first = 0.0;
    for (const auto &m : mpcs)
    {
        const double p = m.amplitude * m.amplitude;
        p_sum += p;
        first += p * m.delay;
    }
    if (!(p_sum > 0.0))
        throw UndefinedValueError("rms_delay_spread: total power is zero");
    const double mean = first / p_sum;
    double second = 0.0;
    for (const auto &m : mpcs)
    {
        const double dt = m.delay - mean;
        second += m.amplitude * m.amplitude * dt * dt;
    }
    return std::sqrt(second / p_sum);
}

MeanAngles mean_angles(const std::vector<MPC> &mpcs)
{
    double p_sum = 0.0;
    double ts = 0.0, tc = 0.0, te = 0.0, rs = 0.0, rc = 0.0, re = 0.0;
    for (const auto &m : mpcs)
    {
        const double p = m.amplitude * m.amplitude;
        p_sum += p;
        ts += p * std::sin(m.aod.azimuth * kPi / 180.0);
        tc += p * std::cos(m.aod.azimuth * kPi / 180.0);
        te += p * m.aod.elevation;
        rs += p * std::sin(m.aoa.azimuth * kPi / 180.0);
        rc += p * std::cos(m.aoa.azimuth * kPi / 180.0);
        re += p * m.aoa.elevation;
    }
    if (!(p_sum > 0.0))
        throw UndefinedValueError("mean_angles: total power is zero");
    auto circular = [](double s, double c) {
        const double a = std::atan2(s, c) * 180.0 / kPi;
        return a <= -180.0 ? a + 360.0 : a;
    };
    MeanAngles out;
    out.aod = {circular(ts, tc), te / p_sum};
    out.aoa = {circular(rs, rc), re / p_sum};
    // A single path reports its own angles exactly
    if (mpcs.size() == 1)
    {
        out.aod = mpcs[0].aod;
        out.aoa = mpcs[0].aoa;
    }
    return out;
}

std::vector<PdpBin> pdp(const std::vector<MPC> &mpcs, double bin_width_s, double wavelength, double beta)
{
    if (!(bin_width_s > 0.0))
        throw ValidationError("pdp_bin_ns must be > 0");
    std::map<long long, double> bins;
    for (const auto &m : mpcs)
    {
        const auto b = static_cast<long long>(std::floor(m.delay / bin_width_s));
        bins[b] += received_power(m.amplitude, wavelength, beta);
    }
    std::vector<PdpBin> out;
    out.reserve(bins.size());
    for (const auto &[b, p] : bins)
        out.push_back({static_cast<double>(b) * bin_width_s, p});
    return out;
}

ChannelMatrix channel_matrix(std::size_t n_r, std::size_t n_t, const std::vector<double> &power,
                             const std::vector<double> &phase)
{
    if (power.size() != n_r * n_t || phase.size() != n_r * n_t)
        throw ValidationError("channel_matrix: expected " + std::to_string(n_r * n_t) + " entries, got " +
                              std::to_string(power.size()) + " powers and " + std::to_string(phase.size()) +
                              " phases");
    ChannelMatrix h(n_r, n_t);
    for (std::size_t q = 0; q < n_r; ++q)
        for (std::size_t p = 0; p < n_t; ++p)
        {
            const double pw = power[q * n_t + p];
            if (!(pw >= 0.0) || !std::isfinite(pw))
                throw ValidationError("channel_matrix: powers must be finite and >= 0");
            h(q, p) = std::polar(std::sqrt(pw), phase[q * n_t + p]);
        }
    return h;
}

double capacity_with_gram(const ChannelMatrix &h, double snr, bool use_h_hh)
{
    if (!(snr >= 0.0) || !std::isfinite(snr))
        throw ValidationError("capacity: snr must be finite and >= 0");
    const double q = h.squaredNorm();
    if (!(q > 0.0))
        throw UndefinedValueError("capacity: channel matrix is all zero");
    const double n_r = static_cast<double>(h.rows());
    const double n_t = static_cast<double>(h.cols());
    const ChannelMatrix hn = h * std::sqrt(n_t * n_r / q);
    const ChannelMatrix w = use_h_hh ? ChannelMatrix(hn * hn.adjoint()) : ChannelMatrix(hn.adjoint() * hn);
    ChannelMatrix m = ChannelMatrix::Identity(w.rows(), w.cols()) + (snr / n_t) * w;
    // Hermitian positive definite: log det from the Cholesky factor
    Eigen::LLT<ChannelMatrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("capacity: Cholesky factorisation failed");
    double logdet = 0.0;
    const ChannelMatrix &l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        logdet += 2.0 * std::log(l(i, i).real());
    return logdet / std::log(2.0);
}

double capacity(const ChannelMatrix &h, double snr)
{
    return capacity_with_gram(h, snr, h.cols() >= h.rows());
}

} // namespace sbrt
