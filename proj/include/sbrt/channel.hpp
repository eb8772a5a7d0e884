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

#include "sbrt/propagation.hpp"
#include "sbrt/tracer.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sbrt
{

struct Angles
{
    double azimuth = 0.0;   // degrees, atan2(y, x)
    double elevation = 0.0; // degrees above the xy plane
};

Angles direction_angles(const Vec3 &direction);

struct MPC
{
    double amplitude = 0.0; // |E_n|, V/m
    double delay = 0.0;     // s
    double phase = 0.0;     // psi_n, radians; the tap is A_n exp(-j psi_n)
    Angles aod;
    Angles aoa; // direction towards which the rx looks to see the path
    std::uint32_t tx_index = 0;
    std::uint32_t rx_index = 0;
    CVec3 field = CVec3::Zero();
};

// Reference polarisation used to turn a vector field into a scalar phase:
// the theta_hat direction of a horizontal ray, i.e. -z.
Vec3 reference_polarization();

// Phase of the projection of `e` on the reference polarisation; falls back
// to the dominant Cartesian component when that projection is negligible.
double field_phase(const CVec3 &e);

MPC make_mpc(const PathRecord &path, const PolarizedField &field);

// |sum of the vector fields|; 0 for an empty list.
double coherent_sum(const std::vector<PolarizedField> &fields);
CVec3 coherent_vector_sum(const std::vector<PolarizedField> &fields);

// P = lambda^2 beta / (8 pi eta0) * Er^2
double received_power(double er, double wavelength, double beta = 1.0);

// Reference power of the unit launch field (Er = 1).
double reference_power(double wavelength, double beta = 1.0);

// -10 log10(P_rx / P_ref); +infinity when P_rx is zero ("blocked").
double path_loss_db(double reference_power_w, double received_power_w);

struct CirTap
{
    double delay = 0.0;
    cplx value;
    bool cancelled = false; // parts summed to (numerically) zero
};

// Sparse taps sorted by delay; taps within 1 ps are merged.
std::vector<CirTap> cir(const std::vector<MPC> &mpcs);

// Power-weighted RMS spread of delays with P_n = A_n^2. Throws
// UndefinedValueError when the total power is zero.
double rms_delay_spread(const std::vector<MPC> &mpcs);

struct MeanAngles
{
    Angles aod;
    Angles aoa;
};

// Circular mean of azimuths, arithmetic mean of elevations, weights A_n^2.
MeanAngles mean_angles(const std::vector<MPC> &mpcs);

struct PdpBin
{
    double delay = 0.0; // bin start, s
    double power = 0.0; // W
};

std::vector<PdpBin> pdp(const std::vector<MPC> &mpcs, double bin_width_s, double wavelength, double beta = 1.0);

using ChannelMatrix = Eigen::MatrixXcd;

// h_qp = sqrt(P_qp) exp(i theta_qp), row-major (q * n_t + p) inputs.
ChannelMatrix channel_matrix(std::size_t n_r, std::size_t n_t, const std::vector<double> &power,
                             const std::vector<double> &phase);

// log2 det(I + snr / N_t * W) with H normalised to ||H||_F^2 = N_t N_r.
// W = H H^H when N_t >= N_r, else H^H H.
double capacity(const ChannelMatrix &h, double snr);

// Same with an explicit choice of W (for consistency checks).
double capacity_with_gram(const ChannelMatrix &h, double snr, bool use_h_hh);

} // namespace sbrt
