/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The aerial-forge Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aerial_forge/core/grid.hpp"
#include "aerial_forge/linklevel/grid_config.hpp"

namespace aerial_forge::linklevel {

// One slot of a block-fading tapped delay line.
struct ChannelRealization {
    std::vector<cf64> gains;
    std::vector<double> delays_s;
    double doppler_hz = 0.0;
    std::uint64_t slot_index = 0;
};

inline constexpr std::size_t kJakesSinusoids = 32;

// Sum-of-sinusoids Rayleigh fading per tap: for tap l,
//   g_l(t) = sqrt(p_l / M) sum_m exp(j (2 pi f_d cos(a_lm) t + phi_lm)),
// t = slot_index * slot_duration_s, angles and phases drawn from `seed`.
// Pure in (seed, slot_index); f_d = 0 gives the same gains for every slot.
ChannelRealization gen_tdl_channel(const TdlProfile& profile, double doppler_hz, std::uint64_t slot_index,
                                   std::uint64_t seed, double slot_duration_s = kSlotDurationS);

// H[k] = sum_i g_i exp(-j 2 pi f_k tau_i), f_k = (k - N/2) scs.
std::vector<cf64> cir_to_cfr(const ChannelRealization& taps, const GridConfig& grid);

// (n_dmrs, 6 n_prb) pilots from {1, j, -1, -j}.
ComplexGrid gen_dmrs(std::uint64_t seed, const GridConfig& grid);

// Gray-mapped square QAM with unit average energy (38.211 tables); bit
// count must be a multiple of log2(order) (LengthError).
std::vector<cf32> modulate(std::span<const std::uint8_t> bits, int order);
// Constellation point for each bit label (first bit is the MSB of the
// label), in double precision.
std::vector<cf64> qam_constellation(int order);
// Hard decision, per axis.
std::vector<std::uint8_t> demodulate(std::span<const cf32> symbols, int order);

} // namespace aerial_forge::linklevel
