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
#include "aerial_forge/linklevel/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aerial_forge/core/error.hpp"
#include "aerial_forge/core/random.hpp"

namespace aerial_forge::linklevel {

void GridConfig::validate() const
{
    require(n_prb >= 1, ErrorCode::InvalidArgument, "n_prb must be >= 1");
    require(scs_hz > 0.0, ErrorCode::InvalidArgument, "subcarrier spacing must be positive");
    require(!dmrs_symbols.empty(), ErrorCode::InvalidArgument, "at least one DMRS symbol is required");
    for (std::size_t i = 0; i < dmrs_symbols.size(); ++i) {
        require(dmrs_symbols[i] < n_symbols, ErrorCode::InvalidArgument, "DMRS symbol index outside the slot");
        require(i == 0 || dmrs_symbols[i] > dmrs_symbols[i - 1], ErrorCode::InvalidArgument,
                "DMRS symbols must be strictly increasing");
    }
    require(n_data_symbols >= 1 && n_data_symbols + dmrs_symbols.size() <= n_symbols, ErrorCode::InvalidArgument,
            "data and DMRS symbols do not fit in the slot");
    require(qam_order == 4 || qam_order == 16 || qam_order == 64, ErrorCode::InvalidArgument,
            "qam_order must be 4, 16 or 64");
    require(n_layers == 1, ErrorCode::InvalidArgument, "only one layer is supported");
}

std::vector<std::size_t> GridConfig::data_symbols() const
{
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < n_symbols && out.size() < n_data_symbols; ++s)
        if (std::find(dmrs_symbols.begin(), dmrs_symbols.end(), s) == dmrs_symbols.end()) out.push_back(s);
    return out;
}

int GridConfig::bits_per_symbol() const
{
    switch (qam_order) {
    case 4: return 2;
    case 16: return 4;
    case 64: return 6;
    default: raise(ErrorCode::InvalidArgument, "qam_order must be 4, 16 or 64");
    }
}

ChannelRealization gen_tdl_channel(const TdlProfile& profile, double doppler_hz, std::uint64_t slot_index,
                                   std::uint64_t seed, double slot_duration_s)
{
    ChannelRealization ch;
    ch.delays_s = profile.delays_s();
    const auto powers = profile.powers();
    ch.doppler_hz = doppler_hz;
    ch.slot_index = slot_index;
    const double t = static_cast<double>(slot_index) * slot_duration_s;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t l = 0; l < powers.size(); ++l) {
        if (!profile.fading) {
            ch.gains.push_back(std::sqrt(powers[l]));
            continue;
        }
        Rng rng(derive_seed(seed, {streams::channel, l}));
        cf64 g = 0.0;
        for (std::size_t m = 0; m < kJakesSinusoids; ++m) {
            const double angle = two_pi * rng.uniform();
            const double phase = two_pi * rng.uniform();
            g += std::polar(1.0, two_pi * doppler_hz * std::cos(angle) * t + phase);
        }
        ch.gains.push_back(g * std::sqrt(powers[l] / static_cast<double>(kJakesSinusoids)));
    }
    return ch;
}

std::vector<cf64> cir_to_cfr(const ChannelRealization& taps, const GridConfig& grid)
{
    const std::size_t N = grid.n_subcarriers();
    const double center = static_cast<double>(N / 2);
    std::vector<cf64> H(N);
    for (std::size_t k = 0; k < N; ++k) {
        const double f = (static_cast<double>(k) - center) * grid.scs_hz;
        cf64 acc = 0.0;
        for (std::size_t i = 0; i < taps.gains.size(); ++i)
            acc += taps.gains[i] * std::polar(1.0, -2.0 * std::numbers::pi * f * taps.delays_s[i]);
        H[k] = acc;
    }
    return H;
}

ComplexGrid gen_dmrs(std::uint64_t seed, const GridConfig& grid)
{
    // Gray order: 00 -> 1, 01 -> j, 11 -> -1, 10 -> -j.
    static const cf32 kPoints[4] = {{1.0f, 0.0f}, {0.0f, 1.0f}, {0.0f, -1.0f}, {-1.0f, 0.0f}};
    Rng rng(derive_seed(seed, {streams::dmrs}));
    ComplexGrid p(grid.n_dmrs(), grid.n_pilots());
    for (auto& v : p.flat()) {
        const int b0 = rng.bit();
        const int b1 = rng.bit();
        v = kPoints[b0 * 2 + b1];
    }
    return p;
}

namespace {

int bits_for_order(int order)
{
    switch (order) {
    case 4: return 2;
    case 16: return 4;
    case 64: return 6;
    default: raise(ErrorCode::InvalidArgument, "unsupported QAM order " + std::to_string(order));
    }
}

double qam_scale(int order) { return order == 4 ? std::sqrt(2.0) : order == 16 ? std::sqrt(10.0) : std::sqrt(42.0); }

// One axis of 38.211 QAM from bits c[0..k): sign from c0, then nested
// magnitudes L - (1 - 2 c_i) * (...).
double axis_value(const std::uint8_t* c, int k)
{
    double mag = 1.0;
    double level = 1.0;
    for (int i = k - 1; i >= 1; --i) {
        level *= 2.0;
        mag = level - (1.0 - 2.0 * c[i]) * mag;
    }
    return (1.0 - 2.0 * c[0]) * mag;
}

void axis_bits(double y, int k, std::uint8_t* c)
{
    c[0] = y < 0.0 ? 1 : 0;
    double r = std::abs(y);
    double level = static_cast<double>(1 << (k - 1));
    for (int i = 1; i < k; ++i) {
        c[i] = r > level ? 1 : 0;
        r = std::abs(r - level);
        level /= 2.0;
    }
}

} // namespace

std::vector<cf32> modulate(std::span<const std::uint8_t> bits, int order)
{
    const int m = bits_for_order(order);
    if (bits.size() % static_cast<std::size_t>(m) != 0)
        raise(ErrorCode::LengthError, std::to_string(bits.size()) + " bits is not a multiple of " + std::to_string(m));
    const int k = m / 2;
    const double scale = qam_scale(order);
    std::vector<cf32> out(bits.size() / static_cast<std::size_t>(m));
    std::uint8_t ci[3], cq[3];
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto* b = bits.data() + s * static_cast<std::size_t>(m);
        for (int i = 0; i < k; ++i) {
            ci[i] = b[2 * i] & 1u;
            cq[i] = b[2 * i + 1] & 1u;
        }
        out[s] = cf32(static_cast<float>(axis_value(ci, k) / scale), static_cast<float>(axis_value(cq, k) / scale));
    }
    return out;
}

std::vector<cf64> qam_constellation(int order)
{
    const int m = bits_for_order(order);
    const int k = m / 2;
    const double scale = qam_scale(order);
    std::vector<cf64> out(static_cast<std::size_t>(order));
    std::uint8_t ci[3], cq[3];
    for (int v = 0; v < order; ++v) {
        for (int i = 0; i < k; ++i) {
            ci[i] = static_cast<std::uint8_t>((v >> (m - 1 - 2 * i)) & 1);
            cq[i] = static_cast<std::uint8_t>((v >> (m - 2 - 2 * i)) & 1);
        }
        out[static_cast<std::size_t>(v)] = cf64(axis_value(ci, k) / scale, axis_value(cq, k) / scale);
    }
    return out;
}

std::vector<std::uint8_t> demodulate(std::span<const cf32> symbols, int order)
{
    const int m = bits_for_order(order);
    const int k = m / 2;
    const double scale = qam_scale(order);
    std::vector<std::uint8_t> out(symbols.size() * static_cast<std::size_t>(m));
    std::uint8_t ci[3], cq[3];
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        axis_bits(static_cast<double>(symbols[s].real()) * scale, k, ci);
        axis_bits(static_cast<double>(symbols[s].imag()) * scale, k, cq);
        auto* b = out.data() + s * static_cast<std::size_t>(m);
        for (int i = 0; i < k; ++i) {
            b[2 * i] = ci[i];
            b[2 * i + 1] = cq[i];
        }
    }
    return out;
}

} // namespace aerial_forge::linklevel
