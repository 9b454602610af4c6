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

#include <cstddef>
#include <utility>
#include <vector>

#include "aerial_forge/core/grid.hpp"

namespace aerial_forge::linklevel {
struct TdlProfile;
}

namespace aerial_forge::chanest {

inline constexpr std::size_t kSubcarriersPerPrb = 12;
// Comb-2 DMRS: pilots on even subcarriers, six per PRB.
inline constexpr std::size_t kPilotsPerPrb = 6;
inline constexpr std::size_t kPilotSpacing = 2;

// Rows are DMRS symbols, columns are pilot subcarriers.
struct DmrsObservation {
    ComplexGrid rx_pilots;
    ComplexGrid pilot_symbols;
    std::vector<std::size_t> dmrs_symbols; // slot symbol index per row
    std::size_t prb_count = 0;

    // (symbol index, subcarrier index) of element (t, f).
    std::pair<std::size_t, std::size_t> grid_coord(std::size_t t, std::size_t f) const
    {
        return {dmrs_symbols.at(t), kPilotSpacing * f};
    }
    // Throws InvalidArgument on shape or unit-modulus violations.
    void validate() const;
};

struct LsEstimate {
    ComplexGrid h_ls;
    double noise_var = 0.0;
};

struct ChannelEstimateGrid {
    ComplexGrid h; // (n_symbols, 12 * prb_count)
    double noise_var = 0.0;
};

struct PdpModel {
    struct Tap {
        double delay_s;
        double power; // linear
    };
    std::vector<Tap> taps; // ascending delay, powers sum to one

    void validate() const;

    // `n_taps` equal-power taps evenly spaced over [0, max_delay_s].
    static PdpModel uniform(double max_delay_s, std::size_t n_taps);
    static PdpModel from_tdl(const linklevel::TdlProfile& profile);
};

} // namespace aerial_forge::chanest
