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
#include <string>
#include <vector>

#include "aerial_forge/linklevel/tdl.hpp"

namespace aerial_forge::linklevel {

struct GridConfig {
    std::size_t n_prb = 273;
    double scs_hz = 30e3;
    std::size_t n_symbols = 14;
    std::size_t n_data_symbols = 10;
    std::vector<std::size_t> dmrs_symbols = {2};
    int qam_order = 4; // 4, 16 or 64
    std::size_t n_layers = 1;

    void validate() const; // InvalidArgument

    std::size_t n_subcarriers() const noexcept { return 12 * n_prb; }
    std::size_t n_pilots() const noexcept { return 6 * n_prb; }
    std::size_t n_dmrs() const noexcept { return dmrs_symbols.size(); }
    // The first n_data_symbols symbols that carry no DMRS.
    std::vector<std::size_t> data_symbols() const;
    std::size_t data_re_count() const noexcept { return n_data_symbols * n_subcarriers(); }
    int bits_per_symbol() const;
};

inline constexpr double kSlotDurationS = 0.5e-3; // 30 kHz numerology
inline constexpr double kSpeedOfLight = 299792458.0;

struct ChannelConfig {
    std::string profile = "TDL-C";
    double delay_spread_s = 300e-9;
    double speed_mps = 2.235; // 5 mph
    double carrier_hz = 3.5e9;
    double slot_duration_s = kSlotDurationS;

    double doppler_hz() const noexcept { return speed_mps * carrier_hz / kSpeedOfLight; }
    TdlProfile tdl() const { return tdl_profile(profile, delay_spread_s); }
};

} // namespace aerial_forge::linklevel
