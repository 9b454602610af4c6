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

#include <string>
#include <string_view>
#include <vector>

namespace aerial_forge::linklevel {

struct TdlTap {
    double normalized_delay;
    double power_db;
};

// Tapped-delay-line profile from the standard TDL-A/B/C tables; delays scale
// with delay_spread_s.
struct TdlProfile {
    std::string name;
    std::vector<TdlTap> normalized_taps; // table order
    double delay_spread_s = 300e-9;
    bool fading = true; // false: taps keep their mean amplitude (AWGN)

    std::vector<double> delays_s() const;
    // Linear tap powers normalized to sum to one.
    std::vector<double> powers() const;
    double max_excess_delay_s() const;
};

// "TDL-A", "TDL-B", "TDL-C" (case-insensitive, dash optional) or "AWGN", a
// single unit tap without fading; throws InvalidArgument otherwise.
TdlProfile tdl_profile(std::string_view name, double delay_spread_s = 300e-9);
std::vector<std::string> tdl_profile_names();

} // namespace aerial_forge::linklevel
