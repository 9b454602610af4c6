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
#include "aerial_forge/linklevel/tdl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "aerial_forge/core/error.hpp"

namespace aerial_forge::linklevel {

namespace {

// Normalized delay, power [dB].
const std::vector<TdlTap> kTdlA = {
    {0.0000, -13.4}, {0.3819, 0.0},   {0.4025, -2.2},  {0.5868, -4.0},  {0.4610, -6.0},  {0.5375, -8.2},
    {0.6708, -9.9},  {0.5750, -10.5}, {0.7618, -7.5},  {1.5375, -15.9}, {1.8978, -6.6},  {2.2242, -16.7},
    {2.1718, -12.4}, {2.4942, -15.2}, {2.5119, -10.8}, {3.0582, -11.3}, {4.0810, -12.7}, {4.4579, -16.2},
    {4.5695, -18.3}, {4.7966, -18.9}, {5.0066, -16.6}, {5.3043, -19.9}, {9.6586, -29.7},
};

const std::vector<TdlTap> kTdlB = {
    {0.0000, 0.0},   {0.1072, -2.2},  {0.2155, -4.0},  {0.2095, -3.2},  {0.2870, -9.8},  {0.2986, -1.2},
    {0.3752, -3.4},  {0.5055, -5.2},  {0.3681, -7.6},  {0.3697, -3.0},  {0.5700, -8.9},  {0.5283, -9.0},
    {1.1021, -4.8},  {1.2756, -5.7},  {1.5474, -7.5},  {1.7842, -1.9},  {2.0169, -7.6},  {2.8294, -12.2},
    {3.0219, -9.8},  {3.6187, -11.4}, {4.1067, -14.9}, {4.2790, -9.2},  {4.7834, -11.3},
};

const std::vector<TdlTap> kTdlC = {
    {0.0000, -4.4},  {0.2099, -1.2},  {0.2219, -3.5},  {0.2329, -5.2},  {0.2176, -2.5},  {0.6366, 0.0},
    {0.6448, -2.2},  {0.6560, -3.9},  {0.6584, -7.4},  {0.7935, -7.1},  {0.8213, -10.7}, {0.9336, -11.1},
    {1.2285, -5.1},  {1.3083, -6.8},  {2.1704, -8.7},  {2.7105, -13.2}, {4.2589, -13.9}, {4.6003, -13.9},
    {5.4902, -15.8}, {5.6077, -17.1}, {6.3065, -16.0}, {6.6374, -15.7}, {7.0427, -21.6}, {8.6523, -22.8},
};

} // namespace

std::vector<double> TdlProfile::delays_s() const
{
    std::vector<double> d;
    d.reserve(normalized_taps.size());
    for (const auto& t : normalized_taps) d.push_back(t.normalized_delay * delay_spread_s);
    return d;
}

std::vector<double> TdlProfile::powers() const
{
    std::vector<double> p;
    double total = 0.0;
    for (const auto& t : normalized_taps) {
        p.push_back(std::pow(10.0, t.power_db / 10.0));
        total += p.back();
    }
    for (auto& v : p) v /= total;
    return p;
}

double TdlProfile::max_excess_delay_s() const
{
    double lo = 0.0, hi = 0.0;
    if (!normalized_taps.empty()) lo = hi = normalized_taps.front().normalized_delay;
    for (const auto& t : normalized_taps) {
        lo = std::min(lo, t.normalized_delay);
        hi = std::max(hi, t.normalized_delay);
    }
    return (hi - lo) * delay_spread_s;
}

TdlProfile tdl_profile(std::string_view name, double delay_spread_s)
{
    require(delay_spread_s > 0.0 && std::isfinite(delay_spread_s), ErrorCode::InvalidArgument,
            "delay spread must be positive");
    std::string key;
    for (char c : name)
        if (c != '-' && c != '_') key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    TdlProfile p;
    p.delay_spread_s = delay_spread_s;
    if (key == "TDLA") {
        p.name = "TDL-A";
        p.normalized_taps = kTdlA;
    } else if (key == "TDLB") {
        p.name = "TDL-B";
        p.normalized_taps = kTdlB;
    } else if (key == "TDLC") {
        p.name = "TDL-C";
        p.normalized_taps = kTdlC;
    } else if (key == "AWGN") {
        p.name = "AWGN";
        p.normalized_taps = {{0.0, 0.0}};
        p.fading = false;
    } else {
        raise(ErrorCode::InvalidArgument, "unknown TDL profile '" + std::string(name) + "'");
    }
    return p;
}

std::vector<std::string> tdl_profile_names() { return {"TDL-A", "TDL-B", "TDL-C"}; }

} // namespace aerial_forge::linklevel
