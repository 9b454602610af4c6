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

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace aerial_forge {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Counter-based stream derivation: the same (seed, counters...) always maps to
// the same 64-bit stream seed, independent of call order.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) noexcept;

// Stream identifiers used by the simulator and dataset generator.
namespace streams {
inline constexpr std::uint64_t channel = 0x43484e4cull;
inline constexpr std::uint64_t bits = 0x42495453ull;
inline constexpr std::uint64_t dmrs = 0x444d5253ull;
inline constexpr std::uint64_t noise = 0x4e4f4953ull;
inline constexpr std::uint64_t dataset = 0x44415441ull;
} // namespace streams

// std::mt19937_64 is fully specified by the standard; the distributions are
// not, so uniform and Gaussian draws are implemented here to keep every run
// bit-reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    // [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    int bit() { return static_cast<int>(engine_() >> 63); }
    double gaussian();
    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_gaussian(double variance = 1.0);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace aerial_forge
