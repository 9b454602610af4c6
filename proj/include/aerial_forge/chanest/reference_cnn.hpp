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
#include <filesystem>
#include <vector>

#include "aerial_forge/engine/engine.hpp"
#include "aerial_forge/engine/golden.hpp"

namespace aerial_forge::chanest {

inline constexpr std::uint32_t kReferenceWidth = 32;

// Identity: the main path reproduces its input exactly and the SNR head is a
// constant equal to the bucket. Zero: every weight is zero. Random: small
// seeded weights.
enum class ReferenceInit { Identity, Zero, Random };

ReferenceInit reference_init_from_string(std::string_view text);

// conv_in(2->32) relu, two residual blocks x + conv_b(relu(conv_a(x))),
// conv_out(32->2); snr head dense(2*T*F -> 1) on the input.
engine::EngineDefinition reference_cnn(std::size_t time_symbols, std::size_t pilots, ReferenceInit init,
                                       std::uint64_t seed, engine::ModelMeta meta);

// Weights on the conv path only (every conv layer, not the SNR head).
std::size_t main_path_weight_count(const engine::EngineDefinition& def);

// Golden vectors on `count` seeded random inputs for every engine output.
engine::GoldenVectors make_golden(const engine::Engine& engine, std::size_t count, std::uint64_t seed);

// Writes one blob + golden per (bucket, size) and bank.yaml into `dir`.
void write_reference_bank(const std::filesystem::path& dir, const std::vector<int>& snr_grid,
                          const std::vector<int>& prb_sizes, std::size_t time_symbols, ReferenceInit init,
                          std::uint64_t seed, std::size_t golden_count = 16);

} // namespace aerial_forge::chanest
