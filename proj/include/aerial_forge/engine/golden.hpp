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
#include <span>
#include <string>
#include <vector>

#include "aerial_forge/engine/engine.hpp"

namespace aerial_forge::engine {

// .aergv layout (little-endian):
//   "AERG" | u32 version | u32 count
//   | count x { u32 input_spec_id | u32 output_spec_id
//               | u32 n_in | float32[n_in] | u32 n_out | float32[n_out] }
//   | u32 crc32(all preceding bytes)
inline constexpr std::uint32_t kGoldenVersion = 1;

struct GoldenVector {
    std::uint32_t input_spec_id = 0;  // engine input index (always 0)
    std::uint32_t output_spec_id = 0; // index into Engine::outputs()
    std::vector<float> input;
    std::vector<float> expected;
};

struct GoldenVectors {
    std::vector<GoldenVector> vectors;
    double rel_tol = 1e-4;
    double abs_tol = 1e-5;
};

std::vector<std::uint8_t> serialize_golden(const GoldenVectors& golden);
GoldenVectors parse_golden(std::span<const std::uint8_t> bytes);
GoldenVectors load_golden_file(const std::filesystem::path& path);

struct VectorReport {
    std::size_t index = 0;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    bool passed = false;
};

struct GoldenReport {
    std::vector<VectorReport> vectors;
    bool passed = true;
    bool vacuous = false; // no vectors were checked
    std::size_t failures() const;
    std::string str() const;
};

// An element passes when |got - want| <= abs_tol + rel_tol * |want|.
// Throws SpecMismatch if a vector does not fit the engine's I/O specs.
GoldenReport verify_golden(const Engine& engine, const GoldenVectors& golden);

} // namespace aerial_forge::engine
