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
#include <string>
#include <vector>

namespace aerial_forge::linklevel {

// .aeds layout (little-endian):
//   "AEDS" | u32 version | u64 count
//   | count x { u32 prb_size | f32 true_snr_db | u32 T | u32 F
//               | f32 ls_input[2 T F] | f32 target[2 T F] }
//   | u32 crc32(all preceding bytes)
// Planar payloads: plane 0 real, plane 1 imaginary, each (T, F) row-major.
inline constexpr std::uint32_t kDatasetVersion = 1;

struct DatasetRecord {
    std::uint32_t prb_size = 0;
    float true_snr_db = 0.0f;
    std::uint32_t T = 0;
    std::uint32_t F = 0;
    std::vector<float> ls_input;
    std::vector<float> target;
};

struct DatasetConfig {
    std::vector<int> prb_sizes = {1, 4, 16};
    std::vector<double> snr_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30, 35, 40};
    std::vector<std::string> profiles = {"TDL-A", "TDL-B", "TDL-C"};
    double min_delay_spread_s = 30e-9;
    double max_delay_spread_s = 1000e-9;
    std::vector<std::size_t> dmrs_symbols = {2};
    double speed_mps = 2.235;
    double carrier_hz = 3.5e9;
    std::uint64_t count = 1;
    std::uint64_t seed = 0;

    void validate() const; // InvalidArgument
};

struct DatasetSummary {
    std::uint64_t count = 0;
    std::uint32_t crc = 0; // the file's trailing checksum
};

// Record i depends only on (seed, i): prb size, SNR, profile and delay spread
// are drawn uniformly, the target is the CFR at the DMRS REs and the input is
// its LS estimate. Streamed to a temp file and renamed into place.
DatasetSummary generate_dataset(const DatasetConfig& config, const std::filesystem::path& out);
DatasetRecord make_dataset_record(const DatasetConfig& config, std::uint64_t index);

// Whole-file reader; BadMagic, UnsupportedVersion, CrcMismatch,
// MalformedHeader.
std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path);

} // namespace aerial_forge::linklevel
