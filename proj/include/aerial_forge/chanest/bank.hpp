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

#include <compare>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "aerial_forge/chanest/types.hpp"
#include "aerial_forge/core/tensor.hpp"
#include "aerial_forge/engine/engine.hpp"

namespace aerial_forge::chanest {

// Engine I/O names shared with the trainer.
inline constexpr std::string_view kCnnInput = "ls_input";
inline constexpr std::string_view kCnnOutput = "h_denoised";
inline constexpr std::string_view kSnrOutput = "snr_db";

std::vector<int> default_snr_grid();  // -10, -5, ..., 40
std::vector<int> default_prb_sizes(); // 1, 4, 16, 64, 272

struct ModelKey {
    int snr_bucket_db = 0;
    int prb_size = 0;
    auto operator<=>(const ModelKey&) const = default;
    std::string str() const;
};

// Immutable once populated; lookups are safe from any thread.
class ModelBank {
public:
    // snr_grid strictly increasing; prb_sizes distinct and positive.
    ModelBank(std::vector<int> snr_grid, std::vector<int> prb_sizes);

    // Checks the engine's I/O against (2, T, 6 * prb_size); BankError.
    void insert(ModelKey key, std::shared_ptr<const engine::Engine> engine);
    const engine::Engine& engine(ModelKey key) const;
    bool contains(ModelKey key) const { return engines_.count(key) != 0; }
    // BankError naming the first missing (bucket, size) pair.
    void check_complete() const;

    const std::vector<int>& snr_grid() const noexcept { return snr_grid_; }
    const std::vector<int>& prb_sizes() const noexcept { return prb_sizes_; } // descending
    std::size_t size() const noexcept { return engines_.size(); }
    // DMRS symbols per slot the engines were built for (0 while empty).
    std::size_t time_symbols() const noexcept { return time_symbols_; }

private:
    std::vector<int> snr_grid_;
    std::vector<int> prb_sizes_;
    std::size_t time_symbols_ = 0;
    std::map<ModelKey, std::shared_ptr<const engine::Engine>> engines_;
};

// Nearest bucket to the clamped estimate; an exact midpoint goes to the
// lower bucket. UnsupportedPrbSize when the bank has no such block size.
ModelKey select_model(double snr_est_db, int prb_block_size, const ModelBank& bank);

// Greedy largest-first cover of n PRBs; UnsupportedPrbSize when the sizes
// cannot cover n exactly.
std::vector<int> decompose_prbs(int n, const std::vector<int>& supported);

// Planar (2, T, width) engine input for columns [f0, f0 + width).
TensorValue pack_block(const ComplexGrid& h, std::size_t f0, std::size_t width);

// Runs the engine's snr_db head; SpecMismatch if it has none or the block
// does not fit the engine input.
double estimate_snr(const ComplexGrid& h_block, const engine::Engine& engine);

struct CnnResult {
    ComplexGrid h;
    double snr_est_db = 0.0;
    int snr_bucket_db = 0;
    std::vector<int> blocks;
};

CnnResult cnn_estimate(const LsEstimate& ls, const ModelBank& bank);

// bank.yaml
struct BankEntry {
    ModelKey key;
    std::string blob;
    std::string golden; // empty when absent
};

struct BankManifest {
    int version = 1;
    std::vector<int> snr_grid;
    std::vector<int> prb_sizes;
    std::vector<BankEntry> models;
};

inline constexpr const char* kBankFileName = "bank.yaml";

BankManifest parse_bank_manifest(const std::string& yaml_text);
std::string format_bank_manifest(const BankManifest& manifest);

// Loads every listed blob (and checks its goldens when `verify` is set);
// all failures are BankError naming the entry.
ModelBank load_bank(const std::filesystem::path& dir, bool verify = true);

} // namespace aerial_forge::chanest
