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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aerial_forge::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitParity = 4;

inline constexpr const char* kCsvHeaderComment = "# aerial-forge results v1";

struct RunConfig {
    std::filesystem::path manifest;
    std::size_t slots = 100;
    std::uint64_t seed = 0;
    std::vector<double> snrs;
    std::vector<std::string> kinds; // empty: the manifest's estimator kind
    bool timing = true;
    // Optional overrides of the manifest.
    std::optional<std::size_t> prb;
    std::optional<std::string> profile;
    std::optional<double> delay_spread_ns;
    std::optional<double> speed_mps;
    std::optional<std::string> model_dir;
};

struct ResultRow {
    std::string kind;
    double snr_db = 0.0;
    std::size_t slots = 0;
    double mse_dmrs = 0.0;
    double ber = 0.0;
    double sinr_eff_db = 0.0;
    double tput_proxy_bits = 0.0;
    double wall_time_ms = 0.0;
    std::optional<double> tput_gain_pct; // compare only
};

// "lo:hi:step" (inclusive, step > 0) or "a,b,c"; ConfigError otherwise.
std::vector<double> parse_snr_spec(const std::string& text);

// Worker count: AERIAL_FORGE_THREADS when set (>= 1), else the hardware
// concurrency.
std::size_t worker_count();
// Runs body(i) for i in [0, n) on up to `workers` threads; rethrows the
// first failure.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

// One row per (kind, snr), ordered by kind as listed, then SNR as given.
// Per-slot metrics are reduced in slot order, so the numbers do not depend
// on the thread count.
std::vector<ResultRow> run_sweep(const RunConfig& config);

// Adds tput_gain_pct against the first kind at each SNR and orders rows by
// SNR, then kind.
std::vector<ResultRow> compare_rows(std::vector<ResultRow> rows, const std::vector<std::string>& kinds);

std::string format_csv(const std::vector<ResultRow>& rows, bool timing, bool with_gain);
std::string format_json(const std::vector<ResultRow>& rows, bool timing, bool with_gain);

// The aerial-forge command line, callable in-process. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace aerial_forge::harness
