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
#include "aerial_forge/harness/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "aerial_forge/core/error.hpp"
#include "aerial_forge/linklevel/simulator.hpp"

namespace aerial_forge::harness {

std::vector<double> parse_snr_spec(const std::string& text)
{
    auto number = [&](const std::string& tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (tok.empty() || used != tok.size() || !std::isfinite(v))
            raise(ErrorCode::ConfigError, "bad SNR value '" + tok + "' in '" + text + "'");
        return v;
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string p;
        while (std::getline(ss, p, ':')) parts.push_back(p);
        if (parts.size() != 3) raise(ErrorCode::ConfigError, "SNR range must be lo:hi:step, got '" + text + "'");
        const double lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
        if (!(step > 0.0)) raise(ErrorCode::ConfigError, "SNR step must be > 0");
        if (hi < lo) raise(ErrorCode::ConfigError, "SNR range is empty");
        // Index-based so 0:20:5 gives exactly 0, 5, 10, 15, 20.
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        if (n > 100000) raise(ErrorCode::ConfigError, "SNR range has too many points");
        for (std::size_t i = 0; i < n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    } else {
        std::stringstream ss(text);
        std::string p;
        while (std::getline(ss, p, ',')) out.push_back(number(p));
    }
    if (out.empty()) raise(ErrorCode::ConfigError, "no SNR values given");
    return out;
}

std::size_t worker_count()
{
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("AERIAL_FORGE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) n = static_cast<std::size_t>(v);
    }
    return n;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body)
{
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; !failed && (i = next.fetch_add(1)) < n;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!first) first = std::current_exception();
                    failed = true;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

std::vector<ResultRow> run_sweep(const RunConfig& cfg)
{
    require(cfg.slots >= 1, ErrorCode::ConfigError, "slots must be >= 1");
    require(!cfg.snrs.empty(), ErrorCode::ConfigError, "no SNR values given");

    graph::DimOverrides dims;
    if (cfg.prb) {
        require(*cfg.prb >= 1, ErrorCode::ConfigError, "--prb must be >= 1");
        const auto p = static_cast<std::int64_t>(*cfg.prb);
        dims = {{"n_prb", p}, {"F_dmrs", 6 * p}, {"n_sc", 12 * p}};
    }
    auto base = graph::load_manifest(cfg.manifest, dims);
    const auto grid = linklevel::grid_from_manifest(base);
    auto channel = linklevel::channel_from_manifest(base);
    if (cfg.profile) channel.profile = *cfg.profile;
    if (cfg.delay_spread_ns) channel.delay_spread_s = *cfg.delay_spread_ns * 1e-9;
    if (cfg.speed_mps) channel.speed_mps = *cfg.speed_mps;
    try {
        (void)channel.tdl();
    } catch (const Error& e) {
        raise(ErrorCode::ConfigError, e.what());
    }
    if (cfg.model_dir) {
        require(base.estimator.has_value(), ErrorCode::ConfigError, "--model-dir needs an estimator section");
        base.estimator->model_dir = std::filesystem::absolute(*cfg.model_dir).string();
    }

    std::vector<std::string> kinds = cfg.kinds;
    if (kinds.empty()) kinds.push_back(base.estimator ? base.estimator->kind : "graph");

    std::vector<ResultRow> rows;
    const std::size_t workers = worker_count();
    for (const auto& kind : kinds) {
        auto m = base;
        if (cfg.kinds.size() > 0) set_estimator_kind(m, kind);
        const auto rx = linklevel::Receiver::from_manifest(m, grid);
        for (double snr : cfg.snrs) {
            std::vector<linklevel::SlotMetrics> per(cfg.slots);
            const auto t0 = std::chrono::steady_clock::now();
            parallel_for(cfg.slots, workers,
                         [&](std::size_t i) { per[i] = linklevel::run_slot(grid, channel, rx, snr, cfg.seed, i); });
            const auto t1 = std::chrono::steady_clock::now();
            ResultRow r;
            r.kind = kind;
            r.snr_db = snr;
            r.slots = cfg.slots;
            for (const auto& s : per) {
                r.mse_dmrs += s.mse_dmrs;
                r.ber += s.ber;
                r.sinr_eff_db += s.sinr_eff_db;
                r.tput_proxy_bits += s.tput_proxy_bits;
            }
            const double n = static_cast<double>(cfg.slots);
            r.mse_dmrs /= n;
            r.ber /= n;
            r.sinr_eff_db /= n;
            r.tput_proxy_bits /= n;
            r.wall_time_ms = cfg.timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::vector<ResultRow> compare_rows(std::vector<ResultRow> rows, const std::vector<std::string>& kinds)
{
    require(kinds.size() >= 2, ErrorCode::ConfigError, "compare needs at least two kinds");
    auto rank = [&](const std::string& k) { return std::find(kinds.begin(), kinds.end(), k) - kinds.begin(); };
    std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
        if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
        return rank(a.kind) < rank(b.kind);
    });
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i;
        while (j < rows.size() && rows[j].snr_db == rows[i].snr_db) ++j;
        const double base = rows[i].tput_proxy_bits;
        for (std::size_t k = i; k < j; ++k)
            rows[k].tput_gain_pct = base != 0.0 ? 100.0 * (rows[k].tput_proxy_bits - base) / base : std::nan("");
        i = j;
    }
    return rows;
}

namespace {

std::string num(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

std::string format_csv(const std::vector<ResultRow>& rows, bool timing, bool with_gain)
{
    std::ostringstream os;
    os << kCsvHeaderComment << "\n";
    os << "kind,snr_db,slots,mse_dmrs,ber,sinr_eff_db,tput_proxy_bits,wall_time_ms";
    if (with_gain) os << ",tput_gain_pct";
    os << "\n";
    for (const auto& r : rows) {
        os << r.kind << "," << num(r.snr_db) << "," << r.slots << "," << num(r.mse_dmrs) << "," << num(r.ber) << ","
           << num(r.sinr_eff_db) << "," << num(r.tput_proxy_bits) << "," << (timing ? num(r.wall_time_ms) : "0");
        if (with_gain) os << "," << num(r.tput_gain_pct.value_or(std::nan("")));
        os << "\n";
    }
    return os.str();
}

std::string format_json(const std::vector<ResultRow>& rows, bool timing, bool with_gain)
{
    using nlohmann::ordered_json;
    auto val = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
    ordered_json doc;
    doc["format"] = "aerial-forge results";
    doc["version"] = 1;
    doc["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json j;
        j["kind"] = r.kind;
        j["snr_db"] = val(r.snr_db);
        j["slots"] = r.slots;
        j["mse_dmrs"] = val(r.mse_dmrs);
        j["ber"] = val(r.ber);
        j["sinr_eff_db"] = val(r.sinr_eff_db);
        j["tput_proxy_bits"] = val(r.tput_proxy_bits);
        j["wall_time_ms"] = timing ? val(r.wall_time_ms) : ordered_json(0);
        if (with_gain) j["tput_gain_pct"] = val(r.tput_gain_pct.value_or(std::nan("")));
        doc["rows"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

} // namespace aerial_forge::harness
