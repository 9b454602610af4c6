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
#include "aerial_forge/linklevel/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/core/error.hpp"
#include "aerial_forge/core/random.hpp"
#include "aerial_forge/linklevel/channel.hpp"

namespace aerial_forge::linklevel {

namespace {
constexpr std::string_view kMagic = "AEDS";
}

void DatasetConfig::validate() const
{
    require(count >= 1, ErrorCode::InvalidArgument, "dataset count must be >= 1");
    require(!prb_sizes.empty() && !snr_db.empty() && !profiles.empty(), ErrorCode::InvalidArgument,
            "dataset needs PRB sizes, SNRs and profiles");
    for (int p : prb_sizes) require(p >= 1, ErrorCode::InvalidArgument, "dataset PRB sizes must be >= 1");
    for (double s : snr_db) require(std::isfinite(s), ErrorCode::InvalidArgument, "dataset SNRs must be finite");
    for (const auto& p : profiles) (void)tdl_profile(p);
    require(min_delay_spread_s > 0.0 && max_delay_spread_s >= min_delay_spread_s, ErrorCode::InvalidArgument,
            "bad delay-spread range");
    require(!dmrs_symbols.empty(), ErrorCode::InvalidArgument, "dataset needs DMRS symbols");
}

DatasetRecord make_dataset_record(const DatasetConfig& cfg, std::uint64_t index)
{
    Rng rng(derive_seed(cfg.seed, {streams::dataset, index}));
    GridConfig grid;
    grid.n_prb = static_cast<std::size_t>(cfg.prb_sizes[rng.below(cfg.prb_sizes.size())]);
    grid.dmrs_symbols = cfg.dmrs_symbols;
    const double snr = cfg.snr_db[rng.below(cfg.snr_db.size())];
    const auto& name = cfg.profiles[rng.below(cfg.profiles.size())];
    const double ds = rng.uniform(cfg.min_delay_spread_s, cfg.max_delay_spread_s);
    const auto profile = tdl_profile(name, ds);

    ChannelConfig ch;
    ch.speed_mps = cfg.speed_mps;
    ch.carrier_hz = cfg.carrier_hz;
    const auto taps = gen_tdl_channel(profile, ch.doppler_hz(), 0, rng.next_u64());
    const auto H = cir_to_cfr(taps, grid);
    const auto pilots = gen_dmrs(rng.next_u64(), grid);
    const double sigma = std::sqrt(std::pow(10.0, -snr / 10.0));

    DatasetRecord r;
    r.prb_size = static_cast<std::uint32_t>(grid.n_prb);
    r.true_snr_db = static_cast<float>(snr);
    r.T = static_cast<std::uint32_t>(grid.n_dmrs());
    r.F = static_cast<std::uint32_t>(grid.n_pilots());
    const std::size_t plane = std::size_t{r.T} * r.F;
    r.ls_input.resize(2 * plane);
    r.target.resize(2 * plane);
    for (std::size_t t = 0; t < r.T; ++t) {
        for (std::size_t f = 0; f < r.F; ++f) {
            const cf32 h = cf32(H[2 * f]);
            const cf32 p = pilots(t, f);
            const cf32 y = cf32(cf64(h) * cf64(p) + rng.complex_gaussian(1.0) * sigma);
            const cf32 ls = y / p;
            const std::size_t i = t * r.F + f;
            r.target[i] = h.real();
            r.target[plane + i] = h.imag();
            r.ls_input[i] = ls.real();
            r.ls_input[plane + i] = ls.imag();
        }
    }
    return r;
}

DatasetSummary generate_dataset(const DatasetConfig& cfg, const std::filesystem::path& out)
{
    cfg.validate();
    const auto tmp = out.string() + ".tmp";
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) raise(ErrorCode::IoError, "cannot write '" + tmp + "'");

    std::uint32_t crc = 0;
    auto emit = [&](ByteWriter& w) {
        crc = crc32(w.buffer(), crc);
        f.write(reinterpret_cast<const char*>(w.buffer().data()), static_cast<std::streamsize>(w.size()));
        if (!f) raise(ErrorCode::IoError, "write to '" + tmp + "' failed");
    };
    ByteWriter head;
    head.text(kMagic);
    head.u32(kDatasetVersion);
    head.u64(cfg.count);
    emit(head);
    for (std::uint64_t i = 0; i < cfg.count; ++i) {
        const auto r = make_dataset_record(cfg, i);
        ByteWriter w;
        w.u32(r.prb_size);
        w.f32(r.true_snr_db);
        w.u32(r.T);
        w.u32(r.F);
        w.floats(r.ls_input);
        w.floats(r.target);
        emit(w);
    }
    f.write(reinterpret_cast<const char*>(&crc), sizeof crc);
    f.close();
    if (!f) raise(ErrorCode::IoError, "write to '" + tmp + "' failed");
    std::error_code ec;
    std::filesystem::rename(tmp, out, ec);
    if (ec) raise(ErrorCode::IoError, "cannot rename '" + tmp + "' to '" + out.string() + "': " + ec.message());
    return {cfg.count, crc};
}

std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path)
{
    const auto bytes = read_file(path.string());
    if (bytes.size() < kMagic.size() || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
        raise(ErrorCode::BadMagic, "'" + path.string() + "' is not an .aeds dataset");
    ByteReader head(bytes, ErrorCode::MalformedHeader);
    (void)head.take(kMagic.size());
    const auto version = head.u32();
    if (version != kDatasetVersion)
        raise(ErrorCode::UnsupportedVersion, "dataset version " + std::to_string(version) + " is not supported");
    if (bytes.size() < 20) raise(ErrorCode::MalformedHeader, "dataset is truncated");
    const auto body = std::span(bytes).first(bytes.size() - 4);
    std::uint32_t stored;
    std::memcpy(&stored, bytes.data() + body.size(), 4);
    if (crc32(body) != stored) raise(ErrorCode::CrcMismatch, "dataset checksum does not match");

    ByteReader r(body, ErrorCode::MalformedHeader);
    (void)r.take(8);
    const auto count = r.u64();
    std::vector<DatasetRecord> out;
    for (std::uint64_t i = 0; i < count; ++i) {
        DatasetRecord rec;
        rec.prb_size = r.u32();
        rec.true_snr_db = r.f32();
        rec.T = r.u32();
        rec.F = r.u32();
        const std::uint64_t n = 2ull * rec.T * rec.F;
        if (n * 8 > r.remaining()) raise(ErrorCode::MalformedHeader, "dataset record overruns the file");
        rec.ls_input.resize(n);
        rec.target.resize(n);
        r.floats(rec.ls_input);
        r.floats(rec.target);
        out.push_back(std::move(rec));
    }
    if (r.remaining() != 0) raise(ErrorCode::MalformedHeader, "trailing bytes after the last dataset record");
    return out;
}

} // namespace aerial_forge::linklevel
