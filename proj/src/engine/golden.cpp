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
#include "aerial_forge/engine/golden.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/core/error.hpp"

namespace aerial_forge::engine {

namespace {
constexpr std::string_view kGoldenMagic = "AERG";
}

std::vector<std::uint8_t> serialize_golden(const GoldenVectors& golden)
{
    ByteWriter w;
    w.text(kGoldenMagic);
    w.u32(kGoldenVersion);
    w.u32(static_cast<std::uint32_t>(golden.vectors.size()));
    for (const auto& v : golden.vectors) {
        w.u32(v.input_spec_id);
        w.u32(v.output_spec_id);
        w.u32(static_cast<std::uint32_t>(v.input.size()));
        w.floats(v.input);
        w.u32(static_cast<std::uint32_t>(v.expected.size()));
        w.floats(v.expected);
    }
    w.u32(crc32(w.buffer()));
    return std::move(w.buffer());
}

GoldenVectors parse_golden(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kGoldenMagic.size() || std::memcmp(bytes.data(), kGoldenMagic.data(), kGoldenMagic.size()) != 0)
        raise(ErrorCode::BadMagic, "golden file does not start with 'AERG'");
    ByteReader head(bytes, ErrorCode::MalformedHeader);
    (void)head.take(kGoldenMagic.size());
    const auto version = head.u32();
    if (version != kGoldenVersion)
        raise(ErrorCode::UnsupportedVersion, "golden version " + std::to_string(version) + " is not supported");
    if (bytes.size() < 16) raise(ErrorCode::MalformedHeader, "golden file is truncated");

    const auto body = bytes.first(bytes.size() - 4);
    std::uint32_t stored;
    std::memcpy(&stored, bytes.data() + body.size(), 4);
    if (crc32(body) != stored) raise(ErrorCode::CrcMismatch, "golden file checksum does not match");

    ByteReader r(body, ErrorCode::MalformedHeader);
    (void)r.take(8);
    const auto count = r.u32();
    GoldenVectors g;
    for (std::uint32_t i = 0; i < count; ++i) {
        GoldenVector v;
        v.input_spec_id = r.u32();
        v.output_spec_id = r.u32();
        const auto n_in = r.u32();
        if (std::uint64_t{n_in} * 4 > r.remaining()) raise(ErrorCode::MalformedHeader, "golden vector overruns the file");
        v.input.resize(n_in);
        r.floats(v.input);
        const auto n_out = r.u32();
        if (std::uint64_t{n_out} * 4 > r.remaining()) raise(ErrorCode::MalformedHeader, "golden vector overruns the file");
        v.expected.resize(n_out);
        r.floats(v.expected);
        g.vectors.push_back(std::move(v));
    }
    if (r.remaining() != 0) raise(ErrorCode::MalformedHeader, "trailing bytes after the last golden vector");
    return g;
}

GoldenVectors load_golden_file(const std::filesystem::path& path) { return parse_golden(read_file(path.string())); }

std::size_t GoldenReport::failures() const
{
    std::size_t n = 0;
    for (const auto& v : vectors) n += v.passed ? 0 : 1;
    return n;
}

std::string GoldenReport::str() const
{
    std::ostringstream os;
    os << std::setprecision(6);
    for (const auto& v : vectors)
        os << "vector " << v.index << ": max_abs_err=" << v.max_abs_err << " max_rel_err=" << v.max_rel_err << " "
           << (v.passed ? "PASS" : "FAIL") << "\n";
    os << "overall: " << (passed ? "PASS" : "FAIL") << " (" << vectors.size() << " vectors, " << failures()
       << " failed" << (vacuous ? ", vacuous" : "") << ")\n";
    return os.str();
}

GoldenReport verify_golden(const Engine& engine, const GoldenVectors& golden)
{
    GoldenReport report;
    report.vacuous = golden.vectors.empty();
    for (std::size_t i = 0; i < golden.vectors.size(); ++i) {
        const auto& v = golden.vectors[i];
        if (v.input_spec_id != 0) raise(ErrorCode::SpecMismatch, "golden vector " + std::to_string(i) + " names input spec " +
                                                                     std::to_string(v.input_spec_id) + "; engines have one input");
        if (v.output_spec_id >= engine.outputs().size())
            raise(ErrorCode::SpecMismatch, "golden vector " + std::to_string(i) + " names missing output spec " +
                                               std::to_string(v.output_spec_id));
        const auto& out_spec = engine.outputs()[v.output_spec_id].spec;
        if (v.input.size() != engine.input_spec().float_count() || v.expected.size() != out_spec.float_count())
            raise(ErrorCode::SpecMismatch, "golden vector " + std::to_string(i) + " payload sizes do not match the engine specs");

        const auto outs = infer_all(engine, TensorValue(engine.input_spec(), v.input));
        const auto got = outs[v.output_spec_id].data();
        VectorReport vr;
        vr.index = i;
        vr.passed = true;
        for (std::size_t k = 0; k < got.size(); ++k) {
            const double want = v.expected[k];
            const double err = std::abs(static_cast<double>(got[k]) - want);
            vr.max_abs_err = std::max(vr.max_abs_err, err);
            if (want != 0.0) vr.max_rel_err = std::max(vr.max_rel_err, err / std::abs(want));
            // NaN comparisons are false, so a NaN anywhere fails the vector.
            if (!(err <= golden.abs_tol + golden.rel_tol * std::abs(want))) vr.passed = false;
        }
        report.passed = report.passed && vr.passed;
        report.vectors.push_back(vr);
    }
    return report;
}

} // namespace aerial_forge::engine
