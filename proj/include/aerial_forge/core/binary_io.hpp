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
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerial_forge/core/error.hpp"

namespace aerial_forge {

// IEEE 802.3 CRC-32 (the zlib/PNG polynomial).
std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t running = 0) noexcept;

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::span<const std::uint8_t> bytes);

// Little-endian append-only writer. The host is required to be little-endian
// (checked at configure time), so floats are copied verbatim.
class ByteWriter {
public:
    void u32(std::uint32_t v) { put(&v, sizeof v); }
    void u64(std::uint64_t v) { put(&v, sizeof v); }
    void f32(float v) { put(&v, sizeof v); }
    void bytes(std::span<const std::uint8_t> b) { put(b.data(), b.size()); }
    void text(std::string_view s) { put(s.data(), s.size()); }
    void floats(std::span<const float> f) { put(f.data(), f.size_bytes()); }

    std::vector<std::uint8_t>& buffer() noexcept { return buf_; }
    std::size_t size() const noexcept { return buf_.size(); }

private:
    void put(const void* p, std::size_t n)
    {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    std::vector<std::uint8_t> buf_;
};

// Bounds-checked reader; every overrun raises `overrun_code`.
class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, ErrorCode overrun_code)
        : bytes_(bytes), overrun_(overrun_code)
    {
    }

    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    float f32() { return get<float>(); }
    std::span<const std::uint8_t> take(std::size_t n)
    {
        need(n);
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    void floats(std::span<float> out)
    {
        auto raw = take(out.size_bytes());
        std::memcpy(out.data(), raw.data(), raw.size());
    }

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    template <typename T>
    T get()
    {
        T v;
        auto raw = take(sizeof(T));
        std::memcpy(&v, raw.data(), sizeof(T));
        return v;
    }
    void need(std::size_t n) const
    {
        if (n > remaining()) raise(overrun_, "unexpected end of data at byte " + std::to_string(pos_));
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    ErrorCode overrun_;
};

} // namespace aerial_forge
