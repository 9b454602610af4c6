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

#include <gtest/gtest.h>

#include <filesystem>
#include <optional>
#include <string>
#include <unistd.h>

#include "aerial_forge/core/error.hpp"
#include "aerial_forge/core/grid.hpp"
#include "aerial_forge/core/random.hpp"

namespace aftest {

namespace fs = std::filesystem;

// Fresh directory removed at scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("aerial_forge_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    fs::path operator/(const std::string& name) const { return path / name; }
};

template <typename F>
std::optional<aerial_forge::ErrorCode> error_of(F&& f)
{
    try {
        f();
    } catch (const aerial_forge::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

template <typename F>
std::string message_of(F&& f)
{
    try {
        f();
    } catch (const aerial_forge::Error& e) {
        return e.what();
    }
    return {};
}

inline aerial_forge::ComplexGrid random_grid(std::size_t rows, std::size_t cols, aerial_forge::Rng& rng,
                                             double variance = 1.0)
{
    aerial_forge::ComplexGrid g(rows, cols);
    for (auto& v : g.flat()) v = aerial_forge::cf32(rng.complex_gaussian(variance));
    return g;
}

} // namespace aftest

#define EXPECT_AF_ERROR(stmt, code) EXPECT_EQ(aftest::error_of([&] { stmt; }), aerial_forge::ErrorCode::code)
