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
#include <cmath>
#include <cstring>

#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/core/tensor.hpp"
#include "support.hpp"

using namespace aerial_forge;

TEST(Crc32, MatchesCheckValue)
{
    const std::string s = "123456789";
    EXPECT_EQ(crc32({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}), 0xCBF43926u);
}

TEST(Crc32, RunningValueEqualsOneShot)
{
    std::vector<std::uint8_t> b(1000);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<std::uint8_t>(i * 7);
    const auto whole = crc32(b);
    const auto part = crc32(std::span(b).subspan(400), crc32(std::span(b).first(400)));
    EXPECT_EQ(whole, part);
}

TEST(Random, DeriveSeedIsPureAndSeparatesStreams)
{
    EXPECT_EQ(derive_seed(42, {streams::noise, 3}), derive_seed(42, {streams::noise, 3}));
    EXPECT_NE(derive_seed(42, {streams::noise, 3}), derive_seed(42, {streams::noise, 4}));
    EXPECT_NE(derive_seed(42, {streams::noise, 3}), derive_seed(42, {streams::bits, 3}));
    EXPECT_NE(derive_seed(42, {streams::noise}), derive_seed(43, {streams::noise}));
}

TEST(Random, GaussianMoments)
{
    Rng rng(7);
    const int n = 200000;
    double s = 0, s2 = 0, c2 = 0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        s += g;
        s2 += g * g;
        c2 += std::norm(rng.complex_gaussian(2.0));
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
    EXPECT_NEAR(c2 / n, 2.0, 0.02);
}

TEST(Random, BelowStaysInRange)
{
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) EXPECT_LT(rng.below(7), 7u);
}

TEST(Tensor, SpecValidation)
{
    EXPECT_AF_ERROR(validate_spec({"x", DType::Float32, {}}), InvalidArgument);
    EXPECT_AF_ERROR(validate_spec({"x", DType::Float32, {3, 0}}), InvalidArgument);
    validate_spec({"x", DType::Complex64, {2, 3}});
    EXPECT_EQ((TensorSpec{"x", DType::Complex64, {2, 3}}.float_count()), 12u);
}

TEST(Tensor, BufferLengthMustMatch)
{
    EXPECT_ANY_THROW(TensorValue(TensorSpec{"x", DType::Float32, {4}}, std::vector<float>(3)));
    TensorValue t(TensorSpec{"x", DType::Complex64, {2}});
    EXPECT_EQ(t.data().size(), 4u);
    EXPECT_AF_ERROR((void)TensorValue(TensorSpec{"x", DType::Float32, {2}}).complex_data(), SpecMismatch);
}

TEST(Tensor, BitEqualComparesBytes)
{
    TensorSpec s{"x", DType::Float32, {2}};
    TensorValue a(s, {0.0f, 1.0f});
    TensorValue b(s, {-0.0f, 1.0f});
    EXPECT_FALSE(a.bit_equal(b)); // +0 and -0 differ in bytes
    EXPECT_TRUE(a.bit_equal(TensorValue(s, {0.0f, 1.0f})));
    EXPECT_FALSE(a.bit_equal(TensorValue(TensorSpec{"x", DType::Float32, {2, 1}}, {0.0f, 1.0f})));
}

TEST(BinaryIo, AtomicWriteAndRead)
{
    aftest::TempDir dir("io");
    const auto p = (dir / "f.bin").string();
    std::vector<std::uint8_t> bytes{1, 2, 3, 250};
    write_file_atomic(p, bytes);
    EXPECT_EQ(read_file(p), bytes);
    EXPECT_AF_ERROR(read_file((dir / "missing").string()), IoError);
}

TEST(BinaryIo, ReaderOverrunRaisesConfiguredCode)
{
    ByteWriter w;
    w.u32(5);
    w.f32(1.5f);
    ByteReader r(w.buffer(), ErrorCode::MalformedHeader);
    EXPECT_EQ(r.u32(), 5u);
    EXPECT_EQ(r.f32(), 1.5f);
    EXPECT_AF_ERROR(r.u32(), MalformedHeader);
}
