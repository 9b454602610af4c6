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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aerial_forge {

// complex64 tensors store interleaved (re, im) float32 pairs, so one logical
// element occupies two floats of the buffer.
enum class DType { Complex64, Float32 };

std::string_view to_string(DType dtype) noexcept;
DType dtype_from_string(std::string_view text);

struct TensorSpec {
    std::string name;
    DType dtype = DType::Float32;
    std::vector<std::size_t> shape;
    std::string layout = "row_major";

    std::size_t element_count() const noexcept;
    std::size_t float_count() const noexcept
    {
        return dtype == DType::Complex64 ? 2 * element_count() : element_count();
    }
    // dtype and shape agree; the name is a port label and is ignored.
    bool compatible_with(const TensorSpec& other) const noexcept
    {
        return dtype == other.dtype && shape == other.shape;
    }
    std::string describe() const;
};

// Throws InvalidArgument if the shape is empty or has a zero dimension.
void validate_spec(const TensorSpec& spec);

class TensorValue {
public:
    TensorValue() = default;
    // Zero-filled buffer sized for `spec`.
    explicit TensorValue(TensorSpec spec);
    TensorValue(TensorSpec spec, std::vector<float> data);

    static TensorValue from_complex(TensorSpec spec, std::span<const std::complex<float>> values);

    const TensorSpec& spec() const noexcept { return spec_; }
    TensorSpec& mutable_spec() noexcept { return spec_; }

    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }
    std::vector<float>& buffer() noexcept { return data_; }

    // Only valid for complex64 tensors.
    std::span<std::complex<float>> complex_data();
    std::span<const std::complex<float>> complex_data() const;

    // Same spec (dtype, shape) and the same bytes.
    bool bit_equal(const TensorValue& other) const noexcept;

private:
    TensorSpec spec_;
    std::vector<float> data_;
};

} // namespace aerial_forge
