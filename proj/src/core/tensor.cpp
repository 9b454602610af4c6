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
#include "aerial_forge/core/tensor.hpp"

#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>

#include "aerial_forge/core/error.hpp"

namespace aerial_forge {

std::string_view to_string(DType dtype) noexcept
{
    return dtype == DType::Complex64 ? "complex64" : "float32";
}

DType dtype_from_string(std::string_view text)
{
    if (text == "complex64") return DType::Complex64;
    if (text == "float32") return DType::Float32;
    raise(ErrorCode::InvalidArgument, "unknown dtype '" + std::string(text) + "'");
}

std::size_t TensorSpec::element_count() const noexcept
{
    if (shape.empty()) return 0;
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string TensorSpec::describe() const
{
    std::ostringstream os;
    os << name << ":" << to_string(dtype) << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << "]";
    return os.str();
}

void validate_spec(const TensorSpec& spec)
{
    require(!spec.shape.empty(), ErrorCode::InvalidArgument, "tensor '" + spec.name + "' has an empty shape");
    for (auto d : spec.shape)
        require(d >= 1, ErrorCode::InvalidArgument, "tensor '" + spec.name + "' has a zero dimension");
}

TensorValue::TensorValue(TensorSpec spec) : spec_(std::move(spec))
{
    validate_spec(spec_);
    data_.assign(spec_.float_count(), 0.0f);
}

TensorValue::TensorValue(TensorSpec spec, std::vector<float> data) : spec_(std::move(spec)), data_(std::move(data))
{
    validate_spec(spec_);
    require(data_.size() == spec_.float_count(), ErrorCode::SpecMismatch,
            "buffer of " + std::to_string(data_.size()) + " floats does not match " + spec_.describe());
}

TensorValue TensorValue::from_complex(TensorSpec spec, std::span<const std::complex<float>> values)
{
    require(spec.dtype == DType::Complex64, ErrorCode::SpecMismatch, "from_complex needs a complex64 spec");
    std::vector<float> data(values.size() * 2);
    std::memcpy(data.data(), values.data(), values.size_bytes());
    return TensorValue(std::move(spec), std::move(data));
}

std::span<std::complex<float>> TensorValue::complex_data()
{
    require(spec_.dtype == DType::Complex64, ErrorCode::SpecMismatch, spec_.describe() + " is not complex");
    return {reinterpret_cast<std::complex<float>*>(data_.data()), data_.size() / 2};
}

std::span<const std::complex<float>> TensorValue::complex_data() const
{
    require(spec_.dtype == DType::Complex64, ErrorCode::SpecMismatch, spec_.describe() + " is not complex");
    return {reinterpret_cast<const std::complex<float>*>(data_.data()), data_.size() / 2};
}

bool TensorValue::bit_equal(const TensorValue& other) const noexcept
{
    return spec_.compatible_with(other.spec_) && data_.size() == other.data_.size() &&
           std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

} // namespace aerial_forge
