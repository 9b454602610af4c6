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

#include <algorithm>
#include <string>

#include "aerial_forge/core/error.hpp"
#include "aerial_forge/core/grid.hpp"
#include "aerial_forge/core/tensor.hpp"

namespace aerial_forge {

// complex64 (rows, cols) tensor <-> ComplexGrid, copying.
inline ComplexGrid grid_from_tensor(const TensorValue& t)
{
    const auto& s = t.spec();
    require(s.dtype == DType::Complex64 && s.shape.size() == 2, ErrorCode::SpecMismatch,
            "expected a 2-D complex64 tensor, got " + s.describe());
    ComplexGrid g(s.shape[0], s.shape[1]);
    const auto src = t.complex_data();
    std::copy(src.begin(), src.end(), g.flat().begin());
    return g;
}

inline TensorValue tensor_from_grid(std::string name, const ComplexGrid& g)
{
    return TensorValue::from_complex(TensorSpec{std::move(name), DType::Complex64, {g.rows(), g.cols()}}, g.flat());
}

inline TensorValue scalar_tensor(std::string name, float v)
{
    return TensorValue(TensorSpec{std::move(name), DType::Float32, {1}}, {v});
}

} // namespace aerial_forge
