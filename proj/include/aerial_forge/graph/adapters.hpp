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

#include <cstddef>
#include <string>
#include <vector>

#include "aerial_forge/core/tensor.hpp"

namespace aerial_forge::graph {

// Pre/post kernels placed on graph edges. pack maps complex (d1..dk) to
// float32 (2, d1..dk) with plane 0 real and plane 1 imaginary; unpack is its
// exact inverse; reshape relabels the shape without touching the bytes.
struct AdapterKind {
    enum class Op { PackComplexToPlanar, UnpackPlanarToComplex, Reshape };

    Op op = Op::PackComplexToPlanar;
    std::vector<std::size_t> target_shape; // Reshape only

    static AdapterKind pack() { return {Op::PackComplexToPlanar, {}}; }
    static AdapterKind unpack() { return {Op::UnpackPlanarToComplex, {}}; }
    static AdapterKind reshape(std::vector<std::size_t> shape) { return {Op::Reshape, std::move(shape)}; }

    std::string str() const;
};

// Output spec of the adapter for an input spec; throws SpecMismatch.
TensorSpec adapt_spec(const AdapterKind& kind, const TensorSpec& in);

TensorValue apply_adapter(const AdapterKind& kind, const TensorValue& t);
// Reshape reuses the buffer when given an rvalue.
TensorValue apply_adapter(const AdapterKind& kind, TensorValue&& t);

} // namespace aerial_forge::graph
