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
#include "aerial_forge/graph/adapters.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

#include "aerial_forge/core/error.hpp"

namespace aerial_forge::graph {

std::string AdapterKind::str() const
{
    switch (op) {
    case Op::PackComplexToPlanar: return "pack_complex_to_planar";
    case Op::UnpackPlanarToComplex: return "unpack_planar_to_complex";
    case Op::Reshape: {
        std::ostringstream os;
        os << "reshape(";
        for (std::size_t i = 0; i < target_shape.size(); ++i) os << (i ? "," : "") << target_shape[i];
        os << ")";
        return os.str();
    }
    }
    return "?";
}

TensorSpec adapt_spec(const AdapterKind& kind, const TensorSpec& in)
{
    TensorSpec out = in;
    switch (kind.op) {
    case AdapterKind::Op::PackComplexToPlanar:
        require(in.dtype == DType::Complex64, ErrorCode::SpecMismatch, "pack needs complex64 input, got " + in.describe());
        out.dtype = DType::Float32;
        out.shape.insert(out.shape.begin(), 2);
        break;
    case AdapterKind::Op::UnpackPlanarToComplex:
        require(in.dtype == DType::Float32 && in.shape.size() >= 2 && in.shape.front() == 2, ErrorCode::SpecMismatch,
                "unpack needs float32 input with a leading axis of 2 and rank >= 2, got " + in.describe());
        out.dtype = DType::Complex64;
        out.shape.erase(out.shape.begin());
        break;
    case AdapterKind::Op::Reshape: {
        TensorSpec probe = in;
        probe.shape = kind.target_shape;
        require(!probe.shape.empty() && probe.element_count() == in.element_count() &&
                    std::find(probe.shape.begin(), probe.shape.end(), 0u) == probe.shape.end(),
                ErrorCode::SpecMismatch, kind.str() + " does not preserve the element count of " + in.describe());
        out.shape = kind.target_shape;
        break;
    }
    }
    return out;
}

namespace {

TensorValue pack(const TensorValue& t, TensorSpec out_spec)
{
    const auto src = t.complex_data();
    const std::size_t n = src.size();
    std::vector<float> planar(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        planar[i] = src[i].real();
        planar[n + i] = src[i].imag();
    }
    return TensorValue(std::move(out_spec), std::move(planar));
}

TensorValue unpack(const TensorValue& t, TensorSpec out_spec)
{
    const auto src = t.data();
    const std::size_t n = src.size() / 2;
    std::vector<float> interleaved(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        interleaved[2 * i] = src[i];
        interleaved[2 * i + 1] = src[n + i];
    }
    return TensorValue(std::move(out_spec), std::move(interleaved));
}

} // namespace

TensorValue apply_adapter(const AdapterKind& kind, const TensorValue& t)
{
    TensorSpec out_spec = adapt_spec(kind, t.spec());
    switch (kind.op) {
    case AdapterKind::Op::PackComplexToPlanar: return pack(t, std::move(out_spec));
    case AdapterKind::Op::UnpackPlanarToComplex: return unpack(t, std::move(out_spec));
    case AdapterKind::Op::Reshape: {
        std::vector<float> copy(t.data().begin(), t.data().end());
        return TensorValue(std::move(out_spec), std::move(copy));
    }
    }
    raise(ErrorCode::InvalidArgument, "unknown adapter");
}

TensorValue apply_adapter(const AdapterKind& kind, TensorValue&& t)
{
    if (kind.op != AdapterKind::Op::Reshape) return apply_adapter(kind, static_cast<const TensorValue&>(t));
    TensorSpec out_spec = adapt_spec(kind, t.spec());
    return TensorValue(std::move(out_spec), std::move(t.buffer()));
}

} // namespace aerial_forge::graph
