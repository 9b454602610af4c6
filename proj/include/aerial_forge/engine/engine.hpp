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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerial_forge/core/tensor.hpp"

namespace aerial_forge::engine {

// .aerb layout (little-endian, see docs/formats.md):
//   "AERB" | u32 version | u32 header_len | header (UTF-8 JSON)
//   | u64 weight_bytes | float32 weights | u32 crc32(all preceding bytes)
inline constexpr std::uint32_t kBlobVersion = 1;
inline constexpr std::string_view kBlobMagic = "AERB";
inline constexpr std::string_view kInputLayer = "input";

enum class LayerKind { Conv2d, Dense, Relu, Add };

std::string_view to_string(LayerKind kind) noexcept;

struct LayerDescriptor {
    std::string name;
    LayerKind kind = LayerKind::Relu;
    std::vector<std::string> inputs; // producing layer names or "input"

    // conv2d: 3x3 kernel, zero "same" padding, stride 1
    std::uint32_t in_ch = 0;
    std::uint32_t out_ch = 0;
    std::uint32_t kh = 3;
    std::uint32_t kw = 3;
    // dense
    std::uint32_t in_dim = 0;
    std::uint32_t out_dim = 0;

    // Byte range inside the weight section. conv2d stores (out_ch, in_ch, kh,
    // kw) row-major then bias(out_ch); dense stores (out_dim, in_dim) then
    // bias(out_dim).
    std::uint64_t weight_offset = 0;
    std::uint64_t weight_len = 0;

    std::uint64_t expected_weight_len() const noexcept;
};

struct OutputBinding {
    std::string layer;
    TensorSpec spec; // float32
};

struct ModelMeta {
    int snr_bucket_db = 0;
    int prb_size = 0;
    bool operator==(const ModelMeta&) const = default;
};

struct EngineDefinition {
    TensorSpec input;
    std::vector<LayerDescriptor> layers; // execution order
    std::vector<OutputBinding> outputs;  // first entry is the primary output
    std::vector<float> weights;
    ModelMeta meta;
};

// Throws InvalidLayerGraph when the definition breaks a layer invariant.
std::vector<std::uint8_t> serialize_engine(const EngineDefinition& def);

// Loaded, immutable executable form of a blob.
class Engine {
public:
    const TensorSpec& input_spec() const noexcept { return def_.input; }
    const std::vector<OutputBinding>& outputs() const noexcept { return def_.outputs; }
    const std::vector<LayerDescriptor>& layers() const noexcept { return def_.layers; }
    std::span<const float> weights() const noexcept { return def_.weights; }
    const ModelMeta& meta() const noexcept { return def_.meta; }
    const EngineDefinition& definition() const noexcept { return def_; }

    // Index into outputs(); throws SpecMismatch when absent.
    std::size_t output_index(std::string_view name) const;
    std::size_t parameter_count() const noexcept { return def_.weights.size(); }

private:
    friend Engine load_engine(std::span<const std::uint8_t> bytes);
    friend Engine make_engine(EngineDefinition def);
    explicit Engine(EngineDefinition def);

    EngineDefinition def_;
    // Per layer: resolved input indices (-1 = graph input) and output shape.
    std::vector<std::vector<int>> input_index_;
    std::vector<std::vector<std::size_t>> shapes_;
    std::vector<std::size_t> output_layer_;

    friend std::vector<TensorValue> infer_all(const Engine&, const TensorValue&);
};

// Errors: BadMagic, UnsupportedVersion, CrcMismatch, MalformedHeader,
// WeightBoundsError.
Engine load_engine(std::span<const std::uint8_t> bytes);
Engine load_engine_file(const std::filesystem::path& path);
// Validated in-memory construction, the same checks as serialize_engine.
Engine make_engine(EngineDefinition def);

// Evaluates every layer in order. float32 throughout; each conv2d output
// element accumulates from 0 over in_ch, then kh, then kw, and the bias is
// added last; dense accumulates over in_dim ascending, bias last.
std::vector<TensorValue> infer_all(const Engine& engine, const TensorValue& input);
// Primary (first) output only.
TensorValue infer(const Engine& engine, const TensorValue& input);

// Convenience writer that lays weights out contiguously in call order.
class EngineBuilder {
public:
    explicit EngineBuilder(TensorSpec input);

    EngineBuilder& conv2d(std::string name, std::string input, std::uint32_t in_ch, std::uint32_t out_ch,
                          std::span<const float> kernel, std::span<const float> bias);
    EngineBuilder& dense(std::string name, std::string input, std::uint32_t in_dim, std::uint32_t out_dim,
                         std::span<const float> matrix, std::span<const float> bias);
    EngineBuilder& relu(std::string name, std::string input);
    EngineBuilder& add(std::string name, std::string a, std::string b);
    EngineBuilder& output(std::string name, std::string layer, std::vector<std::size_t> shape);
    EngineBuilder& meta(ModelMeta meta);

    const EngineDefinition& definition() const noexcept { return def_; }
    EngineDefinition build() const { return def_; }

private:
    void append_weights(LayerDescriptor& layer, std::span<const float> a, std::span<const float> b);
    EngineDefinition def_;
};

} // namespace aerial_forge::engine
