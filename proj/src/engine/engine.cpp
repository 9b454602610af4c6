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
#include "aerial_forge/engine/engine.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/core/error.hpp"

namespace aerial_forge::engine {

using json = nlohmann::ordered_json;

namespace {
// Header-declared sizes beyond these are rejected before any allocation.
constexpr std::uint64_t kMaxChannels = 1u << 16;
constexpr std::uint64_t kMaxElements = 1u << 26;
} // namespace

std::string_view to_string(LayerKind kind) noexcept
{
    switch (kind) {
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::Dense: return "dense";
    case LayerKind::Relu: return "relu";
    case LayerKind::Add: return "add";
    }
    return "?";
}

std::uint64_t LayerDescriptor::expected_weight_len() const noexcept
{
    switch (kind) {
    case LayerKind::Conv2d:
        return (std::uint64_t{out_ch} * in_ch * kh * kw + out_ch) * sizeof(float);
    case LayerKind::Dense:
        return (std::uint64_t{out_dim} * in_dim + out_dim) * sizeof(float);
    default: return 0;
    }
}

// ---------------------------------------------------------------- validation

namespace {

struct Resolved {
    std::vector<std::vector<int>> input_index;
    std::vector<std::vector<std::size_t>> shapes;
    std::vector<std::size_t> output_layer;
};

std::uint64_t elements(const std::vector<std::size_t>& shape)
{
    std::uint64_t n = 1;
    for (auto d : shape) {
        if (d == 0 || d > kMaxElements) return kMaxElements + 1;
        n *= d;
        if (n > kMaxElements) return kMaxElements + 1;
    }
    return shape.empty() ? 0 : n;
}

// `structural` covers layer/shape invariants, `weights` covers weight-region
// invariants; serialize uses InvalidLayerGraph for both, load distinguishes.
Resolved check_definition(const EngineDefinition& def, ErrorCode structural, ErrorCode weights)
{
    auto fail = [&](const std::string& msg) { raise(structural, msg); };

    if (def.input.dtype != DType::Float32) fail("engine input must be float32");
    const auto in_elems = elements(def.input.shape);
    if (in_elems == 0 || in_elems > kMaxElements) fail("engine input shape is empty or too large");
    if (def.layers.empty()) fail("engine has no layers");

    Resolved r;
    std::map<std::string, std::size_t> index;
    const std::uint64_t weight_bytes = std::uint64_t{def.weights.size()} * sizeof(float);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> regions;

    for (std::size_t i = 0; i < def.layers.size(); ++i) {
        const auto& L = def.layers[i];
        const std::string where = "layer '" + L.name + "'";
        if (L.name.empty() || L.name == kInputLayer) fail("layer " + std::to_string(i) + " has a reserved or empty name");
        if (index.count(L.name)) fail(where + " is defined twice");

        const std::size_t arity = L.kind == LayerKind::Add ? 2 : 1;
        if (L.inputs.size() != arity)
            fail(where + " (" + std::string(to_string(L.kind)) + ") needs exactly " + std::to_string(arity) + " input(s)");

        std::vector<int> ins;
        std::vector<const std::vector<std::size_t>*> in_shapes;
        for (const auto& src : L.inputs) {
            if (src == kInputLayer) {
                ins.push_back(-1);
                in_shapes.push_back(&def.input.shape);
                continue;
            }
            auto it = index.find(src);
            if (it == index.end()) fail(where + " reads '" + src + "' which is not an earlier layer");
            ins.push_back(static_cast<int>(it->second));
            in_shapes.push_back(&r.shapes[it->second]);
        }

        std::vector<std::size_t> shape;
        const auto& s0 = *in_shapes[0];
        switch (L.kind) {
        case LayerKind::Conv2d:
            if (L.kh != 3 || L.kw != 3) fail(where + " must use a 3x3 kernel");
            if (L.in_ch == 0 || L.out_ch == 0 || L.in_ch > kMaxChannels || L.out_ch > kMaxChannels)
                fail(where + " has invalid channel counts");
            if (s0.size() != 3 || s0[0] != L.in_ch)
                fail(where + " expects a (" + std::to_string(L.in_ch) + ", H, W) input");
            shape = {L.out_ch, s0[1], s0[2]};
            break;
        case LayerKind::Dense:
            if (L.in_dim == 0 || L.out_dim == 0 || L.in_dim > kMaxElements || L.out_dim > kMaxChannels)
                fail(where + " has invalid dimensions");
            if (elements(s0) != L.in_dim) fail(where + " input element count does not equal in_dim");
            shape = {L.out_dim};
            break;
        case LayerKind::Relu: shape = s0; break;
        case LayerKind::Add:
            if (*in_shapes[0] != *in_shapes[1]) fail(where + " adds tensors of different shapes");
            shape = s0;
            break;
        }
        if (elements(shape) > kMaxElements) fail(where + " output is too large");

        const std::uint64_t want = L.expected_weight_len();
        if (L.weight_len != want)
            fail(where + " declares " + std::to_string(L.weight_len) + " weight bytes, layout needs " + std::to_string(want));
        if (want > 0) {
            if (L.weight_offset % sizeof(float) != 0) raise(weights, where + " weight offset is not 4-byte aligned");
            if (L.weight_offset > weight_bytes || L.weight_len > weight_bytes - L.weight_offset)
                raise(weights, where + " weights lie outside the weight section");
            regions.emplace_back(L.weight_offset, L.weight_offset + L.weight_len);
        }

        index.emplace(L.name, i);
        r.input_index.push_back(std::move(ins));
        r.shapes.push_back(std::move(shape));
    }

    std::sort(regions.begin(), regions.end());
    for (std::size_t i = 1; i < regions.size(); ++i)
        if (regions[i].first < regions[i - 1].second) raise(weights, "weight regions overlap");

    if (def.outputs.empty()) fail("engine declares no outputs");
    std::set<std::string> out_names;
    for (const auto& o : def.outputs) {
        auto it = index.find(o.layer);
        if (it == index.end()) fail("output '" + o.spec.name + "' refers to missing layer '" + o.layer + "'");
        if (!out_names.insert(o.spec.name).second) fail("output '" + o.spec.name + "' declared twice");
        if (o.spec.dtype != DType::Float32 || o.spec.shape != r.shapes[it->second])
            fail("output '" + o.spec.name + "' spec does not match layer '" + o.layer + "'");
        r.output_layer.push_back(it->second);
    }
    return r;
}

// ---------------------------------------------------------------- header JSON

json spec_to_json(const TensorSpec& s)
{
    return json{{"name", s.name}, {"dtype", std::string(to_string(s.dtype))}, {"shape", s.shape}};
}

json header_json(const EngineDefinition& def)
{
    json layers = json::array();
    for (const auto& L : def.layers) {
        json j{{"name", L.name}, {"kind", std::string(to_string(L.kind))}, {"inputs", L.inputs}};
        if (L.kind == LayerKind::Conv2d) {
            j["in_ch"] = L.in_ch;
            j["out_ch"] = L.out_ch;
            j["kh"] = L.kh;
            j["kw"] = L.kw;
        } else if (L.kind == LayerKind::Dense) {
            j["in_dim"] = L.in_dim;
            j["out_dim"] = L.out_dim;
        }
        j["weight_offset"] = L.weight_offset;
        j["weight_len"] = L.weight_len;
        layers.push_back(std::move(j));
    }
    json outputs = json::array();
    for (const auto& o : def.outputs) {
        json j = spec_to_json(o.spec);
        j["layer"] = o.layer;
        outputs.push_back(std::move(j));
    }
    return json{{"format", "aerb"},
                {"input", spec_to_json(def.input)},
                {"outputs", std::move(outputs)},
                {"layers", std::move(layers)},
                {"meta", {{"snr_bucket_db", def.meta.snr_bucket_db}, {"prb_size", def.meta.prb_size}}}};
}

[[noreturn]] void bad_header(const std::string& msg) { raise(ErrorCode::MalformedHeader, msg); }

const json& field(const json& obj, const char* key)
{
    if (!obj.is_object()) bad_header("expected an object while reading '" + std::string(key) + "'");
    auto it = obj.find(key);
    if (it == obj.end()) bad_header("missing header field '" + std::string(key) + "'");
    return *it;
}

void check_fields(const json& obj, std::initializer_list<const char*> allowed, const char* what)
{
    if (!obj.is_object()) bad_header(std::string(what) + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
            bad_header("unknown field '" + it.key() + "' in " + what);
}

std::uint64_t as_uint(const json& j, const char* key)
{
    const json& v = field(j, key);
    if (!v.is_number_unsigned()) bad_header("header field '" + std::string(key) + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::uint32_t as_u32(const json& j, const char* key)
{
    const auto v = as_uint(j, key);
    if (v > 0xffffffffull) bad_header("header field '" + std::string(key) + "' is out of range");
    return static_cast<std::uint32_t>(v);
}

int as_int(const json& j, const char* key)
{
    const json& v = field(j, key);
    if (!v.is_number_integer()) bad_header("header field '" + std::string(key) + "' must be an integer");
    const auto x = v.get<std::int64_t>();
    if (x < -1000000 || x > 1000000) bad_header("header field '" + std::string(key) + "' is out of range");
    return static_cast<int>(x);
}

std::string as_string(const json& j, const char* key)
{
    const json& v = field(j, key);
    if (!v.is_string()) bad_header("header field '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

TensorSpec spec_from_json(const json& j)
{
    check_fields(j, {"name", "dtype", "shape", "layer"}, "tensor spec");
    TensorSpec s;
    s.name = as_string(j, "name");
    const auto dtype = as_string(j, "dtype");
    if (dtype != "float32") bad_header("engine tensors must be float32, got " + dtype);
    s.dtype = DType::Float32;
    const json& shape = field(j, "shape");
    if (!shape.is_array() || shape.empty() || shape.size() > 8) bad_header("tensor shape must be a short non-empty list");
    for (const auto& d : shape) {
        if (!d.is_number_unsigned() || d.get<std::uint64_t>() == 0 || d.get<std::uint64_t>() > kMaxElements)
            bad_header("tensor dimensions must be positive integers");
        s.shape.push_back(static_cast<std::size_t>(d.get<std::uint64_t>()));
    }
    return s;
}

LayerKind kind_from_string(const std::string& s)
{
    if (s == "conv2d") return LayerKind::Conv2d;
    if (s == "dense") return LayerKind::Dense;
    if (s == "relu") return LayerKind::Relu;
    if (s == "add") return LayerKind::Add;
    bad_header("unsupported layer kind '" + s + "'");
}

void parse_header(const json& h, EngineDefinition& def)
{
    check_fields(h, {"format", "input", "outputs", "layers", "meta", "producer"}, "header");
    if (as_string(h, "format") != "aerb") bad_header("header format tag is not 'aerb'");
    def.input = spec_from_json(field(h, "input"));

    const json& layers = field(h, "layers");
    if (!layers.is_array()) bad_header("'layers' must be a list");
    for (const auto& lj : layers) {
        check_fields(lj, {"name", "kind", "inputs", "in_ch", "out_ch", "kh", "kw", "in_dim", "out_dim",
                          "weight_offset", "weight_len"},
                     "layer");
        LayerDescriptor L;
        L.name = as_string(lj, "name");
        L.kind = kind_from_string(as_string(lj, "kind"));
        const json& ins = field(lj, "inputs");
        if (!ins.is_array()) bad_header("layer inputs must be a list");
        for (const auto& s : ins) {
            if (!s.is_string()) bad_header("layer inputs must be strings");
            L.inputs.push_back(s.get<std::string>());
        }
        if (L.kind == LayerKind::Conv2d) {
            L.in_ch = as_u32(lj, "in_ch");
            L.out_ch = as_u32(lj, "out_ch");
            L.kh = as_u32(lj, "kh");
            L.kw = as_u32(lj, "kw");
        } else if (L.kind == LayerKind::Dense) {
            L.in_dim = as_u32(lj, "in_dim");
            L.out_dim = as_u32(lj, "out_dim");
        }
        L.weight_offset = as_uint(lj, "weight_offset");
        L.weight_len = as_uint(lj, "weight_len");
        def.layers.push_back(std::move(L));
    }

    const json& outputs = field(h, "outputs");
    if (!outputs.is_array()) bad_header("'outputs' must be a list");
    for (const auto& oj : outputs) def.outputs.push_back({as_string(oj, "layer"), spec_from_json(oj)});

    const json& meta = field(h, "meta");
    check_fields(meta, {"snr_bucket_db", "prb_size"}, "meta");
    def.meta.snr_bucket_db = as_int(meta, "snr_bucket_db");
    def.meta.prb_size = as_int(meta, "prb_size");
}

} // namespace

// ---------------------------------------------------------------- serialize / load

std::vector<std::uint8_t> serialize_engine(const EngineDefinition& def)
{
    (void)check_definition(def, ErrorCode::InvalidLayerGraph, ErrorCode::InvalidLayerGraph);
    const std::string header = header_json(def).dump();

    ByteWriter w;
    w.text(kBlobMagic);
    w.u32(kBlobVersion);
    w.u32(static_cast<std::uint32_t>(header.size()));
    w.text(header);
    w.u64(std::uint64_t{def.weights.size()} * sizeof(float));
    w.floats(def.weights);
    w.u32(crc32(w.buffer()));
    return std::move(w.buffer());
}

Engine::Engine(EngineDefinition def) : def_(std::move(def)) {}

std::size_t Engine::output_index(std::string_view name) const
{
    for (std::size_t i = 0; i < def_.outputs.size(); ++i)
        if (def_.outputs[i].spec.name == name) return i;
    raise(ErrorCode::SpecMismatch, "engine has no output named '" + std::string(name) + "'");
}

Engine make_engine(EngineDefinition def)
{
    Resolved r = check_definition(def, ErrorCode::InvalidLayerGraph, ErrorCode::InvalidLayerGraph);
    Engine e(std::move(def));
    e.input_index_ = std::move(r.input_index);
    e.shapes_ = std::move(r.shapes);
    e.output_layer_ = std::move(r.output_layer);
    return e;
}

Engine load_engine(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kBlobMagic.size() || std::memcmp(bytes.data(), kBlobMagic.data(), kBlobMagic.size()) != 0)
        raise(ErrorCode::BadMagic, "blob does not start with 'AERB'");
    ByteReader r(bytes, ErrorCode::MalformedHeader);
    (void)r.take(kBlobMagic.size());
    const std::uint32_t version = r.u32();
    if (version != kBlobVersion)
        raise(ErrorCode::UnsupportedVersion, "blob version " + std::to_string(version) + " is not supported");

    constexpr std::size_t kMinSize = 4 + 4 + 4 + 8 + 4;
    if (bytes.size() < kMinSize) raise(ErrorCode::MalformedHeader, "blob is truncated");
    const auto body = bytes.first(bytes.size() - 4);
    std::uint32_t stored;
    std::memcpy(&stored, bytes.data() + body.size(), 4);
    if (crc32(body) != stored) raise(ErrorCode::CrcMismatch, "blob checksum does not match its contents");

    ByteReader br(body, ErrorCode::MalformedHeader);
    (void)br.take(8);
    const std::uint32_t header_len = br.u32();
    const auto header_bytes = br.take(header_len);
    const std::uint64_t weight_bytes = br.u64();
    if (weight_bytes != br.remaining() || weight_bytes % sizeof(float) != 0)
        raise(ErrorCode::WeightBoundsError, "weight section length " + std::to_string(weight_bytes) +
                                                " does not match the remaining " + std::to_string(br.remaining()) + " bytes");

    const json header = json::parse(header_bytes.begin(), header_bytes.end(), nullptr, false);
    if (header.is_discarded()) raise(ErrorCode::MalformedHeader, "blob header is not valid JSON");

    EngineDefinition def;
    try {
        parse_header(header, def);
    } catch (const json::exception& e) {
        raise(ErrorCode::MalformedHeader, e.what());
    }
    def.weights.resize(static_cast<std::size_t>(weight_bytes / sizeof(float)));
    br.floats(def.weights);

    Resolved res = check_definition(def, ErrorCode::MalformedHeader, ErrorCode::WeightBoundsError);
    Engine e(std::move(def));
    e.input_index_ = std::move(res.input_index);
    e.shapes_ = std::move(res.shapes);
    e.output_layer_ = std::move(res.output_layer);
    return e;
}

Engine load_engine_file(const std::filesystem::path& path) { return load_engine(read_file(path.string())); }

// ---------------------------------------------------------------- inference

namespace {

void conv2d_same(std::span<const float> in, std::size_t C, std::size_t H, std::size_t W, const float* kernel,
                 const float* bias, std::size_t O, std::span<float> out)
{
    const std::size_t plane = H * W;
    for (std::size_t o = 0; o < O; ++o) {
        float* acc = out.data() + o * plane;
        std::fill(acc, acc + plane, 0.0f);
        // Sweeping whole planes per tap keeps each output element's sum in
        // (c, ky, kx) order, identical to the per-element definition.
        for (std::size_t c = 0; c < C; ++c) {
            const float* x = in.data() + c * plane;
            for (int ky = 0; ky < 3; ++ky) {
                const int dy = ky - 1;
                const std::size_t y0 = dy < 0 ? 1 : 0;
                const std::size_t y1 = dy > 0 ? (H > 0 ? H - 1 : 0) : H;
                for (int kx = 0; kx < 3; ++kx) {
                    const int dx = kx - 1;
                    const float w = kernel[((o * C + c) * 3 + ky) * 3 + kx];
                    const std::size_t x0 = dx < 0 ? 1 : 0;
                    const std::size_t x1 = dx > 0 ? (W > 0 ? W - 1 : 0) : W;
                    for (std::size_t y = y0; y < y1; ++y) {
                        float* a = acc + y * W;
                        const float* src = x + (y + dy) * W + dx;
                        for (std::size_t xx = x0; xx < x1; ++xx) a[xx] += w * src[xx];
                    }
                }
            }
        }
        const float b = bias[o];
        for (std::size_t i = 0; i < plane; ++i) acc[i] += b;
    }
}

void dense(std::span<const float> in, const float* matrix, const float* bias, std::size_t in_dim, std::size_t out_dim,
           std::span<float> out)
{
    for (std::size_t j = 0; j < out_dim; ++j) {
        const float* row = matrix + j * in_dim;
        float acc = 0.0f;
        for (std::size_t i = 0; i < in_dim; ++i) acc += row[i] * in[i];
        out[j] = acc + bias[j];
    }
}

} // namespace

std::vector<TensorValue> infer_all(const Engine& engine, const TensorValue& input)
{
    const auto& def = engine.def_;
    if (!input.spec().compatible_with(def.input) || input.data().size() != def.input.float_count())
        raise(ErrorCode::SpecMismatch, "engine expects " + def.input.describe() + ", got " + input.spec().describe());

    std::vector<std::vector<float>> act(def.layers.size());
    auto source = [&](int idx) -> std::span<const float> {
        return idx < 0 ? input.data() : std::span<const float>(act[static_cast<std::size_t>(idx)]);
    };

    for (std::size_t i = 0; i < def.layers.size(); ++i) {
        const auto& L = def.layers[i];
        const auto& shape = engine.shapes_[i];
        const auto& ins = engine.input_index_[i];
        std::size_t n = 1;
        for (auto d : shape) n *= d;
        auto& out = act[i];
        out.resize(n);
        const float* w = def.weights.data() + L.weight_offset / sizeof(float);
        switch (L.kind) {
        case LayerKind::Conv2d: {
            const std::size_t H = shape[1], W = shape[2];
            conv2d_same(source(ins[0]), L.in_ch, H, W, w, w + std::size_t{L.out_ch} * L.in_ch * 9, L.out_ch, out);
            break;
        }
        case LayerKind::Dense:
            dense(source(ins[0]), w, w + std::size_t{L.out_dim} * L.in_dim, L.in_dim, L.out_dim, out);
            break;
        case LayerKind::Relu: {
            auto src = source(ins[0]);
            for (std::size_t k = 0; k < n; ++k) out[k] = src[k] > 0.0f ? src[k] : 0.0f;
            break;
        }
        case LayerKind::Add: {
            auto a = source(ins[0]);
            auto b = source(ins[1]);
            for (std::size_t k = 0; k < n; ++k) out[k] = a[k] + b[k];
            break;
        }
        }
    }

    std::vector<TensorValue> results;
    results.reserve(def.outputs.size());
    for (std::size_t k = 0; k < def.outputs.size(); ++k)
        results.emplace_back(def.outputs[k].spec, act[engine.output_layer_[k]]);
    return results;
}

TensorValue infer(const Engine& engine, const TensorValue& input) { return std::move(infer_all(engine, input).front()); }

// ---------------------------------------------------------------- builder

EngineBuilder::EngineBuilder(TensorSpec input) { def_.input = std::move(input); }

void EngineBuilder::append_weights(LayerDescriptor& layer, std::span<const float> a, std::span<const float> b)
{
    layer.weight_offset = std::uint64_t{def_.weights.size()} * sizeof(float);
    def_.weights.insert(def_.weights.end(), a.begin(), a.end());
    def_.weights.insert(def_.weights.end(), b.begin(), b.end());
    layer.weight_len = (a.size() + b.size()) * sizeof(float);
}

EngineBuilder& EngineBuilder::conv2d(std::string name, std::string input, std::uint32_t in_ch, std::uint32_t out_ch,
                                     std::span<const float> kernel, std::span<const float> bias)
{
    require(kernel.size() == std::size_t{in_ch} * out_ch * 9 && bias.size() == out_ch, ErrorCode::InvalidLayerGraph,
            "conv2d '" + name + "' weight sizes do not match its channel counts");
    LayerDescriptor L;
    L.name = std::move(name);
    L.kind = LayerKind::Conv2d;
    L.inputs = {std::move(input)};
    L.in_ch = in_ch;
    L.out_ch = out_ch;
    append_weights(L, kernel, bias);
    def_.layers.push_back(std::move(L));
    return *this;
}

EngineBuilder& EngineBuilder::dense(std::string name, std::string input, std::uint32_t in_dim, std::uint32_t out_dim,
                                    std::span<const float> matrix, std::span<const float> bias)
{
    require(matrix.size() == std::size_t{in_dim} * out_dim && bias.size() == out_dim, ErrorCode::InvalidLayerGraph,
            "dense '" + name + "' weight sizes do not match its dimensions");
    LayerDescriptor L;
    L.name = std::move(name);
    L.kind = LayerKind::Dense;
    L.inputs = {std::move(input)};
    L.in_dim = in_dim;
    L.out_dim = out_dim;
    append_weights(L, matrix, bias);
    def_.layers.push_back(std::move(L));
    return *this;
}

EngineBuilder& EngineBuilder::relu(std::string name, std::string input)
{
    LayerDescriptor L;
    L.name = std::move(name);
    L.kind = LayerKind::Relu;
    L.inputs = {std::move(input)};
    def_.layers.push_back(std::move(L));
    return *this;
}

EngineBuilder& EngineBuilder::add(std::string name, std::string a, std::string b)
{
    LayerDescriptor L;
    L.name = std::move(name);
    L.kind = LayerKind::Add;
    L.inputs = {std::move(a), std::move(b)};
    def_.layers.push_back(std::move(L));
    return *this;
}

EngineBuilder& EngineBuilder::output(std::string name, std::string layer, std::vector<std::size_t> shape)
{
    def_.outputs.push_back({std::move(layer), TensorSpec{std::move(name), DType::Float32, std::move(shape)}});
    return *this;
}

EngineBuilder& EngineBuilder::meta(ModelMeta meta)
{
    def_.meta = meta;
    return *this;
}

} // namespace aerial_forge::engine
