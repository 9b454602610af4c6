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

#include "aerial_forge/chanest/reference_cnn.hpp"
#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/engine/engine.hpp"
#include "aerial_forge/engine/golden.hpp"
#include "aerial_forge/graph/graph.hpp"
#include "aerial_forge/linklevel/simulator.hpp"
#include "support.hpp"

using namespace aerial_forge;
using namespace aerial_forge::engine;

namespace {

std::vector<float> random_floats(std::size_t n, Rng& rng, double scale = 1.0)
{
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(scale * rng.gaussian());
    return v;
}

TensorValue random_input(const TensorSpec& spec, Rng& rng)
{
    return TensorValue(spec, random_floats(spec.float_count(), rng));
}

// Same-padded 3x3 convolution accumulated in double.
std::vector<double> conv_oracle(const std::vector<double>& x, std::size_t C, std::size_t H, std::size_t W,
                                std::span<const float> k, std::span<const float> b, std::size_t O)
{
    std::vector<double> y(O * H * W);
    for (std::size_t o = 0; o < O; ++o)
        for (std::size_t i = 0; i < H; ++i)
            for (std::size_t j = 0; j < W; ++j) {
                double acc = b[o];
                for (std::size_t c = 0; c < C; ++c)
                    for (int di = -1; di <= 1; ++di)
                        for (int dj = -1; dj <= 1; ++dj) {
                            const long ii = long(i) + di, jj = long(j) + dj;
                            if (ii < 0 || jj < 0 || ii >= long(H) || jj >= long(W)) continue;
                            acc += double(k[((o * C + c) * 3 + (di + 1)) * 3 + (dj + 1)]) * x[(c * H + ii) * W + jj];
                        }
                y[(o * H + i) * W + j] = acc;
            }
    return y;
}

// Rebuilds a blob with a replacement header text and a fresh checksum.
std::vector<std::uint8_t> with_header(const std::vector<std::uint8_t>& blob,
                                      const std::function<void(std::string&)>& edit)
{
    std::uint32_t hlen;
    std::memcpy(&hlen, blob.data() + 8, 4);
    std::string header(reinterpret_cast<const char*>(blob.data() + 12), hlen);
    edit(header);
    ByteWriter w;
    w.bytes(std::span(blob).first(8));
    w.u32(static_cast<std::uint32_t>(header.size()));
    w.text(header);
    w.bytes(std::span(blob).subspan(12 + hlen, blob.size() - 4 - 12 - hlen));
    w.u32(crc32(w.buffer()));
    return std::move(w.buffer());
}

std::vector<std::uint8_t> with_crc(std::vector<std::uint8_t> b)
{
    const auto c = crc32(std::span(b).first(b.size() - 4));
    std::memcpy(b.data() + b.size() - 4, &c, 4);
    return b;
}

EngineDefinition three_layer(Rng& rng)
{
    const TensorSpec in{"x", DType::Float32, {2, 3, 5}};
    const auto k1 = random_floats(2 * 4 * 9, rng), b1 = random_floats(4, rng);
    const auto m = random_floats(1 * 60, rng), b2 = random_floats(1, rng);
    return EngineBuilder(in)
        .conv2d("c1", "input", 2, 4, k1, b1)
        .relu("r1", "c1")
        .dense("d", "r1", 60, 1, m, b2)
        .output("y", "d", {1})
        .meta({0, 4})
        .build();
}

} // namespace

TEST(Blob, ReluOnlyRoundtrip)
{
    const auto def = EngineBuilder({"x", DType::Float32, {1, 2, 2}}).relu("r", "input").output("y", "r", {1, 2, 2}).build();
    const auto e = load_engine(serialize_engine(def));
    EXPECT_EQ(e.layers().size(), 1u);
    EXPECT_EQ(e.parameter_count(), 0u);
    const auto y = infer(e, TensorValue(e.input_spec(), {-1.0f, 2.0f, -0.5f, 0.0f}));
    EXPECT_EQ(std::vector<float>(y.data().begin(), y.data().end()), (std::vector<float>{0.0f, 2.0f, 0.0f, 0.0f}));
}

TEST(Blob, RandomNetworkRoundtripIsBitExact)
{
    Rng rng(1);
    const auto def = three_layer(rng);
    const auto bytes = serialize_engine(def);
    const auto e = load_engine(bytes);
    ASSERT_EQ(e.weights().size(), def.weights.size());
    EXPECT_EQ(std::memcmp(e.weights().data(), def.weights.data(), def.weights.size() * 4), 0);
    EXPECT_EQ(e.meta(), (ModelMeta{0, 4}));
    ASSERT_EQ(e.layers().size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(e.layers()[i].name, def.layers[i].name);
        EXPECT_EQ(e.layers()[i].weight_offset, def.layers[i].weight_offset);
        EXPECT_EQ(e.layers()[i].weight_len, def.layers[i].weight_len);
    }
    EXPECT_EQ(serialize_engine(e.definition()), bytes);
}

TEST(Blob, CorruptionIsDetected)
{
    Rng rng(2);
    auto bytes = serialize_engine(three_layer(rng));
    auto flipped = bytes;
    flipped[bytes.size() - 10] ^= 0x01; // inside the weights
    EXPECT_AF_ERROR(load_engine(flipped), CrcMismatch);

    auto magic = bytes;
    magic[0] = 'X';
    EXPECT_AF_ERROR(load_engine(magic), BadMagic);

    auto version = bytes;
    version[4] = 9;
    EXPECT_AF_ERROR(load_engine(with_crc(version)), UnsupportedVersion);

    EXPECT_AF_ERROR(load_engine(std::span(bytes).first(6)), MalformedHeader);
    EXPECT_AF_ERROR(load_engine(std::span(bytes).first(bytes.size() - 9)), CrcMismatch);
}

TEST(Blob, HeaderDefectsAreStructuredErrors)
{
    Rng rng(3);
    const auto bytes = serialize_engine(three_layer(rng));
    EXPECT_AF_ERROR(load_engine(with_header(bytes, [](std::string& h) { h = "{not json"; })), MalformedHeader);
    EXPECT_AF_ERROR(load_engine(with_header(bytes, [](std::string& h) { h.insert(1, "\"extra\":1,"); })), MalformedHeader);
    // Weight range past the end of the weight section.
    EXPECT_AF_ERROR(load_engine(with_header(bytes,
                                            [](std::string& h) {
                                                const auto p = h.find("\"weight_offset\":0");
                                                ASSERT_NE(p, std::string::npos);
                                                h.replace(p, 17, "\"weight_offset\":400000");
                                            })),
                    WeightBoundsError);
}

TEST(Blob, SerializeRejectsBadGraphs)
{
    EngineDefinition empty;
    empty.input = {"x", DType::Float32, {1}};
    EXPECT_AF_ERROR(serialize_engine(empty), InvalidLayerGraph);

    Rng rng(4);
    auto def = three_layer(rng);
    def.layers[2].weight_offset = 8; // overlaps c1
    EXPECT_AF_ERROR(serialize_engine(def), InvalidLayerGraph);

    auto add = EngineBuilder({"x", DType::Float32, {1, 1, 2}}).relu("r", "input").output("y", "r", {1, 1, 2}).build();
    add.layers[0].kind = LayerKind::Add; // add needs two inputs
    EXPECT_AF_ERROR(serialize_engine(add), InvalidLayerGraph);

    auto dangling = EngineBuilder({"x", DType::Float32, {1, 1, 2}}).relu("r", "input").output("y", "nope", {1, 1, 2}).build();
    EXPECT_AF_ERROR(serialize_engine(dangling), InvalidLayerGraph);
}

TEST(Infer, IdentityKernel)
{
    const std::size_t C = 3;
    std::vector<float> k(C * C * 9, 0.0f), b(C, 0.0f);
    for (std::size_t c = 0; c < C; ++c) k[(c * C + c) * 9 + 4] = 1.0f;
    const auto e = make_engine(
        EngineBuilder({"x", DType::Float32, {C, 4, 6}}).conv2d("c", "input", C, C, k, b).output("y", "c", {C, 4, 6}).build());
    Rng rng(5);
    const auto x = random_input(e.input_spec(), rng);
    EXPECT_EQ(std::memcmp(infer(e, x).data().data(), x.data().data(), x.data().size_bytes()), 0);
}

TEST(Infer, ZeroWeightsGiveBias)
{
    std::vector<float> k(2 * 3 * 9, 0.0f), b{0.5f, -2.0f, 7.0f};
    const auto e = make_engine(
        EngineBuilder({"x", DType::Float32, {2, 3, 3}}).conv2d("c", "input", 2, 3, k, b).output("y", "c", {3, 3, 3}).build());
    Rng rng(6);
    const auto y = infer(e, random_input(e.input_spec(), rng));
    for (std::size_t o = 0; o < 3; ++o)
        for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(y.data()[o * 9 + i], b[o]);
}

TEST(Infer, ConvStackMatchesOracle)
{
    Rng rng(7);
    const std::size_t H = 2, W = 24;
    const auto k1 = random_floats(2 * 8 * 9, rng), b1 = random_floats(8, rng);
    const auto k2 = random_floats(8 * 2 * 9, rng), b2 = random_floats(2, rng);
    const auto e = make_engine(EngineBuilder({"x", DType::Float32, {2, H, W}})
                                   .conv2d("a", "input", 2, 8, k1, b1)
                                   .conv2d("b", "a", 8, 2, k2, b2)
                                   .output("y", "b", {2, H, W})
                                   .build());
    const auto x = random_input(e.input_spec(), rng);
    std::vector<double> xd(x.data().begin(), x.data().end());
    const auto mid = conv_oracle(xd, 2, H, W, k1, b1, 8);
    const auto want = conv_oracle(mid, 8, H, W, k2, b2, 2);
    const auto got = infer(e, x);
    double worst = 0;
    for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got.data()[i] - want[i]));
    EXPECT_LE(worst, 1e-5);
}

TEST(Infer, ZeroResidualBlockIsIdentity)
{
    std::vector<float> k(4 * 4 * 9, 0.0f), b(4, 0.0f);
    const auto e = make_engine(EngineBuilder({"x", DType::Float32, {4, 2, 5}})
                                   .conv2d("a", "input", 4, 4, k, b)
                                   .relu("r", "a")
                                   .conv2d("b", "r", 4, 4, k, b)
                                   .add("s", "input", "b")
                                   .output("y", "s", {4, 2, 5})
                                   .build());
    Rng rng(8);
    const auto x = random_input(e.input_spec(), rng);
    EXPECT_EQ(std::memcmp(infer(e, x).data().data(), x.data().data(), x.data().size_bytes()), 0);
}

TEST(Infer, DenseIsLinearWithoutBias)
{
    Rng rng(9);
    const auto m = random_floats(3 * 10, rng);
    const std::vector<float> zero(3, 0.0f);
    const auto e = make_engine(
        EngineBuilder({"x", DType::Float32, {10}}).dense("d", "input", 10, 3, m, zero).output("y", "d", {3}).build());
    const auto x = random_input(e.input_spec(), rng);
    const auto y = infer(e, x);
    for (float a : {-4.0f, -1.5f, 0.25f, 3.0f}) {
        TensorValue ax = x;
        for (auto& v : ax.data()) v *= a;
        const auto ya = infer(e, ax);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(ya.data()[i], a * y.data()[i], 1e-5);
    }
}

TEST(Infer, InputSpecMustMatch)
{
    Rng rng(10);
    const auto e = make_engine(three_layer(rng));
    EXPECT_AF_ERROR(infer(e, TensorValue(TensorSpec{"x", DType::Float32, {2, 3, 4}})), SpecMismatch);
}

TEST(Infer, RepeatedRunsAreBitIdentical)
{
    const auto def = chanest::reference_cnn(1, 24, chanest::ReferenceInit::Random, 3, {0, 4});
    const auto e = make_engine(def);
    Rng rng(11);
    const auto x = random_input(e.input_spec(), rng);
    EXPECT_TRUE(infer(e, x).bit_equal(infer(e, x)));
}

TEST(Golden, PassPerturbAndVacuous)
{
    const auto e = make_engine(chanest::reference_cnn(1, 6, chanest::ReferenceInit::Random, 5, {5, 1}));
    auto g = chanest::make_golden(e, 4, 1);
    const auto parsed = parse_golden(serialize_golden(g));
    ASSERT_EQ(parsed.vectors.size(), g.vectors.size());
    const auto ok = verify_golden(e, parsed);
    EXPECT_TRUE(ok.passed);
    EXPECT_FALSE(ok.vacuous);

    g.vectors[3].expected[0] += 1e-2f;
    const auto bad = verify_golden(e, g);
    EXPECT_FALSE(bad.passed);
    EXPECT_EQ(bad.failures(), 1u);
    EXPECT_FALSE(bad.vectors[3].passed);
    EXPECT_TRUE(bad.vectors[2].passed);

    const auto empty = verify_golden(e, GoldenVectors{});
    EXPECT_TRUE(empty.passed);
    EXPECT_TRUE(empty.vacuous);
    EXPECT_NE(empty.str().find("vacuous"), std::string::npos);
}

TEST(Golden, SpecMismatchAndCorruption)
{
    const auto e = make_engine(chanest::reference_cnn(1, 6, chanest::ReferenceInit::Zero, 0, {0, 1}));
    GoldenVectors g;
    g.vectors.push_back({0, 0, std::vector<float>(5), std::vector<float>(12)});
    EXPECT_AF_ERROR(verify_golden(e, g), SpecMismatch);
    g.vectors[0] = {0, 7, std::vector<float>(12), std::vector<float>(12)};
    EXPECT_AF_ERROR(verify_golden(e, g), SpecMismatch);

    auto bytes = serialize_golden(chanest::make_golden(e, 2, 0));
    bytes[20] ^= 0xff;
    EXPECT_AF_ERROR(parse_golden(bytes), CrcMismatch);
    bytes[0] = 'Z';
    EXPECT_AF_ERROR(parse_golden(bytes), BadMagic);
}

TEST(EngineNode, RunsBlobInsideGraph)
{
    aftest::TempDir dir("engnode");
    const auto def = chanest::reference_cnn(1, 6, chanest::ReferenceInit::Random, 1, {0, 1});
    const auto bytes = serialize_engine(def);
    write_file_atomic((dir / "m.aerb").string(), bytes);
    const auto e = load_engine(bytes);
    write_file_atomic((dir / "m.aergv").string(), serialize_golden(chanest::make_golden(e, 2, 0)));

    const auto m = graph::parse_manifest(R"(
inputs: [{name: z, to: cnn.ls_input}]
outputs: [{name: y, from: cnn.h_denoised}, {name: s, from: cnn.snr_db}]
nodes:
  - name: cnn
    kind: engine.blob
    params: {blob: m.aerb, golden: m.aergv}
    inputs: [{name: ls_input, dtype: float32, shape: [2, 1, 6]}]
    outputs: [{name: h_denoised, dtype: float32, shape: [2, 1, 6]}, {name: snr_db, dtype: float32, shape: [1]}]
)",
                                         dir.path);
    const auto g = graph::build_graph(m, linklevel::default_registry());
    Rng rng(2);
    const auto x = random_input(e.input_spec(), rng);
    const auto out = g.execute({{"z", x}});
    const auto want = infer_all(e, x);
    EXPECT_EQ(std::memcmp(out.at("y").data().data(), want[0].data().data(), 48), 0);
    EXPECT_EQ(out.at("s").data()[0], want[1].data()[0]);

    auto broken = m;
    broken.nodes[0].params.set("blob", std::string("missing.aerb"));
    EXPECT_AF_ERROR(graph::build_graph(broken, linklevel::default_registry()), BlobLoadError);
}
