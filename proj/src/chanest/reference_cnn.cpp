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
#include "aerial_forge/chanest/reference_cnn.hpp"

#include <cmath>

#include "aerial_forge/chanest/bank.hpp"
#include "aerial_forge/chanest/types.hpp"
#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/core/error.hpp"
#include "aerial_forge/core/random.hpp"

namespace aerial_forge::chanest {

using engine::EngineBuilder;

ReferenceInit reference_init_from_string(std::string_view text)
{
    if (text == "identity") return ReferenceInit::Identity;
    if (text == "zero") return ReferenceInit::Zero;
    if (text == "random") return ReferenceInit::Random;
    raise(ErrorCode::InvalidArgument, "unknown reference init '" + std::string(text) + "'");
}

namespace {

constexpr std::size_t kCenter = 4; // (1, 1) in a 3x3 kernel

std::size_t tap(std::uint32_t in_ch, std::uint32_t o, std::uint32_t i, std::size_t k)
{
    return (static_cast<std::size_t>(o) * in_ch + i) * 9 + k;
}

struct ConvWeights {
    std::vector<float> kernel, bias;
};

ConvWeights conv_weights(std::uint32_t in_ch, std::uint32_t out_ch, ReferenceInit init, Rng& rng, double scale)
{
    ConvWeights w{std::vector<float>(std::size_t{in_ch} * out_ch * 9, 0.0f), std::vector<float>(out_ch, 0.0f)};
    if (init == ReferenceInit::Random) {
        const double a = scale / std::sqrt(9.0 * in_ch);
        for (auto& v : w.kernel) v = static_cast<float>(rng.uniform(-a, a));
        for (auto& v : w.bias) v = static_cast<float>(rng.uniform(-0.01, 0.01));
    }
    return w;
}

} // namespace

engine::EngineDefinition reference_cnn(std::size_t T, std::size_t F, ReferenceInit init, std::uint64_t seed,
                                       engine::ModelMeta meta)
{
    require(T >= 1 && F >= 1, ErrorCode::InvalidArgument, "reference CNN needs a non-empty input");
    constexpr std::uint32_t W = kReferenceWidth;
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(meta.snr_bucket_db + 1000),
                               static_cast<std::uint64_t>(meta.prb_size)}));
    EngineBuilder b(TensorSpec{std::string(kCnnInput), DType::Float32, {2, T, F}});

    // conv_in: with identity init, channels 0..3 carry +re, -re, +im, -im so
    // the relu that follows loses nothing.
    auto in = conv_weights(2, W, init, rng, 1.0);
    if (init == ReferenceInit::Identity) {
        in.kernel[tap(2, 0, 0, kCenter)] = 1.0f;
        in.kernel[tap(2, 1, 0, kCenter)] = -1.0f;
        in.kernel[tap(2, 2, 1, kCenter)] = 1.0f;
        in.kernel[tap(2, 3, 1, kCenter)] = -1.0f;
    }
    b.conv2d("conv_in", std::string(engine::kInputLayer), 2, W, in.kernel, in.bias).relu("relu_in", "conv_in");

    std::string x = "relu_in";
    for (int blk = 1; blk <= 2; ++blk) {
        const std::string p = "block" + std::to_string(blk) + "_";
        const auto a = conv_weights(W, W, init, rng, 0.5);
        const auto c = conv_weights(W, W, init, rng, 0.5);
        b.conv2d(p + "conv_a", x, W, W, a.kernel, a.bias)
            .relu(p + "relu", p + "conv_a")
            .conv2d(p + "conv_b", p + "relu", W, W, c.kernel, c.bias)
            .add(p + "add", x, p + "conv_b");
        x = p + "add";
    }

    auto out = conv_weights(W, 2, init, rng, 1.0);
    if (init == ReferenceInit::Identity) {
        out.kernel[tap(W, 0, 0, kCenter)] = 1.0f;
        out.kernel[tap(W, 0, 1, kCenter)] = -1.0f;
        out.kernel[tap(W, 1, 2, kCenter)] = 1.0f;
        out.kernel[tap(W, 1, 3, kCenter)] = -1.0f;
    }
    b.conv2d("conv_out", x, W, 2, out.kernel, out.bias);

    const std::size_t n = 2 * T * F;
    std::vector<float> head(n, 0.0f);
    std::vector<float> head_bias{init == ReferenceInit::Zero ? 0.0f : static_cast<float>(meta.snr_bucket_db)};
    if (init == ReferenceInit::Random) {
        const double a = 1.0 / std::sqrt(static_cast<double>(n));
        for (auto& v : head) v = static_cast<float>(rng.uniform(-a, a));
    }
    b.dense("snr_head", std::string(engine::kInputLayer), static_cast<std::uint32_t>(n), 1, head, head_bias);

    b.output(std::string(kCnnOutput), "conv_out", {2, T, F}).output(std::string(kSnrOutput), "snr_head", {1});
    b.meta(meta);
    return b.build();
}

std::size_t main_path_weight_count(const engine::EngineDefinition& def)
{
    std::size_t n = 0;
    for (const auto& L : def.layers)
        if (L.kind == engine::LayerKind::Conv2d) n += L.weight_len / sizeof(float);
    return n;
}

engine::GoldenVectors make_golden(const engine::Engine& e, std::size_t count, std::uint64_t seed)
{
    engine::GoldenVectors g;
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        TensorValue in(e.input_spec());
        for (auto& v : in.data()) v = static_cast<float>(rng.gaussian());
        const auto outs = engine::infer_all(e, in);
        for (std::size_t o = 0; o < outs.size(); ++o) {
            const auto d = outs[o].data();
            g.vectors.push_back({0, static_cast<std::uint32_t>(o), in.buffer(), {d.begin(), d.end()}});
        }
    }
    return g;
}

void write_reference_bank(const std::filesystem::path& dir, const std::vector<int>& snr_grid,
                          const std::vector<int>& prb_sizes, std::size_t T, ReferenceInit init, std::uint64_t seed,
                          std::size_t golden_count)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) raise(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    BankManifest m;
    m.snr_grid = snr_grid;
    m.prb_sizes = prb_sizes;
    for (int s : snr_grid) {
        for (int p : prb_sizes) {
            const engine::ModelMeta meta{s, p};
            auto def = reference_cnn(T, kPilotsPerPrb * static_cast<std::size_t>(p), init, seed, meta);
            const auto blob = engine::serialize_engine(def);
            const auto e = engine::make_engine(std::move(def));
            const auto golden = make_golden(e, golden_count,
                                            derive_seed(seed, {static_cast<std::uint64_t>(s + 1000),
                                                               static_cast<std::uint64_t>(p), 0x474f4c44ull}));
            const std::string stem = "cnn_snr" + std::to_string(s) + "_prb" + std::to_string(p);
            write_file_atomic((dir / (stem + ".aerb")).string(), blob);
            write_file_atomic((dir / (stem + ".aergv")).string(), engine::serialize_golden(golden));
            m.models.push_back({{s, p}, stem + ".aerb", stem + ".aergv"});
        }
    }
    const auto text = format_bank_manifest(m);
    write_file_atomic((dir / kBankFileName).string(),
                      std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace aerial_forge::chanest
