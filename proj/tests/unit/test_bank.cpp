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
#include <fstream>
#include <map>
#include <numeric>

#include "aerial_forge/chanest/bank.hpp"
#include "aerial_forge/chanest/reference_cnn.hpp"
#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/graph/adapters.hpp"
#include "support.hpp"

using namespace aerial_forge;
using namespace aerial_forge::chanest;
namespace fs = std::filesystem;

namespace {

ModelBank memory_bank(const std::vector<int>& grid, const std::vector<int>& sizes, ReferenceInit init,
                      std::size_t T = 1)
{
    ModelBank bank(grid, sizes);
    for (int s : grid)
        for (int p : sizes) {
            // Distinct weights per block size so misplaced blocks would show.
            auto def = reference_cnn(T, kPilotsPerPrb * p, init, 100 + p, {s, p});
            bank.insert({s, p}, std::make_shared<const engine::Engine>(engine::make_engine(std::move(def))));
        }
    return bank;
}

ComplexGrid unpack_block(const TensorValue& planar)
{
    const auto c = graph::apply_adapter(graph::AdapterKind::unpack(), planar);
    const auto& s = c.spec();
    ComplexGrid g(s.shape[0], s.shape[1]);
    std::copy(c.complex_data().begin(), c.complex_data().end(), g.flat().begin());
    return g;
}

} // namespace

TEST(SelectModel, NearestWithLowerTieAndClamp)
{
    ModelBank bank(default_snr_grid(), default_prb_sizes());
    EXPECT_EQ(select_model(12.4, 4, bank).snr_bucket_db, 10);
    EXPECT_EQ(select_model(12.5, 4, bank).snr_bucket_db, 10);
    EXPECT_EQ(select_model(12.6, 4, bank).snr_bucket_db, 15);
    EXPECT_EQ(select_model(55.0, 4, bank).snr_bucket_db, 40);
    EXPECT_EQ(select_model(-30.0, 272, bank).snr_bucket_db, -10);
    EXPECT_EQ(select_model(0.0, 272, bank).prb_size, 272);
    EXPECT_AF_ERROR(select_model(0.0, 3, bank), UnsupportedPrbSize);
}

TEST(SelectModel, ConstantInsideBucket)
{
    ModelBank bank(default_snr_grid(), default_prb_sizes());
    for (int b : default_snr_grid())
        for (double e = -2.49; e < 2.5; e += 0.01) EXPECT_EQ(select_model(b + e, 16, bank).snr_bucket_db, b) << b + e;
}

TEST(Decompose, DocumentedExamples)
{
    const auto sizes = default_prb_sizes();
    EXPECT_EQ(decompose_prbs(4, sizes), (std::vector<int>{4}));
    EXPECT_EQ(decompose_prbs(273, sizes), (std::vector<int>{272, 1}));
    EXPECT_EQ(decompose_prbs(21, sizes), (std::vector<int>{16, 4, 1}));
    EXPECT_EQ(decompose_prbs(20, sizes), (std::vector<int>{16, 4}));
}

TEST(Decompose, GreedyCoverSums)
{
    const auto sizes = default_prb_sizes();
    for (int n = 1; n <= 600; ++n) {
        const auto b = decompose_prbs(n, sizes);
        EXPECT_EQ(std::accumulate(b.begin(), b.end(), 0), n);
        EXPECT_TRUE(std::is_sorted(b.rbegin(), b.rend()));
        EXPECT_EQ(decompose_prbs(n, sizes), b);
    }
    EXPECT_AF_ERROR(decompose_prbs(5, {4, 16}), UnsupportedPrbSize);
    EXPECT_AF_ERROR(decompose_prbs(0, sizes), InvalidArgument);
}

TEST(ReferenceCnn, MainPathWeightCount)
{
    // conv_in 2*32*9+32, four 32*32*9+32 convs, conv_out 32*2*9+2.
    const std::size_t expected = (2 * 32 * 9 + 32) + 4 * (32 * 32 * 9 + 32) + (32 * 2 * 9 + 2);
    EXPECT_EQ(expected, 38178u);
    for (std::size_t F : {6u, 24u, 1632u}) {
        const auto def = reference_cnn(1, F, ReferenceInit::Zero, 0, {0, int(F / 6)});
        EXPECT_EQ(main_path_weight_count(def), 38178u);
        EXPECT_EQ(def.weights.size(), 38178u + 2 * F + 1); // plus the SNR head
    }
}

TEST(ReferenceCnn, ArchitectureShape)
{
    const auto def = reference_cnn(2, 24, ReferenceInit::Random, 1, {0, 4});
    std::map<engine::LayerKind, int> count;
    for (const auto& L : def.layers) ++count[L.kind];
    EXPECT_EQ(count[engine::LayerKind::Conv2d], 6);
    EXPECT_EQ(count[engine::LayerKind::Add], 2);
    EXPECT_EQ(count[engine::LayerKind::Dense], 1);
    EXPECT_EQ(count[engine::LayerKind::Relu], 3);
    ASSERT_EQ(def.outputs.size(), 2u);
    EXPECT_EQ(def.outputs[0].spec.name, kCnnOutput);
    EXPECT_EQ(def.outputs[0].spec.shape, (std::vector<std::size_t>{2, 2, 24}));
    EXPECT_EQ(def.outputs[1].spec.name, kSnrOutput);
    EXPECT_EQ(def.input.name, kCnnInput);
}

TEST(EstimateSnr, ConstantHead)
{
    // Identity main path plus a zero-weight head with bias 5.
    const std::size_t F = 12;
    std::vector<float> k(4 * 9, 0.0f), kb(2, 0.0f);
    k[0 * 9 + 4] = 1.0f;
    k[3 * 9 + 4] = 1.0f;
    const std::vector<float> m(2 * F, 0.0f), mb{5.0f};
    const auto e = engine::make_engine(engine::EngineBuilder({std::string(kCnnInput), DType::Float32, {2, 1, F}})
                                           .conv2d("c", "input", 2, 2, k, kb)
                                           .dense("snr", "input", 2 * F, 1, m, mb)
                                           .output(std::string(kCnnOutput), "c", {2, 1, F})
                                           .output(std::string(kSnrOutput), "snr", {1})
                                           .build());
    Rng rng(1);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(estimate_snr(aftest::random_grid(1, F, rng), e), 5.0);
    EXPECT_AF_ERROR(estimate_snr(aftest::random_grid(1, F + 6, rng), e), SpecMismatch);

    const auto headless = engine::make_engine(engine::EngineBuilder({std::string(kCnnInput), DType::Float32, {2, 1, F}})
                                                  .conv2d("c", "input", 2, 2, k, kb)
                                                  .output(std::string(kCnnOutput), "c", {2, 1, F})
                                                  .build());
    EXPECT_AF_ERROR(estimate_snr(aftest::random_grid(1, F, rng), headless), SpecMismatch);
}

TEST(CnnEstimate, IdentityEnginesReturnLs)
{
    const auto bank = memory_bank(default_snr_grid(), default_prb_sizes(), ReferenceInit::Identity);
    Rng rng(2);
    for (int prb : {4, 20, 21, 273}) {
        LsEstimate ls{aftest::random_grid(1, kPilotsPerPrb * prb, rng), 0.1};
        const auto r = cnn_estimate(ls, bank);
        EXPECT_EQ(r.h, ls.h_ls) << prb;
        EXPECT_EQ(r.blocks, decompose_prbs(prb, default_prb_sizes()));
        // Identity heads report their own bucket; the median engine answers.
        EXPECT_EQ(r.snr_est_db, 15.0);
        EXPECT_EQ(r.snr_bucket_db, 15);
    }
}

TEST(CnnEstimate, StitchingIsBlockwiseConcatenation)
{
    const std::vector<int> grid{-5, 5, 15}, sizes{1, 4, 16};
    const auto bank = memory_bank(grid, sizes, ReferenceInit::Random);
    Rng rng(3);
    LsEstimate ls{aftest::random_grid(1, kPilotsPerPrb * 21, rng), 0.1};
    const auto r = cnn_estimate(ls, bank);
    ASSERT_EQ(r.blocks, (std::vector<int>{16, 4, 1}));
    std::size_t f0 = 0;
    for (int b : r.blocks) {
        const std::size_t w = kPilotsPerPrb * b;
        const auto& e = bank.engine(select_model(r.snr_est_db, b, bank));
        const auto part = unpack_block(engine::infer(e, pack_block(ls.h_ls, f0, w)));
        for (std::size_t f = 0; f < w; ++f) EXPECT_EQ(r.h(0, f0 + f), part(0, f)) << f0 + f;
        f0 += w;
    }
}

TEST(CnnEstimate, ChangesStayInsideTheirBlock)
{
    const std::vector<int> grid{0}, sizes{1, 4, 16};
    const auto bank = memory_bank(grid, sizes, ReferenceInit::Random);
    Rng rng(4);
    LsEstimate ls{aftest::random_grid(1, kPilotsPerPrb * 21, rng), 0.1};
    const auto a = cnn_estimate(ls, bank);
    ls.h_ls(0, 100) += cf32{0.5f, 0.5f}; // inside the 4-PRB block [96, 120)
    const auto b = cnn_estimate(ls, bank);
    for (std::size_t f = 0; f < ls.h_ls.cols(); ++f) {
        if (f < 96 || f >= 120) EXPECT_EQ(a.h(0, f), b.h(0, f)) << f;
    }
    EXPECT_NE(a.h(0, 100), b.h(0, 100));
}

TEST(Bank, InsertChecksShapes)
{
    ModelBank bank({0, 5}, {1, 4});
    auto e = std::make_shared<const engine::Engine>(
        engine::make_engine(reference_cnn(1, 6, ReferenceInit::Zero, 0, {0, 1})));
    EXPECT_AF_ERROR(bank.insert({0, 4}, e), BankError);
    EXPECT_AF_ERROR(bank.insert({3, 1}, e), BankError);
    bank.insert({0, 1}, e);
    EXPECT_EQ(bank.time_symbols(), 1u);
    EXPECT_AF_ERROR(bank.check_complete(), BankError);
    EXPECT_AF_ERROR(ModelBank({5, 0}, {1}), BankError);
}

TEST(Bank, WriteLoadRoundtrip)
{
    aftest::TempDir dir("bank");
    write_reference_bank(dir.path, {-5, 5, 15}, {1, 4, 16}, 1, ReferenceInit::Random, 7, 3);
    const auto bank = load_bank(dir.path);
    EXPECT_EQ(bank.size(), 9u);
    EXPECT_EQ(bank.snr_grid(), (std::vector<int>{-5, 5, 15}));
    EXPECT_EQ(bank.prb_sizes(), (std::vector<int>{16, 4, 1}));
    EXPECT_EQ(bank.engine({5, 4}).meta(), (engine::ModelMeta{5, 4}));

    const auto text = std::string(reinterpret_cast<const char*>(read_file((dir / kBankFileName).string()).data()),
                                  read_file((dir / kBankFileName).string()).size());
    const auto m = parse_bank_manifest(text);
    EXPECT_EQ(m.models.size(), 9u);
    EXPECT_EQ(parse_bank_manifest(format_bank_manifest(m)).models.size(), 9u);
    EXPECT_EQ(format_bank_manifest(parse_bank_manifest(format_bank_manifest(m))), format_bank_manifest(m));
}

TEST(Bank, DefectsAreBankErrors)
{
    aftest::TempDir dir("bankbad");
    write_reference_bank(dir.path, {0, 5}, {1}, 1, ReferenceInit::Random, 7, 2);

    // Golden that no longer matches.
    const auto golden = (dir / "cnn_snr5_prb1.aergv").string();
    const auto original = read_file(golden);
    auto gv = engine::parse_golden(original);
    gv.vectors[0].expected[0] += 1.0f;
    write_file_atomic(golden, engine::serialize_golden(gv));
    EXPECT_AF_ERROR(load_bank(dir.path), BankError);
    EXPECT_NO_THROW(load_bank(dir.path, false));
    write_file_atomic(golden, original);

    // A blob filed under the wrong key.
    fs::copy_file(dir / "cnn_snr0_prb1.aerb", dir / "cnn_snr5_prb1.aerb", fs::copy_options::overwrite_existing);
    EXPECT_AF_ERROR(load_bank(dir.path, false), BankError);

    fs::remove(dir / "cnn_snr5_prb1.aerb");
    EXPECT_AF_ERROR(load_bank(dir.path, false), BankError);
    EXPECT_AF_ERROR(load_bank(dir / "nowhere"), BankError);

    EXPECT_AF_ERROR(parse_bank_manifest("version: 1\nmodels: []\nsurprise: 2\n"), BankError);
    EXPECT_AF_ERROR(parse_bank_manifest("version: 2\nsnr_grid: [0]\nprb_sizes: [1]\nmodels: []\n"), BankError);
}


