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
#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aerial_forge/chanest/reference_cnn.hpp"
#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/engine/golden.hpp"
#include "aerial_forge/harness/harness.hpp"
#include "support.hpp"

using namespace aerial_forge;
using namespace aerial_forge::harness;
namespace fs = std::filesystem;

namespace {

const std::string kManifest = std::string(AERIAL_FORGE_CONFIG_DIR) + "/receiver.yaml";

struct CliResult {
    int code;
    std::string out, err;
};

CliResult cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    const auto b = read_file(p.string());
    return {b.begin(), b.end()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST(SnrSpec, RangesAndLists)
{
    EXPECT_EQ(parse_snr_spec("0:20:5"), (std::vector<double>{0, 5, 10, 15, 20}));
    EXPECT_EQ(parse_snr_spec("-10:40:5").size(), 11u);
    EXPECT_EQ(parse_snr_spec("0:1:0.25").size(), 5u);
    EXPECT_EQ(parse_snr_spec("3,-1.5, 7"), (std::vector<double>{3, -1.5, 7}));
    EXPECT_EQ(parse_snr_spec("12"), (std::vector<double>{12}));
    for (const char* bad : {"0:20:0", "0:20:-5", "0:20", "a", "", "1,,2", "20:0:5"})
        EXPECT_AF_ERROR(parse_snr_spec(bad), ConfigError) << bad;
}

TEST(ParallelFor, CoversAllAndRethrows)
{
    std::vector<int> hit(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit) EXPECT_EQ(h, 1);
    EXPECT_AF_ERROR(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 6) raise(ErrorCode::NodeFailure, "boom");
                                 }),
                    NodeFailure);
}

TEST(Cli, SimulateRowsAndDeterminism)
{
    aftest::TempDir dir("sim");
    const std::vector<std::string> args{"simulate", "--manifest", kManifest, "--slots", "3", "--snr", "0:20:5", "--seed",
                                        "42", "--kinds", "ls,mmse", "--no-timing", "--out", (dir / "r.csv").string()};
    const auto r = cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto first = slurp(dir / "r.csv");
    EXPECT_EQ(first.rfind(std::string(kCsvHeaderComment) + "\n", 0), 0u);
    const auto rows = csv_rows(first);
    ASSERT_EQ(rows.size(), 11u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"kind", "snr_db", "slots", "mse_dmrs", "ber", "sinr_eff_db",
                                                 "tput_proxy_bits", "wall_time_ms"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][0], i <= 5 ? "ls" : "mmse");
        EXPECT_EQ(rows[i][2], "3");
        EXPECT_EQ(rows[i][7], "0");
    }
    ASSERT_EQ(cli(args).code, 0);
    EXPECT_EQ(slurp(dir / "r.csv"), first);
}

TEST(Cli, ThreadCountDoesNotChangeResults)
{
    const std::vector<std::string> args{"simulate", "--manifest", kManifest, "--slots", "4", "--snr", "0,10",
                                        "--kinds", "ls", "--no-timing"};
    ::setenv("AERIAL_FORGE_THREADS", "1", 1);
    const auto one = cli(args);
    ::setenv("AERIAL_FORGE_THREADS", "3", 1);
    const auto three = cli(args);
    ::unsetenv("AERIAL_FORGE_THREADS");
    ASSERT_EQ(one.code, 0) << one.err;
    EXPECT_EQ(one.out, three.out);
}

TEST(Cli, ManifestDefaultsAndJson)
{
    const auto r = cli({"simulate", "--manifest", kManifest, "--slots", "2", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["version"], 1);
    // snr 0:30:5 from the manifest, estimator kind from the manifest.
    ASSERT_EQ(j["rows"].size(), 7u);
    EXPECT_EQ(j["rows"][0]["kind"], "mmse");
    EXPECT_EQ(j["rows"][6]["snr_db"], 30.0);
    EXPECT_TRUE(j["rows"][0].contains("wall_time_ms"));
}

TEST(Cli, ConfigErrorsExitTwo)
{
    const auto missing = cli({"simulate", "--manifest", "/nowhere/m.yaml"});
    EXPECT_EQ(missing.code, 2);
    EXPECT_NE(missing.err.find("/nowhere/m.yaml"), std::string::npos);
    EXPECT_EQ(cli({"simulate", "--manifest", kManifest, "--snr", "0:10:0"}).code, 2);
    EXPECT_EQ(cli({"simulate", "--manifest", kManifest, "--slots", "0"}).code, 2);
    EXPECT_EQ(cli({"simulate", "--manifest", kManifest, "--kinds", "xyz", "--slots", "1"}).code, 2);
    EXPECT_EQ(cli({"simulate", "--manifest", kManifest, "--kinds", "cnn", "--model-dir", "/nowhere"}).code, 2);
    EXPECT_EQ(cli({"simulate", "--manifest", kManifest, "--format", "xml"}).code, 2);
    EXPECT_EQ(cli({"simulate"}).code, 2);
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"compare", "--manifest", kManifest, "--kinds", "ls"}).code, 2);
}

TEST(Cli, CompareGains)
{
    const auto self = cli({"compare", "--manifest", kManifest, "--kinds", "ls,ls", "--slots", "2", "--snr", "0:10:5",
                           "--no-timing"});
    ASSERT_EQ(self.code, 0) << self.err;
    const auto rows = csv_rows(self.out);
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0].back(), "tput_gain_pct");
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i].back()), 0.0);

    const auto oracle = cli({"compare", "--manifest", kManifest, "--kinds", "ls,perfect", "--slots", "2", "--snr",
                             "0:20:5", "--no-timing"});
    ASSERT_EQ(oracle.code, 0) << oracle.err;
    const auto o = csv_rows(oracle.out);
    ASSERT_EQ(o.size(), 11u);
    for (std::size_t i = 1; i < o.size(); ++i) {
        // Rows are ordered by SNR, then kind as listed.
        EXPECT_EQ(o[i][0], i % 2 ? "ls" : "perfect");
        if (o[i][0] == "perfect") EXPECT_GT(std::stod(o[i].back()), 0.0) << o[i][1];
    }
}

TEST(Cli, CompareWithIdentityCnnMatchesLs)
{
    aftest::TempDir dir("cmpcnn");
    ASSERT_EQ(cli({"make-bank", "--out", dir.path.string(), "--init", "identity", "--snr-grid=-5,5,15", "--prb-sizes",
                   "1,4,16", "--golden-count", "2"})
                  .code,
              0);
    const auto r = cli({"compare", "--manifest", kManifest, "--kinds", "ls,cnn", "--model-dir", dir.path.string(),
                        "--slots", "2", "--snr", "0,10", "--prb", "21", "--no-timing"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 5u);
    for (std::size_t i = 1; i < rows.size(); i += 2)
        for (std::size_t c = 2; c + 1 < rows[i].size(); ++c) EXPECT_EQ(rows[i][c], rows[i + 1][c]);
}

TEST(Cli, Dataset)
{
    aftest::TempDir dir("clids");
    const auto a = cli({"dataset", "--count", "12", "--seed", "4", "--out", (dir / "a.aeds").string()});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out.rfind("records 12 crc32 0x", 0), 0u);
    const auto b = cli({"dataset", "--count", "12", "--seed", "4", "--out", (dir / "b.aeds").string()});
    EXPECT_EQ(a.out.substr(0, 30), b.out.substr(0, 30));
    const auto c = cli({"dataset", "--count", "12", "--seed", "5", "--out", (dir / "c.aeds").string()});
    EXPECT_NE(a.out.substr(0, 30), c.out.substr(0, 30));
    EXPECT_EQ(cli({"dataset", "--count", "0", "--out", (dir / "z.aeds").string()}).code, 2);
    EXPECT_EQ(cli({"dataset", "--count", "2", "--prb-sizes", "0", "--out", (dir / "z.aeds").string()}).code, 2);
    EXPECT_EQ(cli({"dataset", "--count", "5", "--out", "/nowhere/x.aeds"}).code, 2);
}

TEST(Cli, ValidateBlob)
{
    aftest::TempDir dir("val");
    chanest::write_reference_bank(dir.path, {0}, {4}, 1, chanest::ReferenceInit::Random, 3, 4);
    const auto blob = (dir / "cnn_snr0_prb4.aerb").string();
    const auto golden = (dir / "cnn_snr0_prb4.aergv").string();

    const auto ok = cli({"validate-blob", "--blob", blob, "--golden", golden});
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_NE(ok.out.find("overall: PASS"), std::string::npos);

    auto g = engine::parse_golden(read_file(golden));
    g.vectors[2].expected[3] += 1e-2f; // an h_denoised vector
    write_file_atomic((dir / "bad.aergv").string(), engine::serialize_golden(g));
    const auto bad = cli({"validate-blob", "--blob", blob, "--golden", (dir / "bad.aergv").string()});
    EXPECT_EQ(bad.code, 4);
    EXPECT_NE(bad.out.find("vector 2: "), std::string::npos);
    EXPECT_NE(bad.out.find("FAIL"), std::string::npos);

    auto bytes = read_file(blob);
    bytes[bytes.size() / 2] ^= 0x40;
    write_file_atomic((dir / "bad.aerb").string(), bytes);
    const auto corrupt = cli({"validate-blob", "--blob", (dir / "bad.aerb").string(), "--golden", golden});
    EXPECT_EQ(corrupt.code, 3);
    EXPECT_NE(corrupt.err.find("CrcMismatch"), std::string::npos);

    write_file_atomic((dir / "empty.aergv").string(), engine::serialize_golden({}));
    const auto empty = cli({"validate-blob", "--blob", blob, "--golden", (dir / "empty.aergv").string()});
    EXPECT_EQ(empty.code, 0);
    EXPECT_NE(empty.out.find("vacuous"), std::string::npos);

    EXPECT_EQ(cli({"validate-blob", "--blob", (dir / "missing.aerb").string(), "--golden", golden}).code, 2);
}

TEST(Format, CsvNumbersAndGainColumn)
{
    std::vector<ResultRow> rows{{"ls", 5.0, 2, 0.5, 0.25, 1.5, 100.0, 12.5, std::nullopt},
                                {"cnn", 5.0, 2, 0.25, 0.125, 3.0, 150.0, 13.0, 50.0}};
    const auto csv = format_csv(rows, false, true);
    EXPECT_NE(csv.find("ls,5,2,0.5,0.25,1.5,100,0,"), std::string::npos);
    EXPECT_NE(csv.find("cnn,5,2,0.25,0.125,3,150,0,50"), std::string::npos);
    const auto timed = format_csv(rows, true, false);
    EXPECT_NE(timed.find("ls,5,2,0.5,0.25,1.5,100,12.5\n"), std::string::npos);
}

TEST(Compare, GainAgainstFirstKind)
{
    std::vector<ResultRow> rows{{"a", 0.0, 1, 0, 0, 0, 100.0, 0, {}},  {"a", 5.0, 1, 0, 0, 0, 200.0, 0, {}},
                                {"b", 0.0, 1, 0, 0, 0, 150.0, 0, {}},  {"b", 5.0, 1, 0, 0, 0, 100.0, 0, {}}};
    const auto out = compare_rows(rows, {"a", "b"});
    ASSERT_EQ(out.size(), 4u);
    EXPECT_EQ(out[0].kind, "a");
    EXPECT_EQ(out[1].kind, "b");
    EXPECT_DOUBLE_EQ(*out[0].tput_gain_pct, 0.0);
    EXPECT_DOUBLE_EQ(*out[1].tput_gain_pct, 50.0);
    EXPECT_DOUBLE_EQ(*out[3].tput_gain_pct, -50.0);
}
