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
#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>

#include "aerial_forge/chanest/bank.hpp"
#include "aerial_forge/chanest/nodes.hpp"
#include "aerial_forge/chanest/reference_cnn.hpp"
#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/core/error.hpp"
#include "aerial_forge/engine/golden.hpp"
#include "aerial_forge/graph/manifest.hpp"
#include "aerial_forge/harness/harness.hpp"
#include "aerial_forge/linklevel/dataset.hpp"

namespace aerial_forge::harness {

namespace {

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) raise(ErrorCode::ConfigError, "empty entry in list '" + text + "'");
        out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty()) raise(ErrorCode::ConfigError, "empty list");
    return out;
}

std::vector<int> int_list(const std::string& text)
{
    std::vector<int> out;
    for (double v : parse_snr_spec(text)) {
        if (v != std::floor(v)) raise(ErrorCode::ConfigError, "'" + text + "' must list integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

int exit_code_for(const Error& e)
{
    switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DuplicateKind:
    case ErrorCode::UnknownKind:
    case ErrorCode::CycleDetected:
    case ErrorCode::PortMismatch:
    case ErrorCode::BlobLoadError:
    case ErrorCode::BankError:
    case ErrorCode::UnsupportedPrbSize: return kExitConfig;
    default: return kExitRuntime;
    }
}

void emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

struct SweepFlags {
    std::string manifest;
    std::optional<std::size_t> slots;
    std::optional<std::string> snr;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
    bool no_timing = false;
    std::string kinds;
    std::optional<std::size_t> prb;
    std::optional<std::string> profile;
    std::optional<double> delay_spread_ns;
    std::optional<double> speed;
    std::optional<std::string> model_dir;
};

void add_sweep_flags(CLI::App* app, SweepFlags& f, bool kinds_required)
{
    app->add_option("--manifest", f.manifest, "receiver manifest (YAML)")->required();
    app->add_option("--slots", f.slots, "slots per (kind, SNR) point");
    app->add_option("--snr", f.snr, "SNR list a,b,c or range lo:hi:step [dB]");
    app->add_option("--seed", f.seed, "base seed");
    app->add_option("--out", f.out, "output file (default: standard output)");
    app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_flag("--no-timing", f.no_timing, "write 0 in the wall_time_ms column");
    auto* k = app->add_option("--kinds", f.kinds, "comma-separated estimator kinds, e.g. ls,mmse,cnn");
    if (kinds_required) k->required();
    app->add_option("--prb", f.prb, "override the PRB allocation");
    app->add_option("--profile", f.profile, "override the channel profile (TDL-A, TDL-B, TDL-C, AWGN)");
    app->add_option("--delay-spread-ns", f.delay_spread_ns, "override the delay spread");
    app->add_option("--speed", f.speed, "override the UE speed [m/s]");
    app->add_option("--model-dir", f.model_dir, "override estimator.model_dir");
}

RunConfig to_run_config(const SweepFlags& f)
{
    RunConfig c;
    c.manifest = f.manifest;
    // Flags win over the manifest's simulation section.
    const auto m = graph::load_manifest(f.manifest);
    auto sim = [&](const char* key) -> std::optional<std::string> {
        auto it = m.simulation.find(key);
        return it == m.simulation.end() ? std::nullopt : std::optional(it->second);
    };
    if (f.slots) {
        c.slots = *f.slots;
    } else if (auto s = sim("slots")) {
        c.slots = static_cast<std::size_t>(int_list(*s).at(0));
    }
    if (f.seed) {
        c.seed = *f.seed;
    } else if (auto s = sim("seed")) {
        c.seed = static_cast<std::uint64_t>(int_list(*s).at(0));
    }
    const auto snr = f.snr ? f.snr : sim("snr");
    c.snrs = parse_snr_spec(snr.value_or("0:20:5"));
    if (!f.kinds.empty()) c.kinds = split_list(f.kinds);
    c.timing = !f.no_timing;
    c.prb = f.prb;
    c.profile = f.profile;
    c.delay_spread_ns = f.delay_spread_ns;
    c.speed_mps = f.speed;
    c.model_dir = f.model_dir;
    require(c.slots >= 1, ErrorCode::ConfigError, "slots must be >= 1");
    return c;
}

int cmd_simulate(const SweepFlags& f, bool compare, std::ostream& out)
{
    const auto cfg = to_run_config(f);
    auto rows = run_sweep(cfg);
    if (compare) rows = compare_rows(std::move(rows), cfg.kinds);
    const auto text = f.format == "json" ? format_json(rows, cfg.timing, compare) : format_csv(rows, cfg.timing, compare);
    emit(text, f.out, out);
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"aerial-forge: channel-estimation pipeline runtime and link-level harness", "aerial-forge"};
    app.require_subcommand(1);

    SweepFlags sim_flags, cmp_flags;
    add_sweep_flags(app.add_subcommand("simulate", "run an SNR sweep for one or more estimator kinds"), sim_flags, false);
    add_sweep_flags(app.add_subcommand("compare", "compare estimator kinds on identical seeds"), cmp_flags, true);

    linklevel::DatasetConfig ds;
    std::string ds_out, ds_prb = "1,4,16", ds_snr = "-10:40:5", ds_profiles = "TDL-A,TDL-B,TDL-C", ds_dmrs = "2";
    std::int64_t ds_count = -1;
    auto* dataset = app.add_subcommand("dataset", "generate a training dataset (.aeds)");
    dataset->add_option("--count", ds_count, "number of records")->required();
    dataset->add_option("--seed", ds.seed, "seed");
    dataset->add_option("--out", ds_out, "output .aeds path")->required();
    dataset->add_option("--prb-sizes", ds_prb, "PRB sizes to draw from");
    dataset->add_option("--snr", ds_snr, "SNRs to draw from (list or lo:hi:step)");
    dataset->add_option("--profiles", ds_profiles, "channel profiles to draw from");
    dataset->add_option("--dmrs-symbols", ds_dmrs, "DMRS symbol indices, e.g. 2 or 2,11");
    dataset->add_option("--speed", ds.speed_mps, "UE speed [m/s]");

    std::string blob_path, golden_path;
    auto* validate = app.add_subcommand("validate-blob", "check an engine blob against golden vectors");
    validate->add_option("--blob", blob_path, "engine blob (.aerb)")->required();
    validate->add_option("--golden", golden_path, "golden vectors (.aergv)")->required();

    std::string bank_out, bank_init = "identity", bank_snr = "-10:40:5", bank_prb = "1,4,16,64,272";
    std::size_t bank_t = 1, bank_golden = 16;
    std::uint64_t bank_seed = 0;
    auto* bank = app.add_subcommand("make-bank", "write a reference CNN bank (identity, zero or random weights)");
    bank->add_option("--out", bank_out, "bank directory")->required();
    bank->add_option("--init", bank_init, "identity, zero or random")->check(CLI::IsMember({"identity", "zero", "random"}));
    bank->add_option("--snr-grid", bank_snr, "SNR buckets");
    bank->add_option("--prb-sizes", bank_prb, "block sizes");
    bank->add_option("--dmrs-symbols", bank_t, "DMRS symbols per slot (T)");
    bank->add_option("--seed", bank_seed, "weight seed");
    bank->add_option("--golden-count", bank_golden, "golden inputs per model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "aerial-forge: " << e.what() << "\n";
        return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (app.got_subcommand("simulate")) return cmd_simulate(sim_flags, false, out);
        if (app.got_subcommand("compare")) return cmd_simulate(cmp_flags, true, out);
        if (app.got_subcommand("dataset")) {
            require(ds_count >= 1, ErrorCode::ConfigError, "--count must be >= 1");
            ds.count = static_cast<std::uint64_t>(ds_count);
            ds.prb_sizes = int_list(ds_prb);
            ds.snr_db = parse_snr_spec(ds_snr);
            ds.profiles = split_list(ds_profiles);
            ds.dmrs_symbols = chanest::parse_symbol_list(ds_dmrs);
            try {
                ds.validate();
            } catch (const Error& e) {
                raise(ErrorCode::ConfigError, e.what());
            }
            const auto s = linklevel::generate_dataset(ds, ds_out);
            out << "records " << s.count << " crc32 0x" << std::hex << std::setw(8) << std::setfill('0') << s.crc
                << std::dec << " path " << ds_out << "\n";
            return kExitOk;
        }
        if (app.got_subcommand("validate-blob")) {
            const auto e = engine::load_engine_file(blob_path);
            const auto g = engine::load_golden_file(golden_path);
            const auto report = engine::verify_golden(e, g);
            out << report.str();
            if (report.vacuous) err << "aerial-forge: warning: golden file holds no vectors\n";
            return report.passed ? kExitOk : kExitParity;
        }
        if (app.got_subcommand("make-bank")) {
            const auto snrs = int_list(bank_snr);
            const auto sizes = int_list(bank_prb);
            chanest::write_reference_bank(bank_out, snrs, sizes, bank_t, chanest::reference_init_from_string(bank_init),
                                          bank_seed, bank_golden);
            out << "wrote " << snrs.size() * sizes.size() << " models to " << bank_out << "\n";
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "aerial-forge: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "aerial-forge: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"aerial-forge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace aerial_forge::harness
