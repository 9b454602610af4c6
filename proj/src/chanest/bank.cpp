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
#include "aerial_forge/chanest/bank.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "aerial_forge/core/binary_io.hpp"
#include "aerial_forge/core/error.hpp"
#include "aerial_forge/engine/golden.hpp"
#include "aerial_forge/graph/adapters.hpp"

namespace aerial_forge::chanest {

std::vector<int> default_snr_grid()
{
    std::vector<int> g;
    for (int s = -10; s <= 40; s += 5) g.push_back(s);
    return g;
}

std::vector<int> default_prb_sizes() { return {1, 4, 16, 64, 272}; }

std::string ModelKey::str() const
{
    return "(snr " + std::to_string(snr_bucket_db) + " dB, " + std::to_string(prb_size) + " PRB)";
}

// ---------------------------------------------------------------- ModelBank

ModelBank::ModelBank(std::vector<int> snr_grid, std::vector<int> prb_sizes)
    : snr_grid_(std::move(snr_grid)), prb_sizes_(std::move(prb_sizes))
{
    require(!snr_grid_.empty() && !prb_sizes_.empty(), ErrorCode::BankError, "bank needs SNR buckets and PRB sizes");
    for (std::size_t i = 1; i < snr_grid_.size(); ++i)
        require(snr_grid_[i] > snr_grid_[i - 1], ErrorCode::BankError, "bank SNR grid must be strictly increasing");
    std::sort(prb_sizes_.begin(), prb_sizes_.end(), std::greater<>());
    for (std::size_t i = 0; i < prb_sizes_.size(); ++i) {
        require(prb_sizes_[i] > 0, ErrorCode::BankError, "bank PRB sizes must be positive");
        require(i == 0 || prb_sizes_[i] != prb_sizes_[i - 1], ErrorCode::BankError, "bank PRB sizes repeat");
    }
}

void ModelBank::insert(ModelKey key, std::shared_ptr<const engine::Engine> e)
{
    require(e != nullptr, ErrorCode::BankError, "null engine for " + key.str());
    require(std::find(snr_grid_.begin(), snr_grid_.end(), key.snr_bucket_db) != snr_grid_.end() &&
                std::find(prb_sizes_.begin(), prb_sizes_.end(), key.prb_size) != prb_sizes_.end(),
            ErrorCode::BankError, key.str() + " is outside the bank grid");
    require(!contains(key), ErrorCode::BankError, key.str() + " is listed twice");

    const auto& in = e->input_spec();
    const std::size_t width = kPilotsPerPrb * static_cast<std::size_t>(key.prb_size);
    require(in.dtype == DType::Float32 && in.shape.size() == 3 && in.shape[0] == 2 && in.shape[2] == width,
            ErrorCode::BankError, key.str() + " engine input " + in.describe() + " is not (2, T, " +
                                      std::to_string(width) + ")");
    require(time_symbols_ == 0 || in.shape[1] == time_symbols_, ErrorCode::BankError,
            key.str() + " engine disagrees with the bank on T_dmrs");
    require(!e->outputs().empty() && e->outputs()[0].spec.name == kCnnOutput && e->outputs()[0].spec.shape == in.shape,
            ErrorCode::BankError, key.str() + " engine primary output must be h_denoised shaped like its input");
    time_symbols_ = in.shape[1];
    engines_.emplace(key, std::move(e));
}

const engine::Engine& ModelBank::engine(ModelKey key) const
{
    auto it = engines_.find(key);
    if (it == engines_.end()) raise(ErrorCode::BankError, "bank has no model for " + key.str());
    return *it->second;
}

void ModelBank::check_complete() const
{
    for (int b : snr_grid_)
        for (int p : prb_sizes_)
            require(contains({b, p}), ErrorCode::BankError, "bank is missing " + ModelKey{b, p}.str());
}

// ---------------------------------------------------------------- selection

ModelKey select_model(double snr_est_db, int prb_block_size, const ModelBank& bank)
{
    const auto& sizes = bank.prb_sizes();
    if (std::find(sizes.begin(), sizes.end(), prb_block_size) == sizes.end())
        raise(ErrorCode::UnsupportedPrbSize, "no models for " + std::to_string(prb_block_size) + " PRB blocks");
    require(!std::isnan(snr_est_db), ErrorCode::InvalidArgument, "SNR estimate is NaN");
    const auto& grid = bank.snr_grid();
    const double snr = std::clamp(snr_est_db, static_cast<double>(grid.front()), static_cast<double>(grid.back()));
    int best = grid.front();
    for (int b : grid)
        if (std::abs(snr - b) < std::abs(snr - best)) best = b;
    return {best, prb_block_size};
}

std::vector<int> decompose_prbs(int n, const std::vector<int>& supported)
{
    require(n >= 1, ErrorCode::InvalidArgument, "PRB allocation must be >= 1");
    std::vector<int> sizes = supported;
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    std::vector<int> out;
    int left = n;
    for (int s : sizes) {
        if (s <= 0) continue;
        while (left >= s) {
            out.push_back(s);
            left -= s;
        }
    }
    if (left != 0)
        raise(ErrorCode::UnsupportedPrbSize, "cannot cover " + std::to_string(n) + " PRB with the supported sizes");
    return out;
}

// ---------------------------------------------------------------- CNN

TensorValue pack_block(const ComplexGrid& h, std::size_t f0, std::size_t width)
{
    require(f0 + width <= h.cols(), ErrorCode::InvalidArgument, "block exceeds the estimate width");
    std::vector<cf32> sub(h.rows() * width);
    for (std::size_t t = 0; t < h.rows(); ++t)
        std::copy_n(h.row(t).begin() + static_cast<std::ptrdiff_t>(f0), width, sub.begin() + static_cast<std::ptrdiff_t>(t * width));
    TensorSpec spec{std::string(kCnnInput), DType::Complex64, {h.rows(), width}};
    auto planar = graph::apply_adapter(graph::AdapterKind::pack(), TensorValue::from_complex(spec, sub));
    planar.mutable_spec().name = std::string(kCnnInput);
    return planar;
}

namespace {

void check_fits(const ComplexGrid& h_block, const engine::Engine& e)
{
    const auto& in = e.input_spec().shape;
    if (in.size() != 3 || in[1] != h_block.rows() || in[2] != h_block.cols())
        raise(ErrorCode::SpecMismatch, "LS block (" + std::to_string(h_block.rows()) + ", " +
                                           std::to_string(h_block.cols()) + ") does not fit engine input " +
                                           e.input_spec().describe());
}

} // namespace

double estimate_snr(const ComplexGrid& h_block, const engine::Engine& e)
{
    check_fits(h_block, e);
    const std::size_t head = e.output_index(kSnrOutput);
    require(e.outputs()[head].spec.element_count() == 1, ErrorCode::SpecMismatch, "snr_db head must be a scalar");
    const auto outs = engine::infer_all(e, pack_block(h_block, 0, h_block.cols()));
    return outs[head].data()[0];
}

CnnResult cnn_estimate(const LsEstimate& ls, const ModelBank& bank)
{
    const std::size_t F = ls.h_ls.cols();
    require(F % kPilotsPerPrb == 0 && F > 0, ErrorCode::SpecMismatch, "LS width is not a whole number of PRBs");
    if (ls.h_ls.rows() != bank.time_symbols())
        raise(ErrorCode::SpecMismatch, "bank engines expect " + std::to_string(bank.time_symbols()) +
                                           " DMRS symbols, estimate has " + std::to_string(ls.h_ls.rows()));
    CnnResult r;
    r.blocks = decompose_prbs(static_cast<int>(F / kPilotsPerPrb), bank.prb_sizes());

    // SNR from the median-bucket engine of the largest block, on the first
    // such block.
    const int lead = r.blocks.front();
    const auto& grid = bank.snr_grid();
    const auto& head = bank.engine({grid[(grid.size() - 1) / 2], lead});
    const std::size_t lead_w = kPilotsPerPrb * static_cast<std::size_t>(lead);
    ComplexGrid lead_block(ls.h_ls.rows(), lead_w);
    for (std::size_t t = 0; t < ls.h_ls.rows(); ++t)
        std::copy_n(ls.h_ls.row(t).begin(), lead_w, lead_block.row(t).begin());
    r.snr_est_db = estimate_snr(lead_block, head);
    r.snr_bucket_db = select_model(r.snr_est_db, lead, bank).snr_bucket_db;

    r.h = ComplexGrid(ls.h_ls.rows(), F);
    std::size_t f0 = 0;
    for (int b : r.blocks) {
        const auto& e = bank.engine(select_model(r.snr_est_db, b, bank));
        const std::size_t w = kPilotsPerPrb * static_cast<std::size_t>(b);
        auto out = graph::apply_adapter(graph::AdapterKind::unpack(), engine::infer(e, pack_block(ls.h_ls, f0, w)));
        const auto vals = out.complex_data();
        for (std::size_t t = 0; t < ls.h_ls.rows(); ++t)
            std::copy_n(vals.begin() + static_cast<std::ptrdiff_t>(t * w), w,
                        r.h.row(t).begin() + static_cast<std::ptrdiff_t>(f0));
        f0 += w;
    }
    return r;
}

// ---------------------------------------------------------------- bank.yaml

namespace {

template <typename T>
T bank_scalar(const YAML::Node& n, const std::string& what)
{
    if (!n || !n.IsScalar()) raise(ErrorCode::BankError, "bank.yaml: '" + what + "' must be a scalar");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        raise(ErrorCode::BankError, "bank.yaml: bad value for '" + what + "'");
    }
}

std::vector<int> bank_int_list(const YAML::Node& n, const std::string& what)
{
    if (!n || !n.IsSequence() || n.size() == 0) raise(ErrorCode::BankError, "bank.yaml: '" + what + "' must be a non-empty list");
    std::vector<int> out;
    for (const auto& v : n) out.push_back(bank_scalar<int>(v, what));
    return out;
}

void bank_keys(const YAML::Node& n, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!n.IsMap()) raise(ErrorCode::BankError, "bank.yaml: " + where + " must be a mapping");
    for (const auto& kv : n) {
        const auto k = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            raise(ErrorCode::BankError, "bank.yaml: unknown key '" + k + "' in " + where);
    }
}

} // namespace

BankManifest parse_bank_manifest(const std::string& text)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        raise(ErrorCode::BankError, std::string("bank.yaml does not parse: ") + e.what());
    }
    // Trainers may record provenance under `producer` and `training`.
    bank_keys(root, {"version", "snr_grid", "prb_sizes", "models", "producer", "training"}, "the top level");
    BankManifest m;
    m.version = bank_scalar<int>(root["version"], "version");
    if (m.version != 1) raise(ErrorCode::BankError, "bank.yaml version " + std::to_string(m.version) + " is not supported");
    m.snr_grid = bank_int_list(root["snr_grid"], "snr_grid");
    m.prb_sizes = bank_int_list(root["prb_sizes"], "prb_sizes");
    const auto models = root["models"];
    if (!models || !models.IsSequence()) raise(ErrorCode::BankError, "bank.yaml: 'models' must be a list");
    for (const auto& e : models) {
        bank_keys(e, {"snr_bucket", "prb_size", "blob", "golden"}, "a model entry");
        BankEntry b;
        b.key.snr_bucket_db = bank_scalar<int>(e["snr_bucket"], "snr_bucket");
        b.key.prb_size = bank_scalar<int>(e["prb_size"], "prb_size");
        b.blob = bank_scalar<std::string>(e["blob"], "blob");
        if (e["golden"]) b.golden = bank_scalar<std::string>(e["golden"], "golden");
        m.models.push_back(std::move(b));
    }
    return m;
}

std::string format_bank_manifest(const BankManifest& m)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "version" << YAML::Value << m.version;
    out << YAML::Key << "snr_grid" << YAML::Value << YAML::Flow << m.snr_grid;
    out << YAML::Key << "prb_sizes" << YAML::Value << YAML::Flow << m.prb_sizes;
    out << YAML::Key << "models" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : m.models) {
        out << YAML::BeginMap;
        out << YAML::Key << "snr_bucket" << YAML::Value << e.key.snr_bucket_db;
        out << YAML::Key << "prb_size" << YAML::Value << e.key.prb_size;
        out << YAML::Key << "blob" << YAML::Value << e.blob;
        if (!e.golden.empty()) out << YAML::Key << "golden" << YAML::Value << e.golden;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

ModelBank load_bank(const std::filesystem::path& dir, bool verify)
{
    const auto path = dir / kBankFileName;
    std::string text;
    try {
        const auto bytes = read_file(path.string());
        text.assign(bytes.begin(), bytes.end());
    } catch (const Error& e) {
        raise(ErrorCode::BankError, e.what());
    }
    const auto m = parse_bank_manifest(text);
    ModelBank bank(m.snr_grid, m.prb_sizes);
    for (const auto& entry : m.models) {
        try {
            auto e = std::make_shared<const engine::Engine>(engine::load_engine_file(dir / entry.blob));
            if (e->meta() != engine::ModelMeta{entry.key.snr_bucket_db, entry.key.prb_size})
                raise(ErrorCode::BankError, "blob metadata (" + std::to_string(e->meta().snr_bucket_db) + " dB, " +
                                                std::to_string(e->meta().prb_size) + " PRB) disagrees with bank.yaml");
            if (verify && !entry.golden.empty()) {
                const auto report = engine::verify_golden(*e, engine::load_golden_file(dir / entry.golden));
                if (!report.passed)
                    raise(ErrorCode::BankError, "golden vectors fail (" + std::to_string(report.failures()) + " of " +
                                                    std::to_string(report.vectors.size()) + ")");
            }
            bank.insert(entry.key, std::move(e));
        } catch (const Error& e) {
            raise(ErrorCode::BankError, "bank entry " + entry.key.str() + " [" + entry.blob + "]: " + e.what());
        }
    }
    bank.check_complete();
    return bank;
}

} // namespace aerial_forge::chanest
