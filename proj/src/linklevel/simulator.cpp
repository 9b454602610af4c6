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
#include "aerial_forge/linklevel/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aerial_forge/chanest/nodes.hpp"
#include "aerial_forge/core/error.hpp"
#include "aerial_forge/core/grid_tensor.hpp"
#include "aerial_forge/core/random.hpp"

namespace aerial_forge::linklevel {

namespace ports = chanest::ports;

ComplexGrid Slot::rx_pilots(const GridConfig& grid) const
{
    ComplexGrid out(grid.n_dmrs(), grid.n_pilots());
    for (std::size_t t = 0; t < grid.n_dmrs(); ++t)
        for (std::size_t f = 0; f < grid.n_pilots(); ++f) out(t, f) = rx(grid.dmrs_symbols[t], 2 * f);
    return out;
}

ComplexGrid Slot::h_dmrs(const GridConfig& grid) const
{
    ComplexGrid out(grid.n_dmrs(), grid.n_pilots());
    for (std::size_t t = 0; t < grid.n_dmrs(); ++t)
        for (std::size_t f = 0; f < grid.n_pilots(); ++f) out(t, f) = h(grid.dmrs_symbols[t], 2 * f);
    return out;
}

Slot generate_slot(const GridConfig& grid, const ChannelConfig& channel, double snr_db, std::uint64_t seed,
                   std::uint64_t slot_index)
{
    grid.validate();
    require(std::isfinite(snr_db), ErrorCode::InvalidArgument, "snr_db must be finite");
    const std::size_t S = grid.n_symbols, N = grid.n_subcarriers();
    Slot slot;
    slot.noise_var = std::pow(10.0, -snr_db / 10.0);

    // Channel: one trajectory per seed, sampled at slot_index.
    const auto taps = gen_tdl_channel(channel.tdl(), channel.doppler_hz(), slot_index, derive_seed(seed, {streams::channel}),
                                      channel.slot_duration_s);
    const auto H = cir_to_cfr(taps, grid);
    slot.h = ComplexGrid(S, N);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t k = 0; k < N; ++k) slot.h(s, k) = cf32(H[k]);

    slot.tx = ComplexGrid(S, N);
    slot.pilots = gen_dmrs(derive_seed(seed, {streams::dmrs, slot_index}), grid);
    for (std::size_t t = 0; t < grid.n_dmrs(); ++t)
        for (std::size_t f = 0; f < grid.n_pilots(); ++f) slot.tx(grid.dmrs_symbols[t], 2 * f) = slot.pilots(t, f);

    Rng bit_rng(derive_seed(seed, {streams::bits, slot_index}));
    slot.bits.resize(grid.data_re_count() * static_cast<std::size_t>(grid.bits_per_symbol()));
    for (auto& b : slot.bits) b = static_cast<std::uint8_t>(bit_rng.bit());
    const auto symbols = modulate(slot.bits, grid.qam_order);
    std::size_t i = 0;
    for (auto s : grid.data_symbols())
        for (std::size_t k = 0; k < N; ++k) slot.tx(s, k) = symbols[i++];

    Rng noise_rng(derive_seed(seed, {streams::noise, slot_index}));
    const double sigma = std::sqrt(slot.noise_var);
    slot.rx = ComplexGrid(S, N);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t k = 0; k < N; ++k) {
            const cf64 n = noise_rng.complex_gaussian(1.0) * sigma;
            slot.rx(s, k) = cf32(cf64(slot.tx(s, k)) * H[k] + n);
        }
    }
    return slot;
}

double throughput_proxy(std::span<const double> sinr, double cap_bits)
{
    double bits = 0.0;
    for (double v : sinr) bits += std::min(std::log2(1.0 + std::max(v, 0.0)), cap_bits);
    return bits;
}

// ---------------------------------------------------------------- Receiver

namespace {

void expect_port(const std::map<std::string, TensorSpec>& specs, const std::string& name, DType dtype,
                 const std::vector<std::size_t>& shape, const char* side, bool optional = false)
{
    auto it = specs.find(name);
    if (it == specs.end()) {
        if (optional) return;
        raise(ErrorCode::PortMismatch, std::string("receiver graph lacks ") + side + " '" + name + "'");
    }
    TensorSpec want{name, dtype, shape};
    if (!it->second.compatible_with(want))
        raise(ErrorCode::PortMismatch, std::string("receiver ") + side + " " + it->second.describe() + " should be " +
                                           want.describe());
}

} // namespace

Receiver::Receiver(graph::Graph g, GridConfig grid) : graph_(std::move(g)), grid_(std::move(grid))
{
    grid_.validate();
    const std::vector<std::size_t> dmrs{grid_.n_dmrs(), grid_.n_pilots()};
    const std::vector<std::size_t> full{grid_.n_symbols, grid_.n_subcarriers()};
    const auto& in = graph_.input_specs();
    const auto& out = graph_.output_specs();
    expect_port(in, ports::rx_pilots, DType::Complex64, dmrs, "input");
    expect_port(in, ports::pilots, DType::Complex64, dmrs, "input");
    expect_port(in, "rx_grid", DType::Complex64, full, "input");
    expect_port(in, ports::genie_h, DType::Complex64, dmrs, "input", true);
    expect_port(in, ports::genie_noise_var, DType::Float32, {1}, "input", true);
    for (const auto& [name, spec] : in)
        require(name == ports::rx_pilots || name == ports::pilots || name == "rx_grid" || name == ports::genie_h ||
                    name == ports::genie_noise_var,
                ErrorCode::PortMismatch, "receiver graph input '" + name + "' is not part of the receiver contract");
    expect_port(out, ports::h_dmrs, DType::Complex64, dmrs, "output");
    expect_port(out, ports::noise_var, DType::Float32, {1}, "output");
    expect_port(out, ports::h_grid, DType::Complex64, full, "output");
    expect_port(out, "x_hat", DType::Complex64, full, "output");
}

Receiver Receiver::from_manifest(const graph::GraphManifest& manifest, const GridConfig& grid)
{
    return Receiver(graph::build_graph(manifest, default_registry()), grid);
}

ReceiverOutput Receiver::process(const Slot& slot) const
{
    graph::TensorMap in;
    in.emplace(ports::rx_pilots, tensor_from_grid(ports::rx_pilots, slot.rx_pilots(grid_)));
    in.emplace(ports::pilots, tensor_from_grid(ports::pilots, slot.pilots));
    in.emplace("rx_grid", tensor_from_grid("rx_grid", slot.rx));
    const auto& specs = graph_.input_specs();
    if (specs.count(ports::genie_h)) in.emplace(ports::genie_h, tensor_from_grid(ports::genie_h, slot.h_dmrs(grid_)));
    if (specs.count(ports::genie_noise_var))
        in.emplace(ports::genie_noise_var, scalar_tensor(ports::genie_noise_var, static_cast<float>(slot.noise_var)));

    const auto res = graph_.execute(in);
    ReceiverOutput out;
    out.h_dmrs = grid_from_tensor(res.at(ports::h_dmrs));
    out.h_grid = grid_from_tensor(res.at(ports::h_grid));
    out.x_hat = grid_from_tensor(res.at("x_hat"));
    out.noise_var = res.at(ports::noise_var).data()[0];
    return out;
}

SlotMetrics compute_metrics(const GridConfig& grid, const Slot& slot, const ReceiverOutput& out)
{
    SlotMetrics m;
    const auto h_true = slot.h_dmrs(grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < h_true.size(); ++i) acc += std::norm(cf64(out.h_dmrs.flat()[i]) - cf64(h_true.flat()[i]));
    m.mse_dmrs = acc / static_cast<double>(h_true.size());

    const std::size_t N = grid.n_subcarriers();
    const double s2 = slot.noise_var;
    const double s2_hat = std::max(out.noise_var, 0.0);
    std::vector<cf32> xhat;
    std::vector<double> sinr;
    xhat.reserve(grid.data_re_count());
    sinr.reserve(grid.data_re_count());
    double mse_grid = 0.0;
    for (auto s : grid.data_symbols()) {
        for (std::size_t k = 0; k < N; ++k) {
            const cf64 H = slot.h(s, k);
            const cf64 Hh = out.h_grid(s, k);
            mse_grid += std::norm(Hh - H);
            xhat.push_back(out.x_hat(s, k));
            const double den = std::norm(Hh) + s2_hat;
            if (den <= 0.0) {
                sinr.push_back(0.0);
                continue;
            }
            const cf64 g = std::conj(Hh) / den;
            const double evm = std::norm(g * H - 1.0) + std::norm(g) * s2;
            sinr.push_back(evm > 0.0 ? std::max(1.0 / evm - 1.0, 0.0) : 0.0);
        }
    }
    m.mse_grid = mse_grid / static_cast<double>(grid.data_re_count());

    const auto bits = demodulate(xhat, grid.qam_order);
    for (std::size_t i = 0; i < bits.size(); ++i) m.bit_errors += bits[i] != slot.bits[i];
    m.bits = bits.size();
    m.ber = static_cast<double>(m.bit_errors) / static_cast<double>(m.bits);

    double log_sum = 0.0;
    for (double v : sinr) log_sum += std::log2(1.0 + v);
    m.mean_log2_1p_sinr = log_sum / static_cast<double>(sinr.size());
    m.sinr_eff_db = 10.0 * std::log10(std::max(std::exp2(m.mean_log2_1p_sinr) - 1.0, 1e-30));
    m.tput_proxy_bits = throughput_proxy(sinr);
    return m;
}

SlotMetrics run_slot(const GridConfig& grid, const ChannelConfig& channel, const Receiver& receiver, double snr_db,
                     std::uint64_t seed, std::uint64_t slot_index)
{
    const auto slot = generate_slot(grid, channel, snr_db, seed, slot_index);
    return compute_metrics(grid, slot, receiver.process(slot));
}

SlotMetrics run_slot(const GridConfig& grid, const ChannelConfig& channel, const std::string& estimator_kind,
                     double snr_db, std::uint64_t seed, std::uint64_t slot_index,
                     const std::map<std::string, std::string>& estimator_params)
{
    const auto manifest = graph::parse_manifest(default_receiver_manifest(estimator_kind, grid, estimator_params));
    return run_slot(grid, channel, Receiver::from_manifest(manifest, grid), snr_db, seed, slot_index);
}

// ---------------------------------------------------------------- manifests

std::string default_receiver_manifest(const std::string& kind, const GridConfig& grid,
                                      const std::map<std::string, std::string>& params)
{
    grid.validate();
    std::string symbols;
    for (auto s : grid.dmrs_symbols) symbols += (symbols.empty() ? "" : ",") + std::to_string(s);

    std::ostringstream y;
    y << "version: 1\n"
      << "dims: {n_prb: " << grid.n_prb << ", T_dmrs: " << grid.n_dmrs() << ", F_dmrs: " << grid.n_pilots()
      << ", n_symbols: " << grid.n_symbols << ", n_sc: " << grid.n_subcarriers() << "}\n"
      << "estimator:\n  kind: " << kind << "\n";
    if (auto it = params.find("model_dir"); it != params.end()) y << "  model_dir: \"" << it->second << "\"\n";
    y << "simulation:\n"
      << "  dmrs_symbols: \"" << symbols << "\"\n"
      << "  qam_order: " << grid.qam_order << "\n"
      << "  n_data_symbols: " << grid.n_data_symbols << "\n"
      << "  scs_hz: " << grid.scs_hz << "\n"
      << "inputs:\n"
      << "  - {name: rx_pilots, to: est.rx_pilots}\n"
      << "  - {name: pilots, to: est.pilots}\n"
      << "  - {name: genie_h, to: est.genie_h}\n"
      << "  - {name: genie_noise_var, to: est.genie_noise_var}\n"
      << "  - {name: rx_grid, to: eq.rx_grid}\n"
      << "outputs:\n"
      << "  - {name: h_dmrs, from: est.h_dmrs}\n"
      << "  - {name: noise_var, from: est.noise_var}\n"
      << "  - {name: h_grid, from: interp.h_grid}\n"
      << "  - {name: x_hat, from: eq.x_hat}\n"
      << "nodes:\n"
      << "  - name: est\n"
      << "    kind: estimator\n"
      << "    params:\n"
      << "      dmrs_symbols: \"" << symbols << "\"\n"
      << "      scs_hz: " << grid.scs_hz << "\n";
    for (const auto& [k, v] : params)
        if (k != "model_dir") y << "      " << k << ": " << v << "\n";
    y << "    inputs:\n"
      << "      - {name: rx_pilots, dtype: complex64, shape: [T_dmrs, F_dmrs]}\n"
      << "      - {name: pilots, dtype: complex64, shape: [T_dmrs, F_dmrs]}\n"
      << "      - {name: genie_h, dtype: complex64, shape: [T_dmrs, F_dmrs]}\n"
      << "      - {name: genie_noise_var, dtype: float32, shape: [1]}\n"
      << "    outputs:\n"
      << "      - {name: h_dmrs, dtype: complex64, shape: [T_dmrs, F_dmrs]}\n"
      << "      - {name: noise_var, dtype: float32, shape: [1]}\n"
      << "  - name: interp\n"
      << "    kind: chanest.interpolate\n"
      << "    params: {dmrs_symbols: \"" << symbols << "\", n_symbols: " << grid.n_symbols << "}\n"
      << "    inputs:\n"
      << "      - {name: h_dmrs, dtype: complex64, shape: [T_dmrs, F_dmrs]}\n"
      << "    outputs:\n"
      << "      - {name: h_grid, dtype: complex64, shape: [n_symbols, n_sc]}\n"
      << "  - name: eq\n"
      << "    kind: eq.mmse\n"
      << "    inputs:\n"
      << "      - {name: h_grid, dtype: complex64, shape: [n_symbols, n_sc]}\n"
      << "      - {name: rx_grid, dtype: complex64, shape: [n_symbols, n_sc]}\n"
      << "      - {name: noise_var, dtype: float32, shape: [1]}\n"
      << "    outputs:\n"
      << "      - {name: x_hat, dtype: complex64, shape: [n_symbols, n_sc]}\n"
      << "edges:\n"
      << "  - {from: est.h_dmrs, to: interp.h_dmrs}\n"
      << "  - {from: est.noise_var, to: eq.noise_var}\n"
      << "  - {from: interp.h_grid, to: eq.h_grid}\n";
    return y.str();
}

namespace {

double sim_double(const graph::GraphManifest& m, const std::string& key, double fallback)
{
    auto it = m.simulation.find(key);
    if (it == m.simulation.end()) return fallback;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(it->second, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == it->second.size() && std::isfinite(v), ErrorCode::ConfigError,
            "simulation." + key + " = '" + it->second + "' is not a number");
    return v;
}

std::int64_t sim_int(const graph::GraphManifest& m, const std::string& key, std::int64_t fallback)
{
    const double v = sim_double(m, key, static_cast<double>(fallback));
    require(v == std::floor(v), ErrorCode::ConfigError, "simulation." + key + " must be an integer");
    return static_cast<std::int64_t>(v);
}

} // namespace

GridConfig grid_from_manifest(const graph::GraphManifest& m)
{
    GridConfig g;
    if (auto it = m.dims.find("n_prb"); it != m.dims.end()) g.n_prb = static_cast<std::size_t>(it->second);
    if (auto it = m.dims.find("n_symbols"); it != m.dims.end()) g.n_symbols = static_cast<std::size_t>(it->second);
    if (auto it = m.simulation.find("dmrs_symbols"); it != m.simulation.end())
        g.dmrs_symbols = chanest::parse_symbol_list(it->second);
    g.qam_order = static_cast<int>(sim_int(m, "qam_order", g.qam_order));
    g.n_data_symbols = static_cast<std::size_t>(sim_int(m, "n_data_symbols", static_cast<std::int64_t>(g.n_data_symbols)));
    g.scs_hz = sim_double(m, "scs_hz", g.scs_hz);
    if (auto it = m.dims.find("T_dmrs"); it != m.dims.end())
        require(static_cast<std::size_t>(it->second) == g.n_dmrs(), ErrorCode::ConfigError,
                "dims.T_dmrs disagrees with simulation.dmrs_symbols");
    try {
        g.validate();
    } catch (const Error& e) {
        raise(ErrorCode::ConfigError, e.what());
    }
    return g;
}

ChannelConfig channel_from_manifest(const graph::GraphManifest& m)
{
    ChannelConfig c;
    if (auto it = m.simulation.find("profile"); it != m.simulation.end()) c.profile = it->second;
    c.delay_spread_s = sim_double(m, "delay_spread_ns", c.delay_spread_s * 1e9) * 1e-9;
    c.speed_mps = sim_double(m, "speed_mps", c.speed_mps);
    c.carrier_hz = sim_double(m, "carrier_hz", c.carrier_hz);
    try {
        (void)c.tdl();
    } catch (const Error& e) {
        raise(ErrorCode::ConfigError, e.what());
    }
    require(c.speed_mps >= 0.0 && c.carrier_hz > 0.0, ErrorCode::ConfigError, "speed and carrier must be non-negative");
    return c;
}

} // namespace aerial_forge::linklevel
