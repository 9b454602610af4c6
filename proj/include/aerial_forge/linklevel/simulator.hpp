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
#include <map>
#include <string>
#include <vector>

#include "aerial_forge/core/grid.hpp"
#include "aerial_forge/graph/graph.hpp"
#include "aerial_forge/linklevel/channel.hpp"

namespace aerial_forge::linklevel {

// Everything transmitted and received in one slot, plus the truth the
// metrics are computed against.
struct Slot {
    ComplexGrid tx;     // (n_symbols, 12 n_prb)
    ComplexGrid rx;     // tx * H + noise on every RE
    ComplexGrid h;      // true CFR per RE
    ComplexGrid pilots; // (n_dmrs, 6 n_prb)
    std::vector<std::uint8_t> bits;
    double noise_var = 0.0;

    ComplexGrid rx_pilots(const GridConfig& grid) const;
    ComplexGrid h_dmrs(const GridConfig& grid) const;
};

// Streams are derived from (seed, slot_index): the channel follows one fading
// trajectory over slot_index, and bits, pilots and unit-variance noise are
// independent of snr_db, so every SNR and every estimator sees the same draws.
// s2 = 10^(-snr_db/10) against unit average signal power per RE.
Slot generate_slot(const GridConfig& grid, const ChannelConfig& channel, double snr_db, std::uint64_t seed,
                   std::uint64_t slot_index);

struct SlotMetrics {
    double mse_dmrs = 0.0;
    double mse_grid = 0.0; // over data REs
    double ber = 0.0;
    double sinr_eff_db = 0.0;
    double tput_proxy_bits = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    double mean_log2_1p_sinr = 0.0;
};

inline constexpr double kProxyCapBits = 8.0;

// sum over REs of min(log2(1 + sinr), cap).
double throughput_proxy(std::span<const double> sinr, double cap_bits = kProxyCapBits);

struct ReceiverOutput {
    ComplexGrid h_dmrs;
    ComplexGrid h_grid;
    ComplexGrid x_hat;
    double noise_var = 0.0;
};

// Graph I/O contract for receivers. Inputs: rx_pilots, pilots, rx_grid and
// optionally genie_h, genie_noise_var. Outputs: h_dmrs, noise_var, h_grid,
// x_hat.
class Receiver {
public:
    Receiver(graph::Graph graph, GridConfig grid); // PortMismatch on contract violations
    static Receiver from_manifest(const graph::GraphManifest& manifest, const GridConfig& grid);

    ReceiverOutput process(const Slot& slot) const;
    const GridConfig& grid() const noexcept { return grid_; }
    const graph::Graph& graph() const noexcept { return graph_; }

private:
    graph::Graph graph_;
    GridConfig grid_;
};

// Post-equalization SINR from the per-RE error of the one-tap MMSE
// equalizer built on the estimate:
//   g = conj(Hhat) / (|Hhat|^2 + s2hat), e = |g H - 1|^2 + |g|^2 s2,
//   sinr = max(1/e - 1, 0).
// With Hhat = H and s2hat = s2 this is |H|^2 / s2; it never exceeds it.
SlotMetrics compute_metrics(const GridConfig& grid, const Slot& slot, const ReceiverOutput& out);

SlotMetrics run_slot(const GridConfig& grid, const ChannelConfig& channel, const Receiver& receiver, double snr_db,
                     std::uint64_t seed, std::uint64_t slot_index);
// Builds the default receiver around `estimator_kind` first.
SlotMetrics run_slot(const GridConfig& grid, const ChannelConfig& channel, const std::string& estimator_kind,
                     double snr_db, std::uint64_t seed, std::uint64_t slot_index = 0,
                     const std::map<std::string, std::string>& estimator_params = {});

// Registry with every built-in node kind (engine, chanest, eq, util).
const graph::FactoryRegistry& default_registry();
void register_linklevel_nodes(graph::FactoryRegistry& registry);

// The standard receiver manifest (estimator -> interpolate -> eq.mmse)
// sized for `grid`. Estimator params are emitted as plain YAML scalars (so
// numbers stay numbers); a model_dir entry also sets estimator.model_dir.
std::string default_receiver_manifest(const std::string& estimator_kind, const GridConfig& grid,
                                      const std::map<std::string, std::string>& estimator_params = {});

// Grid and channel settings taken from a manifest's dims and simulation
// sections (missing keys keep their defaults).
GridConfig grid_from_manifest(const graph::GraphManifest& manifest);
ChannelConfig channel_from_manifest(const graph::GraphManifest& manifest);

} // namespace aerial_forge::linklevel
