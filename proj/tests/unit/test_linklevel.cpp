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
#include <numbers>

#include "aerial_forge/chanest/estimators.hpp"
#include "aerial_forge/graph/manifest.hpp"
#include "aerial_forge/linklevel/channel.hpp"
#include "aerial_forge/linklevel/simulator.hpp"
#include "support.hpp"

using namespace aerial_forge;
using namespace aerial_forge::linklevel;

namespace {

GridConfig grid_of(std::size_t prb, int qam = 4)
{
    GridConfig g;
    g.n_prb = prb;
    g.qam_order = qam;
    return g;
}

std::vector<std::uint8_t> random_bits(std::size_t n, Rng& rng)
{
    std::vector<std::uint8_t> b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng.bit());
    return b;
}

} // namespace

TEST(Tdl, TdlCMaxExcessDelay)
{
    const auto p = tdl_profile("TDL-C", 300e-9);
    EXPECT_NEAR(p.max_excess_delay_s(), 2.5957e-6, 1e-9);
    EXPECT_NEAR(p.max_excess_delay_s(), 8.6523 * 300e-9, 1e-15);
    const auto ch = gen_tdl_channel(p, 26.0, 0, 1);
    EXPECT_NEAR(*std::max_element(ch.delays_s.begin(), ch.delays_s.end()), 2.5957e-6, 1e-9);
}

TEST(Tdl, TablesAndNames)
{
    EXPECT_EQ(tdl_profile("TDL-A").normalized_taps.size(), 23u);
    EXPECT_EQ(tdl_profile("tdl_b").normalized_taps.size(), 23u);
    EXPECT_EQ(tdl_profile("tdlc").normalized_taps.size(), 24u);
    for (const auto& name : tdl_profile_names()) {
        const auto p = tdl_profile(name, 100e-9);
        double s = 0;
        for (double v : p.powers()) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12) << name;
    }
    EXPECT_FALSE(tdl_profile("AWGN").fading);
    EXPECT_AF_ERROR(tdl_profile("TDL-Z"), InvalidArgument);
}

TEST(Tdl, StaticChannelWithoutDoppler)
{
    const auto p = tdl_profile("TDL-A", 300e-9);
    const auto a = gen_tdl_channel(p, 0.0, 0, 5);
    for (std::uint64_t s : {1u, 7u, 1000u}) EXPECT_EQ(gen_tdl_channel(p, 0.0, s, 5).gains, a.gains);
    EXPECT_EQ(gen_tdl_channel(p, 30.0, 3, 5).gains, gen_tdl_channel(p, 30.0, 3, 5).gains);
    EXPECT_NE(gen_tdl_channel(p, 30.0, 3, 5).gains, gen_tdl_channel(p, 30.0, 4, 5).gains);
}

TEST(Tdl, UnitMeanPower)
{
    const auto p = tdl_profile("TDL-C", 300e-9);
    const int n = 10000;
    double total = 0;
    std::vector<double> per_tap(p.normalized_taps.size());
    for (int i = 0; i < n; ++i) {
        const auto ch = gen_tdl_channel(p, 26.0, 0, derive_seed(3, {std::uint64_t(i)}));
        for (std::size_t l = 0; l < ch.gains.size(); ++l) {
            total += std::norm(ch.gains[l]) / n;
            per_tap[l] += std::norm(ch.gains[l]) / n;
        }
    }
    EXPECT_NEAR(total, 1.0, 0.02);
    const auto want = p.powers();
    EXPECT_NEAR(per_tap[0] / want[0], 1.0, 0.1);
}

TEST(Tdl, JakesAutocorrelation)
{
    const auto p = tdl_profile("AWGN");
    auto fading = p;
    fading.fading = true;
    const double fd = 100.0;
    for (std::uint64_t lag : {1u, 3u, 5u, 10u}) {
        cf64 acc = 0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            const auto seed = derive_seed(11, {std::uint64_t(i)});
            acc += gen_tdl_channel(fading, fd, 0, seed).gains[0] * std::conj(gen_tdl_channel(fading, fd, lag, seed).gains[0]);
        }
        const double want = std::cyl_bessel_j(0.0, 2 * std::numbers::pi * fd * lag * kSlotDurationS);
        EXPECT_NEAR((acc / double(n)).real(), want, 0.05) << "lag " << lag;
    }
}

TEST(Cfr, FlatTap)
{
    ChannelRealization r{{cf64{1, 0}}, {0.0}};
    for (auto h : cir_to_cfr(r, grid_of(4))) EXPECT_EQ(h, cf64(1, 0));
}

TEST(Cfr, PhaseRampSlope)
{
    const auto g = grid_of(8);
    const double N = double(g.n_subcarriers());
    const double tau = 1.0 / (2.0 * N * g.scs_hz);
    ChannelRealization r{{cf64{1, 0}}, {tau}};
    const auto H = cir_to_cfr(r, g);
    const cf64 step = std::polar(1.0, -std::numbers::pi / N);
    for (std::size_t k = 0; k + 1 < H.size(); ++k) EXPECT_LE(std::abs(H[k + 1] / H[k] - step), 1e-12);
    EXPECT_LE(std::abs(H[g.n_subcarriers() / 2] - 1.0), 1e-12); // f = 0 at the centre
}

TEST(Cfr, MatchesNaiveSum)
{
    Rng rng(3);
    ChannelRealization r;
    for (int i = 0; i < 12; ++i) {
        r.gains.push_back(rng.complex_gaussian());
        r.delays_s.push_back(rng.uniform(0, 3e-6));
    }
    const auto g = grid_of(6);
    const auto H = cir_to_cfr(r, g);
    const double N = double(g.n_subcarriers());
    for (std::size_t k = 0; k < H.size(); ++k) {
        cf64 want = 0;
        for (std::size_t i = 0; i < r.gains.size(); ++i)
            want += r.gains[i] * std::exp(cf64(0, -2 * std::numbers::pi * (double(k) - N / 2) * g.scs_hz * r.delays_s[i]));
        EXPECT_LE(std::abs(H[k] - want), 1e-12);
    }
}

TEST(Dmrs, UnitModulusDeterministicComb)
{
    auto g = grid_of(4);
    g.dmrs_symbols = {2, 11};
    const auto p = gen_dmrs(9, g);
    EXPECT_EQ(p.rows(), 2u);
    EXPECT_EQ(p.cols(), 24u);
    for (auto v : p.flat()) EXPECT_EQ(std::norm(v), 1.0f);
    EXPECT_EQ(gen_dmrs(9, g), p);
    EXPECT_NE(gen_dmrs(10, g), p);
}

TEST(Qam, QpskAnchor)
{
    const std::vector<std::uint8_t> bits{0, 0, 1, 1};
    const auto s = modulate(bits, 4);
    const float r = float(1 / std::sqrt(2.0));
    EXPECT_EQ(s[0], cf32(r, r));
    EXPECT_EQ(s[1], cf32(-r, -r));
}

TEST(Qam, NoiselessRoundtrip)
{
    Rng rng(4);
    for (int order : {4, 16, 64}) {
        const auto bits = random_bits(10002 - 10002 % (order == 64 ? 6 : order == 16 ? 4 : 2), rng);
        EXPECT_EQ(demodulate(modulate(bits, order), order), bits) << order;
    }
}

TEST(Qam, UnitEnergyAndGray)
{
    for (int order : {4, 16, 64}) {
        const int m = int(std::log2(order));
        std::vector<std::uint8_t> bits;
        for (int v = 0; v < order; ++v)
            for (int b = m - 1; b >= 0; --b) bits.push_back(std::uint8_t((v >> b) & 1));
        const auto table = qam_constellation(order);
        double e = 0;
        for (auto p : table) e += std::norm(p) / order;
        EXPECT_NEAR(e, 1.0, 1e-12) << order;
        const auto pts = modulate(bits, order);
        for (int v = 0; v < order; ++v) EXPECT_EQ(pts[v], cf32(table[v]));
        // Nearest neighbours (one grid step apart) differ in exactly one bit.
        double step = 1e9;
        for (int i = 0; i < order; ++i)
            for (int j = i + 1; j < order; ++j) step = std::min(step, std::abs(cf64(pts[i]) - cf64(pts[j])));
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j)
                if (i != j && std::abs(std::abs(cf64(pts[i]) - cf64(pts[j])) - step) < 1e-6)
                    EXPECT_EQ(__builtin_popcount(unsigned(i ^ j)), 1) << order;
    }
}

TEST(Qam, Errors)
{
    EXPECT_AF_ERROR(modulate(std::vector<std::uint8_t>(3), 4), LengthError);
    EXPECT_AF_ERROR(modulate(std::vector<std::uint8_t>(6), 16), LengthError);
    EXPECT_AF_ERROR(modulate(std::vector<std::uint8_t>(4), 8), InvalidArgument);
}

TEST(GridConfig, Validation)
{
    EXPECT_NO_THROW(grid_of(273).validate());
    auto g = grid_of(0);
    EXPECT_AF_ERROR(g.validate(), InvalidArgument);
    g = grid_of(4);
    g.dmrs_symbols = {14};
    EXPECT_AF_ERROR(g.validate(), InvalidArgument);
    g = grid_of(4);
    g.n_data_symbols = 14;
    EXPECT_AF_ERROR(g.validate(), InvalidArgument);
    g = grid_of(4, 32);
    EXPECT_AF_ERROR(g.validate(), InvalidArgument);
    EXPECT_EQ(grid_of(273).data_symbols(), (std::vector<std::size_t>{0, 1, 3, 4, 5, 6, 7, 8, 9, 10}));
}

TEST(Channel, FiveMphDoppler)
{
    ChannelConfig c;
    EXPECT_NEAR(c.doppler_hz(), 26.1, 0.1);
}

TEST(Proxy, Examples)
{
    EXPECT_EQ(throughput_proxy(std::vector<double>(100, 0.0)), 0.0);
    EXPECT_DOUBLE_EQ(throughput_proxy(std::vector<double>(100, 3.0)), 200.0);
    EXPECT_DOUBLE_EQ(throughput_proxy(std::vector<double>(10, 1e6)), 80.0);
}

TEST(Slot, SeedContract)
{
    const auto g = grid_of(4);
    const ChannelConfig c;
    const auto a = generate_slot(g, c, 10.0, 42, 3);
    const auto b = generate_slot(g, c, 10.0, 42, 3);
    EXPECT_EQ(a.rx, b.rx);
    EXPECT_EQ(a.tx, b.tx);
    EXPECT_EQ(a.bits, b.bits);
    // Other SNRs reuse the draws: the same h and tx, noise scaled.
    const auto c20 = generate_slot(g, c, 20.0, 42, 3);
    EXPECT_EQ(c20.h, a.h);
    EXPECT_EQ(c20.tx, a.tx);
    const auto other = generate_slot(g, c, 10.0, 43, 3);
    EXPECT_NE(other.rx, a.rx);
}

TEST(Slot, PilotsAndDataPlacement)
{
    const auto g = grid_of(2);
    const auto s = generate_slot(g, {}, 10.0, 1, 0);
    for (std::size_t f = 0; f < g.n_pilots(); ++f) EXPECT_EQ(s.tx(2, 2 * f), s.pilots(0, f));
    EXPECT_EQ(s.rx_pilots(g).cols(), g.n_pilots());
    for (std::size_t f = 0; f < g.n_pilots(); ++f) EXPECT_EQ(s.rx_pilots(g)(0, f), s.rx(2, 2 * f));
    EXPECT_EQ(s.bits.size(), g.data_re_count() * 2);
    EXPECT_EQ(s.tx(11, 0), cf32{}); // symbols past the data region are empty
}

TEST(Metrics, PerfectCsiSinrOracle)
{
    const auto g = grid_of(3);
    const auto slot = generate_slot(g, {}, 12.0, 5, 0);
    ReceiverOutput out;
    out.h_dmrs = slot.h_dmrs(g);
    out.h_grid = slot.h;
    out.noise_var = slot.noise_var;
    out.x_hat = ComplexGrid(g.n_symbols, g.n_subcarriers());
    for (std::size_t i = 0; i < slot.rx.size(); ++i) {
        const cf64 H = slot.h.flat()[i];
        out.x_hat.flat()[i] = cf32(std::conj(H) * cf64(slot.rx.flat()[i]) / (std::norm(H) + slot.noise_var));
    }
    const auto m = compute_metrics(g, slot, out);
    double bits = 0, logs = 0;
    std::size_t n = 0;
    for (auto s : g.data_symbols())
        for (std::size_t k = 0; k < g.n_subcarriers(); ++k) {
            const double sinr = std::norm(cf64(slot.h(s, k))) / slot.noise_var;
            bits += std::min(std::log2(1 + sinr), 8.0);
            logs += std::log2(1 + sinr);
            ++n;
        }
    EXPECT_EQ(m.mse_dmrs, 0.0);
    EXPECT_NEAR(m.tput_proxy_bits, bits, 1e-6 * bits);
    EXPECT_NEAR(m.sinr_eff_db, 10 * std::log10(std::exp2(logs / n) - 1), 1e-9);
}

TEST(RunSlot, LsVersusPerfect)
{
    const auto g = grid_of(4);
    const ChannelConfig c;
    const auto ls = run_slot(g, c, "ls", 10.0, 7);
    const auto pf = run_slot(g, c, "perfect", 10.0, 7);
    EXPECT_GT(ls.mse_dmrs, 0.0);
    EXPECT_EQ(pf.mse_dmrs, 0.0);
    EXPECT_GE(ls.ber, 0.0);
    EXPECT_LE(ls.ber, 1.0);
    EXPECT_GE(pf.tput_proxy_bits, ls.tput_proxy_bits);
}

TEST(RunSlot, PerfectCsiAwgnHighSnr)
{
    const auto g = grid_of(16);
    ChannelConfig c;
    c.profile = "AWGN";
    const auto rx = Receiver::from_manifest(graph::parse_manifest(default_receiver_manifest("perfect", g)), g);
    std::size_t errors = 0, bits = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto m = run_slot(g, c, rx, 30.0, 1, s);
        errors += m.bit_errors;
        bits += m.bits;
    }
    EXPECT_LE(double(errors) / double(bits), 1e-4);
}

// Per-RE Rayleigh fading with perfect CSI: QPSK BER = (1 - sqrt(gb / (1 + gb))) / 2,
// gb = SNR / 2. Independent seeds give independent fading.
TEST(RunSlot, PerfectCsiRayleighMatchesAnalyticBer)
{
    const auto g = grid_of(16);
    const ChannelConfig c;
    const auto rx = Receiver::from_manifest(graph::parse_manifest(default_receiver_manifest("perfect", g)), g);
    for (double snr_db : {10.0, 20.0}) {
        std::size_t errors = 0, bits = 0;
        for (std::uint64_t s = 0; s < 400; ++s) {
            const auto m = run_slot(g, c, rx, snr_db, s, 0);
            errors += m.bit_errors;
            bits += m.bits;
        }
        const double gb = std::pow(10.0, snr_db / 10) / 2;
        const double want = 0.5 * (1 - std::sqrt(gb / (1 + gb)));
        EXPECT_NEAR(double(errors) / double(bits) / want, 1.0, 0.15) << snr_db << " dB";
    }
}

TEST(Manifest, GridAndChannelFromConfig)
{
    const auto m = graph::load_manifest(std::string(AERIAL_FORGE_CONFIG_DIR) + "/receiver.yaml");
    const auto g = grid_from_manifest(m);
    EXPECT_EQ(g.n_prb, 16u);
    EXPECT_EQ(g.dmrs_symbols, (std::vector<std::size_t>{2}));
    EXPECT_EQ(g.n_data_symbols, 10u);
    const auto c = channel_from_manifest(m);
    EXPECT_EQ(c.profile, "TDL-C");
    EXPECT_DOUBLE_EQ(c.delay_spread_s, 300e-9);
    const auto big = grid_from_manifest(graph::load_manifest(std::string(AERIAL_FORGE_CONFIG_DIR) + "/receiver_273prb.yaml"));
    EXPECT_EQ(big.n_prb, 273u);
}

TEST(Receiver, ContractViolations)
{
    const auto g = grid_of(4);
    auto text = default_receiver_manifest("ls", g);
    const std::string line = "  - {name: x_hat, from: eq.x_hat}\n";
    text.replace(text.find(line), line.size(), "");
    EXPECT_AF_ERROR(Receiver::from_manifest(graph::parse_manifest(text), g), PortMismatch);
    EXPECT_AF_ERROR(Receiver::from_manifest(graph::parse_manifest(default_receiver_manifest("ls", g)), grid_of(5)),
                    PortMismatch);
}
