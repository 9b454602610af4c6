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
#include "aerial_forge/chanest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aerial_forge/core/error.hpp"
#include "aerial_forge/linklevel/tdl.hpp"

namespace aerial_forge::chanest {

void DmrsObservation::validate() const
{
    require(prb_count >= 1, ErrorCode::InvalidArgument, "observation needs at least one PRB");
    require(rx_pilots.rows() >= 1, ErrorCode::InvalidArgument, "observation needs at least one DMRS symbol");
    require(rx_pilots.rows() == pilot_symbols.rows() && rx_pilots.cols() == pilot_symbols.cols(),
            ErrorCode::InvalidArgument, "rx_pilots and pilot_symbols differ in shape");
    require(rx_pilots.cols() == kPilotsPerPrb * prb_count, ErrorCode::InvalidArgument,
            "F_dmrs must be 6 x prb_count (got " + std::to_string(rx_pilots.cols()) + " for " +
                std::to_string(prb_count) + " PRB)");
    require(dmrs_symbols.size() == rx_pilots.rows(), ErrorCode::InvalidArgument,
            "one DMRS symbol index is needed per observation row");
    for (const auto& p : pilot_symbols.flat())
        require(std::norm(p) == 1.0f, ErrorCode::InvalidArgument, "pilot symbols must be unit modulus");
}

void PdpModel::validate() const
{
    require(!taps.empty(), ErrorCode::InvalidArgument, "PDP has no taps");
    double sum = 0.0;
    for (std::size_t i = 0; i < taps.size(); ++i) {
        require(taps[i].delay_s >= 0.0 && taps[i].power > 0.0, ErrorCode::InvalidArgument,
                "PDP taps need delay >= 0 and power > 0");
        require(i == 0 || taps[i].delay_s >= taps[i - 1].delay_s, ErrorCode::InvalidArgument,
                "PDP delays must be ascending");
        sum += taps[i].power;
    }
    require(std::abs(sum - 1.0) <= 1e-9, ErrorCode::InvalidArgument, "PDP powers must sum to one");
}

PdpModel PdpModel::uniform(double max_delay_s, std::size_t n_taps)
{
    require(n_taps >= 1 && max_delay_s >= 0.0, ErrorCode::InvalidArgument, "bad uniform PDP parameters");
    PdpModel pdp;
    for (std::size_t i = 0; i < n_taps; ++i) {
        const double d = n_taps == 1 ? 0.0 : max_delay_s * static_cast<double>(i) / static_cast<double>(n_taps - 1);
        pdp.taps.push_back({d, 1.0 / static_cast<double>(n_taps)});
    }
    return pdp;
}

PdpModel PdpModel::from_tdl(const linklevel::TdlProfile& profile)
{
    const auto delays = profile.delays_s();
    const auto powers = profile.powers();
    PdpModel pdp;
    for (std::size_t i = 0; i < delays.size(); ++i) pdp.taps.push_back({delays[i], powers[i]});
    std::stable_sort(pdp.taps.begin(), pdp.taps.end(), [](const Tap& a, const Tap& b) { return a.delay_s < b.delay_s; });
    return pdp;
}

LsEstimate ls_estimate(const DmrsObservation& obs)
{
    obs.validate();
    LsEstimate ls;
    ls.h_ls = ComplexGrid(obs.rx_pilots.rows(), obs.rx_pilots.cols());
    const auto rx = obs.rx_pilots.flat();
    const auto p = obs.pilot_symbols.flat();
    auto h = ls.h_ls.flat();
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = rx[i] / p[i];
    ls.noise_var = estimate_noise_var(ls.h_ls);
    return ls;
}

double estimate_noise_var(const ComplexGrid& h)
{
    require(h.cols() >= 4 && h.rows() >= 1, ErrorCode::InvalidArgument,
            "noise estimation needs at least 4 pilot subcarriers");
    double acc = 0.0;
    for (std::size_t t = 0; t < h.rows(); ++t)
        for (std::size_t f = 0; f + 1 < h.cols(); ++f)
            acc += std::norm(cf64(h(t, f + 1)) - cf64(h(t, f)));
    const double v = acc / 2.0 / static_cast<double>(h.rows() * (h.cols() - 1));
    return std::max(v, kNoiseVarFloor);
}

Eigen::MatrixXcd build_freq_covariance(const PdpModel& pdp, double scs_hz, std::size_t pilot_spacing, std::size_t n)
{
    require(n >= 1, ErrorCode::InvalidArgument, "covariance size must be >= 1");
    const double df = scs_hz * static_cast<double>(pilot_spacing);
    // R depends only on k - l, so evaluate each lag once.
    std::vector<cf64> lag(n);
    for (std::size_t d = 0; d < n; ++d) {
        cf64 acc = 0.0;
        for (const auto& tap : pdp.taps)
            acc += tap.power * std::polar(1.0, -2.0 * std::numbers::pi * df * static_cast<double>(d) * tap.delay_s);
        lag[d] = acc;
    }
    Eigen::MatrixXcd R(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            R(k, l) = k >= l ? lag[k - l] : std::conj(lag[l - k]);
    return R;
}

Eigen::MatrixXcd build_uniform_covariance(double max_delay_s, double scs_hz, std::size_t pilot_spacing, std::size_t n)
{
    require(n >= 1 && max_delay_s >= 0.0, ErrorCode::InvalidArgument, "bad uniform covariance parameters");
    const double df = scs_hz * static_cast<double>(pilot_spacing);
    std::vector<cf64> lag(n);
    for (std::size_t d = 0; d < n; ++d) {
        const double x = df * static_cast<double>(d) * max_delay_s;
        const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        lag[d] = std::polar(sinc, -std::numbers::pi * x);
    }
    Eigen::MatrixXcd R(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            R(k, l) = k >= l ? lag[k - l] : std::conj(lag[l - k]);
    return R;
}

MmseFilter::MmseFilter(Eigen::MatrixXcd R, Solver solver) : R_(std::move(R)), solver_(solver)
{
    require(R_.rows() == R_.cols() && R_.rows() >= 1, ErrorCode::InvalidArgument, "covariance must be square");
    if (solver_ == Solver::Eigh) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R_);
        if (es.info() != Eigen::Success) raise(ErrorCode::FactorizationFailure, "eigendecomposition of R failed");
        U_ = es.eigenvectors();
        lambda_ = es.eigenvalues().cwiseMax(0.0);
    }
}

ComplexGrid MmseFilter::apply(const LsEstimate& ls) const
{
    const std::size_t T = ls.h_ls.rows(), F = ls.h_ls.cols();
    require(static_cast<std::size_t>(R_.rows()) == F, ErrorCode::InvalidArgument,
            "covariance size does not match the pilot count");
    require(ls.noise_var > 0.0 && std::isfinite(ls.noise_var), ErrorCode::InvalidArgument,
            "MMSE needs a positive noise variance");

    Eigen::MatrixXcd X(F, T);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t f = 0; f < F; ++f) X(f, t) = cf64(ls.h_ls(t, f));

    Eigen::MatrixXcd Y;
    if (solver_ == Solver::Eigh) {
        const Eigen::VectorXd w = lambda_.array() / (lambda_.array() + ls.noise_var + 1e-9);
        Y = U_ * (w.asDiagonal() * (U_.adjoint() * X));
    } else {
        Eigen::LLT<Eigen::MatrixXcd> llt;
        bool ok = false;
        for (double reg : {1e-9, 1e-6}) {
            Eigen::MatrixXcd A = R_;
            A.diagonal().array() += ls.noise_var + reg;
            llt.compute(A);
            if (llt.info() == Eigen::Success) {
                ok = true;
                break;
            }
        }
        if (!ok) raise(ErrorCode::FactorizationFailure, "R + s2 I is not positive definite after regularization");
        Y = R_ * llt.solve(X);
    }

    ComplexGrid out(T, F);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t f = 0; f < F; ++f) out(t, f) = cf32(Y(f, t));
    return out;
}

ComplexGrid mmse_estimate(const LsEstimate& ls, const Eigen::MatrixXcd& R)
{
    require(static_cast<std::size_t>(R.rows()) == ls.h_ls.cols() && R.rows() == R.cols(), ErrorCode::InvalidArgument,
            "covariance size does not match the pilot count");
    return MmseFilter(R).apply(ls);
}

ComplexGrid mmse_estimate(const LsEstimate& ls, const PdpModel& pdp, double scs_hz, std::size_t pilot_spacing)
{
    return mmse_estimate(ls, build_freq_covariance(pdp, scs_hz, pilot_spacing, ls.h_ls.cols()));
}

double estimate_snr_classical(const LsEstimate& ls)
{
    double p = 0.0;
    for (const auto& h : ls.h_ls.flat()) p += std::norm(cf64(h));
    p /= static_cast<double>(ls.h_ls.size());
    const double s2 = std::max(ls.noise_var, kNoiseVarFloor);
    return 10.0 * std::log10(std::max(p / s2 - 1.0, 1e-12));
}

ComplexGrid interpolate_grid(const ComplexGrid& est, const std::vector<std::size_t>& dmrs_symbols,
                             std::size_t n_symbols, std::size_t prb_count)
{
    const std::size_t F = kSubcarriersPerPrb * prb_count;
    const std::size_t P = kPilotsPerPrb * prb_count;
    require(est.rows() >= 1 && est.rows() == dmrs_symbols.size(), ErrorCode::InvalidArgument,
            "need one DMRS symbol index per estimate row");
    require(est.cols() == P, ErrorCode::InvalidArgument, "estimate width does not match the PRB count");
    for (auto s : dmrs_symbols) require(s < n_symbols, ErrorCode::InvalidArgument, "DMRS symbol outside the slot");

    // Frequency first, one row per DMRS symbol.
    ComplexGrid freq(est.rows(), F);
    for (std::size_t t = 0; t < est.rows(); ++t) {
        for (std::size_t k = 0; k < F; ++k) {
            const std::size_t i0 = k / kPilotSpacing;
            if (k % kPilotSpacing == 0 || i0 + 1 >= P) {
                freq(t, k) = est(t, std::min(i0, P - 1));
                continue;
            }
            const float w = static_cast<float>(k - i0 * kPilotSpacing) / static_cast<float>(kPilotSpacing);
            freq(t, k) = est(t, i0) * (1.0f - w) + est(t, i0 + 1) * w;
        }
    }

    ComplexGrid out(n_symbols, F);
    for (std::size_t s = 0; s < n_symbols; ++s) {
        std::size_t best = 0;
        for (std::size_t t = 1; t < dmrs_symbols.size(); ++t) {
            const auto dist = [&](std::size_t i) {
                return dmrs_symbols[i] > s ? dmrs_symbols[i] - s : s - dmrs_symbols[i];
            };
            if (dist(t) < dist(best) || (dist(t) == dist(best) && dmrs_symbols[t] < dmrs_symbols[best])) best = t;
        }
        std::copy(freq.row(best).begin(), freq.row(best).end(), out.row(s).begin());
    }
    return out;
}

} // namespace aerial_forge::chanest
