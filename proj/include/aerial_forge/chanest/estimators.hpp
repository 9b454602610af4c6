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

#include <Eigen/Dense>

#include "aerial_forge/chanest/types.hpp"

namespace aerial_forge::chanest {

inline constexpr double kNoiseVarFloor = 1e-12;

LsEstimate ls_estimate(const DmrsObservation& obs);

// Frequency-difference estimator:
//   s2 = sum |h[t,f+1] - h[t,f]|^2 / 2 / (T (F-1)), floored at 1e-12.
// Needs F >= 4 (InvalidArgument otherwise).
double estimate_noise_var(const ComplexGrid& h_ls);

// R[k,l] = sum_i p_i exp(-j 2 pi df (k-l) tau_i), df = scs * pilot_spacing.
Eigen::MatrixXcd build_freq_covariance(const PdpModel& pdp, double subcarrier_spacing_hz, std::size_t pilot_spacing,
                                       std::size_t n);

// Continuous uniform PDP over [0, max_delay_s]:
//   R[k,l] = exp(-j pi x) sinc(x),  x = df (k-l) max_delay_s.
Eigen::MatrixXcd build_uniform_covariance(double max_delay_s, double subcarrier_spacing_hz, std::size_t pilot_spacing,
                                          std::size_t n);

// Wiener filter over the frequency axis for a fixed R.
//   Cholesky: per call, factor R + (s2 + 1e-9) I; retried once with 1e-6;
//             FactorizationFailure after that.
//   Eigh:     R = U L U^H once, then h = U diag(l / (l + s2 + 1e-9)) U^H h_ls;
//             the same filter at O(n^2) per call, for wide allocations.
class MmseFilter {
public:
    enum class Solver { Cholesky, Eigh };
    MmseFilter(Eigen::MatrixXcd R, Solver solver = Solver::Cholesky);

    ComplexGrid apply(const LsEstimate& ls) const;
    const Eigen::MatrixXcd& covariance() const noexcept { return R_; }

private:
    Eigen::MatrixXcd R_;
    Solver solver_;
    Eigen::MatrixXcd U_;
    Eigen::VectorXd lambda_;
};

// Per DMRS symbol: h = R (R + s2 I)^-1 h_ls via Cholesky (see MmseFilter).
ComplexGrid mmse_estimate(const LsEstimate& ls, const Eigen::MatrixXcd& R);
ComplexGrid mmse_estimate(const LsEstimate& ls, const PdpModel& pdp, double subcarrier_spacing_hz,
                          std::size_t pilot_spacing = kPilotSpacing);

// 10 log10(mean|h|^2 / s2 - 1); the signal term is floored so the result
// stays finite.
double estimate_snr_classical(const LsEstimate& ls);

// DMRS estimates (T_dmrs, 6 P) onto the full (n_symbols, 12 P) grid: linear
// in frequency between comb pilots, nearest pilot past the last one, then
// nearest DMRS symbol in time (ties toward the earlier symbol).
ComplexGrid interpolate_grid(const ComplexGrid& dmrs_est, const std::vector<std::size_t>& dmrs_symbols,
                             std::size_t n_symbols, std::size_t prb_count);

} // namespace aerial_forge::chanest
