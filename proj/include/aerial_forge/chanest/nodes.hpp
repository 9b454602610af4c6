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

#include <string>
#include <vector>

#include "aerial_forge/graph/graph.hpp"

namespace aerial_forge::chanest {

// Port contract shared by every estimator kind. The genie ports carry the
// true channel and noise power; only chanest.perfect (and chanest.mmse with
// noise_var: genie) reads them, and other kinds may leave them undeclared.
namespace ports {
inline constexpr const char* rx_pilots = "rx_pilots";
inline constexpr const char* pilots = "pilots";
inline constexpr const char* genie_h = "genie_h";
inline constexpr const char* genie_noise_var = "genie_noise_var";
inline constexpr const char* h_dmrs = "h_dmrs";
inline constexpr const char* noise_var = "noise_var";
inline constexpr const char* h_grid = "h_grid";
} // namespace ports

// chanest.ls, chanest.mmse, chanest.cnn, chanest.perfect, chanest.interpolate
void register_chanest_nodes(graph::FactoryRegistry& registry);

// "2" or "2,11" -> {2} / {2, 11}; ConfigError on anything else.
std::vector<std::size_t> parse_symbol_list(const std::string& text);

} // namespace aerial_forge::chanest
