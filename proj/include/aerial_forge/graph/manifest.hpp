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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aerial_forge/core/tensor.hpp"
#include "aerial_forge/graph/adapters.hpp"

namespace aerial_forge::graph {

using ParamValue = std::variant<std::int64_t, double, bool, std::string>;

// Flat key -> scalar/string map attached to each node.
class Params {
public:
    void set(std::string key, ParamValue value) { values_[std::move(key)] = std::move(value); }
    bool has(std::string_view key) const { return values_.find(std::string(key)) != values_.end(); }

    std::int64_t get_int(std::string_view key) const;
    std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
    double get_double(std::string_view key) const;
    double get_double(std::string_view key, double fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;
    std::string get_string(std::string_view key) const;
    std::string get_string(std::string_view key, std::string_view fallback) const;

    const std::map<std::string, ParamValue>& values() const noexcept { return values_; }

private:
    const ParamValue* find(std::string_view key) const;
    std::map<std::string, ParamValue> values_;
};

struct PortRef {
    std::string node;
    std::string port;

    std::string str() const { return node + "." + port; }
    static PortRef parse(std::string_view text);
    auto operator<=>(const PortRef&) const = default;
};

struct NodeDescriptor {
    std::string name;
    std::string kind;
    Params params;
    std::vector<TensorSpec> inputs;
    std::vector<TensorSpec> outputs;
    bool from_estimator = false; // kind was resolved from "estimator"

    const TensorSpec* find_input(std::string_view port) const;
    const TensorSpec* find_output(std::string_view port) const;
};

struct Edge {
    PortRef from;
    PortRef to;
    std::string str() const { return from.str() + " -> " + to.str(); }
    auto operator<=>(const Edge&) const = default;
};

struct AdapterEntry {
    Edge edge;
    AdapterKind kind;
};

// A graph-level input feeds one or more node input ports; its spec is the
// consumer port spec.
struct GraphInput {
    std::string name;
    std::vector<PortRef> targets;
};

struct GraphOutput {
    std::string name;
    PortRef source;
};

struct EstimatorConfig {
    std::string kind;
    std::string model_dir;
    std::vector<int> snr_grid;
    std::vector<int> prb_model_sizes;
};

// Reserved node kind resolved to "chanest.<estimator.kind>" while parsing, so
// swapping estimators is a one-line config change.
inline constexpr std::string_view kEstimatorKind = "estimator";

struct GraphManifest {
    int version = 1;
    std::vector<NodeDescriptor> nodes;
    std::vector<Edge> edges;
    std::vector<AdapterEntry> adapters;
    std::vector<GraphInput> inputs;
    std::vector<GraphOutput> outputs;
    std::optional<EstimatorConfig> estimator;
    std::map<std::string, std::int64_t> dims;
    // Flat scalar section consumed by the harness; opaque to the graph.
    std::map<std::string, std::string> simulation;
    // Directory that relative file params (blobs, model_dir) resolve against.
    std::filesystem::path base_dir;

    const NodeDescriptor* find_node(std::string_view name) const;
};

using DimOverrides = std::map<std::string, std::int64_t>;

// Parses the YAML manifest schema (docs/manifest.md); unknown keys are
// ConfigError. Symbolic shape entries resolve against `dims` with
// `overrides` taking precedence.
GraphManifest parse_manifest(std::string_view yaml_text, const std::filesystem::path& base_dir = {},
                             const DimOverrides& overrides = {});
GraphManifest load_manifest(const std::filesystem::path& path, const DimOverrides& overrides = {});

struct Diagnostic {
    enum class Category { Structure, Port, Adapter, Cycle };
    Category category;
    std::string location;
    std::string message;

    std::string str() const { return location + ": " + message; }
};

// Re-points every node resolved from "estimator" (and estimator.kind) at
// `kind`, e.g. "mmse"; ConfigError if the manifest has no such node.
void set_estimator_kind(GraphManifest& manifest, const std::string& kind);

// Empty iff the manifest satisfies every structural invariant.
std::vector<Diagnostic> validate_manifest(const GraphManifest& manifest);

} // namespace aerial_forge::graph
