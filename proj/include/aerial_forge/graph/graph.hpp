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

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "aerial_forge/core/tensor.hpp"
#include "aerial_forge/graph/manifest.hpp"

namespace aerial_forge::graph {

using TensorMap = std::map<std::string, TensorValue>;

// A node implementation. run() must be safe to call concurrently: any scratch
// state lives on the stack of the call.
class Node {
public:
    explicit Node(NodeDescriptor descriptor) : descriptor_(std::move(descriptor)) {}
    virtual ~Node() = default;
    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    const NodeDescriptor& descriptor() const noexcept { return descriptor_; }
    const std::string& name() const noexcept { return descriptor_.name; }

    // `inputs` holds exactly the declared input ports; the result must hold
    // every declared output port with its declared spec.
    virtual TensorMap run(const TensorMap& inputs) const = 0;

private:
    NodeDescriptor descriptor_;
};

struct BuildContext {
    std::filesystem::path base_dir;
    const EstimatorConfig* estimator = nullptr;

    std::filesystem::path resolve(const std::string& relative) const;
};

using NodeBuilder = std::function<std::unique_ptr<Node>(const NodeDescriptor&, const BuildContext&)>;

// Setup-phase only; not synchronized.
class FactoryRegistry {
public:
    // Throws DuplicateKind for re-registration and InvalidArgument for an
    // empty kind.
    void register_factory(std::string kind, NodeBuilder builder);
    bool contains(std::string_view kind) const;
    const NodeBuilder& find(std::string_view kind) const;
    std::vector<std::string> kinds() const;

private:
    std::map<std::string, NodeBuilder, std::less<>> builders_;
};

// Immutable after build; execute() keeps per-call state local so one Graph
// can serve many concurrent slots.
class Graph {
public:
    Graph(Graph&&) noexcept;
    Graph& operator=(Graph&&) noexcept;
    ~Graph();

    std::vector<std::string> node_order() const;
    const Node& node(std::string_view name) const;
    const std::map<std::string, TensorSpec>& input_specs() const noexcept;
    const std::map<std::string, TensorSpec>& output_specs() const noexcept;

    TensorMap execute(const TensorMap& inputs) const;

private:
    friend Graph build_graph(const GraphManifest&, const FactoryRegistry&);
    struct Impl;
    explicit Graph(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

// Validates, orders nodes topologically (ties broken by manifest order),
// constructs each node through its factory and materializes edge adapters.
Graph build_graph(const GraphManifest& manifest, const FactoryRegistry& registry);

// Deterministic Kahn ordering of manifest node indices; throws CycleDetected.
std::vector<std::size_t> topological_order(const GraphManifest& manifest);

// Helpers for node builders that check declared ports against what the node
// implementation expects; they raise PortMismatch.
const TensorSpec& expect_input(const NodeDescriptor& desc, std::string_view port, DType dtype);
const TensorSpec& expect_output(const NodeDescriptor& desc, std::string_view port, DType dtype);
void expect_shape(const NodeDescriptor& desc, const TensorSpec& spec, const std::vector<std::size_t>& shape);

} // namespace aerial_forge::graph
