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
#include "aerial_forge/graph/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "aerial_forge/core/error.hpp"

namespace aerial_forge::graph {

std::filesystem::path BuildContext::resolve(const std::string& relative) const
{
    std::filesystem::path p(relative);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

// ---------------------------------------------------------------- registry

void FactoryRegistry::register_factory(std::string kind, NodeBuilder builder)
{
    require(!kind.empty(), ErrorCode::InvalidArgument, "factory kind must be non-empty");
    require(static_cast<bool>(builder), ErrorCode::InvalidArgument, "factory for '" + kind + "' is empty");
    if (builders_.count(kind)) raise(ErrorCode::DuplicateKind, "kind '" + kind + "' is already registered");
    builders_.emplace(std::move(kind), std::move(builder));
}

bool FactoryRegistry::contains(std::string_view kind) const { return builders_.find(kind) != builders_.end(); }

const NodeBuilder& FactoryRegistry::find(std::string_view kind) const
{
    auto it = builders_.find(kind);
    if (it == builders_.end()) raise(ErrorCode::UnknownKind, "no factory registered for kind '" + std::string(kind) + "'");
    return it->second;
}

std::vector<std::string> FactoryRegistry::kinds() const
{
    std::vector<std::string> out;
    for (const auto& [k, _] : builders_) out.push_back(k);
    return out;
}

// ---------------------------------------------------------------- ordering

std::vector<std::size_t> topological_order(const GraphManifest& m)
{
    const std::size_t n = m.nodes.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(m.nodes[i].name, i);

    std::vector<std::set<std::size_t>> succ(n);
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& e : m.edges) {
        auto a = index.find(e.from.node);
        auto b = index.find(e.to.node);
        if (a == index.end() || b == index.end()) continue;
        if (succ[a->second].insert(b->second).second) ++indegree[b->second];
    }

    // Kahn with the smallest manifest index always taken first.
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.insert(i);
    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        const std::size_t i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (auto j : succ[i])
            if (--indegree[j] == 0) ready.insert(j);
    }
    if (order.size() != n) {
        std::ostringstream os;
        os << "cycle among nodes:";
        for (std::size_t i = 0; i < n; ++i)
            if (indegree[i] > 0) os << " " << m.nodes[i].name;
        raise(ErrorCode::CycleDetected, os.str());
    }
    return order;
}

// ---------------------------------------------------------------- graph

namespace {

struct Route {
    std::size_t consumer; // index into Impl::nodes
    std::string port;
    std::vector<AdapterKind> adapters;
};

} // namespace

struct Graph::Impl {
    std::vector<std::unique_ptr<Node>> nodes; // execution order
    std::map<std::string, std::size_t> by_name;
    // routes[node][output port]
    std::vector<std::map<std::string, std::vector<Route>>> routes;
    std::map<std::string, std::vector<Route>> input_routes;
    std::map<std::string, TensorSpec> input_specs;
    std::map<std::string, TensorSpec> output_specs;
    // (node, port) -> graph output names
    std::vector<std::map<std::string, std::vector<std::string>>> output_taps;
};

Graph::Graph(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Graph::Graph(Graph&&) noexcept = default;
Graph& Graph::operator=(Graph&&) noexcept = default;
Graph::~Graph() = default;

std::vector<std::string> Graph::node_order() const
{
    std::vector<std::string> out;
    for (const auto& n : impl_->nodes) out.push_back(n->name());
    return out;
}

const Node& Graph::node(std::string_view name) const
{
    auto it = impl_->by_name.find(std::string(name));
    if (it == impl_->by_name.end()) raise(ErrorCode::InvalidArgument, "graph has no node '" + std::string(name) + "'");
    return *impl_->nodes[it->second];
}

const std::map<std::string, TensorSpec>& Graph::input_specs() const noexcept { return impl_->input_specs; }
const std::map<std::string, TensorSpec>& Graph::output_specs() const noexcept { return impl_->output_specs; }

namespace {

void deliver(std::vector<TensorMap>& pending, const Route& route, TensorValue v)
{
    for (const auto& a : route.adapters) v = apply_adapter(a, std::move(v));
    v.mutable_spec().name = route.port;
    pending[route.consumer].insert_or_assign(route.port, std::move(v));
}

} // namespace

TensorMap Graph::execute(const TensorMap& inputs) const
{
    const Impl& g = *impl_;
    std::vector<TensorMap> pending(g.nodes.size());

    for (const auto& [name, spec] : g.input_specs) {
        auto it = inputs.find(name);
        if (it == inputs.end()) raise(ErrorCode::MissingInput, "graph input '" + name + "' is not bound");
        if (!it->second.spec().compatible_with(spec) || it->second.data().size() != spec.float_count())
            raise(ErrorCode::SpecMismatch, "graph input '" + name + "' expects " + spec.describe() + ", got " +
                                               it->second.spec().describe());
        for (const auto& r : g.input_routes.at(name)) deliver(pending, r, it->second);
    }

    TensorMap results;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const Node& node = *g.nodes[i];
        TensorMap outputs;
        try {
            outputs = node.run(pending[i]);
        } catch (const std::exception& e) {
            raise(ErrorCode::NodeFailure, "node '" + node.name() + "': " + e.what());
        }
        pending[i].clear();
        for (const auto& spec : node.descriptor().outputs) {
            auto it = outputs.find(spec.name);
            if (it == outputs.end())
                raise(ErrorCode::NodeFailure, "node '" + node.name() + "' did not produce output '" + spec.name + "'");
            if (!it->second.spec().compatible_with(spec) || it->second.data().size() != spec.float_count())
                raise(ErrorCode::NodeFailure, "node '" + node.name() + "' produced " + it->second.spec().describe() +
                                                  " for port declared as " + spec.describe());
        }
        for (auto& [port, value] : outputs) {
            if (auto taps = g.output_taps[i].find(port); taps != g.output_taps[i].end()) {
                for (const auto& out_name : taps->second) {
                    TensorValue copy = value;
                    copy.mutable_spec().name = out_name;
                    results.insert_or_assign(out_name, std::move(copy));
                }
            }
            auto r = g.routes[i].find(port);
            if (r == g.routes[i].end()) continue;
            const auto& fanout = r->second;
            for (std::size_t k = 0; k + 1 < fanout.size(); ++k) deliver(pending, fanout[k], value);
            deliver(pending, fanout.back(), std::move(value));
        }
    }
    return results;
}

Graph build_graph(const GraphManifest& manifest, const FactoryRegistry& registry)
{
    const auto diags = validate_manifest(manifest);
    if (!diags.empty()) {
        const bool cycle = std::any_of(diags.begin(), diags.end(),
                                       [](const Diagnostic& d) { return d.category == Diagnostic::Category::Cycle; });
        std::ostringstream os;
        os << "manifest failed validation:";
        for (const auto& d : diags) os << "\n  " << d.str();
        raise(cycle ? ErrorCode::CycleDetected : ErrorCode::PortMismatch, os.str());
    }

    // Resolve every kind before constructing anything.
    for (const auto& n : manifest.nodes) (void)registry.find(n.kind);

    const auto order = topological_order(manifest);
    auto impl = std::make_unique<Graph::Impl>();
    BuildContext ctx{manifest.base_dir, manifest.estimator ? &*manifest.estimator : nullptr};

    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const auto& desc = manifest.nodes[order[pos]];
        std::unique_ptr<Node> node;
        try {
            node = registry.find(desc.kind)(desc, ctx);
        } catch (const Error& e) {
            // Blob and bank problems surface as BlobLoadError; port/param
            // problems keep their own code.
            switch (e.code()) {
            case ErrorCode::BadMagic:
            case ErrorCode::UnsupportedVersion:
            case ErrorCode::CrcMismatch:
            case ErrorCode::MalformedHeader:
            case ErrorCode::WeightBoundsError:
            case ErrorCode::IoError:
            case ErrorCode::BankError:
                raise(ErrorCode::BlobLoadError, "node '" + desc.name + "': " + e.what());
            default: throw;
            }
        }
        require(node != nullptr, ErrorCode::InvalidArgument, "factory for '" + desc.kind + "' returned null");
        impl->by_name.emplace(desc.name, pos);
        impl->nodes.push_back(std::move(node));
    }
    impl->routes.resize(impl->nodes.size());
    impl->output_taps.resize(impl->nodes.size());

    std::map<Edge, std::vector<AdapterKind>> chains;
    for (const auto& a : manifest.adapters) chains[a.edge].push_back(a.kind);

    for (const auto& e : manifest.edges) {
        const std::size_t from = impl->by_name.at(e.from.node);
        const std::size_t to = impl->by_name.at(e.to.node);
        impl->routes[from][e.from.port].push_back({to, e.to.port, chains[e]});
    }
    for (const auto& gi : manifest.inputs) {
        auto& routes = impl->input_routes[gi.name];
        for (const auto& t : gi.targets) routes.push_back({impl->by_name.at(t.node), t.port, {}});
        TensorSpec spec = *manifest.find_node(gi.targets.front().node)->find_input(gi.targets.front().port);
        spec.name = gi.name;
        impl->input_specs.emplace(gi.name, std::move(spec));
    }
    for (const auto& go : manifest.outputs) {
        const std::size_t from = impl->by_name.at(go.source.node);
        impl->output_taps[from][go.source.port].push_back(go.name);
        TensorSpec spec = *manifest.find_node(go.source.node)->find_output(go.source.port);
        spec.name = go.name;
        impl->output_specs.emplace(go.name, std::move(spec));
    }
    return Graph(std::move(impl));
}

// ---------------------------------------------------------------- port helpers

const TensorSpec& expect_input(const NodeDescriptor& desc, std::string_view port, DType dtype)
{
    const auto* s = desc.find_input(port);
    if (!s) raise(ErrorCode::PortMismatch, "node '" + desc.name + "' (" + desc.kind + ") needs input port '" + std::string(port) + "'");
    if (s->dtype != dtype)
        raise(ErrorCode::PortMismatch, "node '" + desc.name + "' input '" + std::string(port) + "' must be " +
                                           std::string(to_string(dtype)));
    return *s;
}

const TensorSpec& expect_output(const NodeDescriptor& desc, std::string_view port, DType dtype)
{
    const auto* s = desc.find_output(port);
    if (!s) raise(ErrorCode::PortMismatch, "node '" + desc.name + "' (" + desc.kind + ") needs output port '" + std::string(port) + "'");
    if (s->dtype != dtype)
        raise(ErrorCode::PortMismatch, "node '" + desc.name + "' output '" + std::string(port) + "' must be " +
                                           std::string(to_string(dtype)));
    return *s;
}

void expect_shape(const NodeDescriptor& desc, const TensorSpec& spec, const std::vector<std::size_t>& shape)
{
    if (spec.shape != shape) {
        TensorSpec want = spec;
        want.shape = shape;
        raise(ErrorCode::PortMismatch, "node '" + desc.name + "' port " + spec.describe() + " must be " + want.describe());
    }
}

} // namespace aerial_forge::graph
