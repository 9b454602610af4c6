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
#include "aerial_forge/graph/manifest.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "aerial_forge/core/error.hpp"
#include "aerial_forge/graph/graph.hpp"

namespace aerial_forge::graph {

// ---------------------------------------------------------------- Params

const ParamValue* Params::find(std::string_view key) const
{
    auto it = values_.find(std::string(key));
    return it == values_.end() ? nullptr : &it->second;
}

std::int64_t Params::get_int(std::string_view key) const
{
    const ParamValue* v = find(key);
    require(v != nullptr, ErrorCode::ConfigError, "missing param '" + std::string(key) + "'");
    if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
    raise(ErrorCode::ConfigError, "param '" + std::string(key) + "' is not an integer");
}

std::int64_t Params::get_int(std::string_view key, std::int64_t fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

double Params::get_double(std::string_view key) const
{
    const ParamValue* v = find(key);
    require(v != nullptr, ErrorCode::ConfigError, "missing param '" + std::string(key) + "'");
    if (const auto* d = std::get_if<double>(v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
    raise(ErrorCode::ConfigError, "param '" + std::string(key) + "' is not numeric");
}

double Params::get_double(std::string_view key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

bool Params::get_bool(std::string_view key, bool fallback) const
{
    const ParamValue* v = find(key);
    if (v == nullptr) return fallback;
    if (const auto* b = std::get_if<bool>(v)) return *b;
    raise(ErrorCode::ConfigError, "param '" + std::string(key) + "' is not a boolean");
}

std::string Params::get_string(std::string_view key) const
{
    const ParamValue* v = find(key);
    require(v != nullptr, ErrorCode::ConfigError, "missing param '" + std::string(key) + "'");
    if (const auto* s = std::get_if<std::string>(v)) return *s;
    raise(ErrorCode::ConfigError, "param '" + std::string(key) + "' is not a string");
}

std::string Params::get_string(std::string_view key, std::string_view fallback) const
{
    return has(key) ? get_string(key) : std::string(fallback);
}

// ---------------------------------------------------------------- small types

PortRef PortRef::parse(std::string_view text)
{
    const auto dot = text.find('.');
    require(dot != std::string_view::npos && dot > 0 && dot + 1 < text.size(), ErrorCode::ConfigError,
            "port reference '" + std::string(text) + "' must look like node.port");
    return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

namespace {
const TensorSpec* find_port(const std::vector<TensorSpec>& ports, std::string_view name)
{
    auto it = std::find_if(ports.begin(), ports.end(), [&](const TensorSpec& s) { return s.name == name; });
    return it == ports.end() ? nullptr : &*it;
}
} // namespace

const TensorSpec* NodeDescriptor::find_input(std::string_view port) const { return find_port(inputs, port); }
const TensorSpec* NodeDescriptor::find_output(std::string_view port) const { return find_port(outputs, port); }

const NodeDescriptor* GraphManifest::find_node(std::string_view name) const
{
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeDescriptor& n) { return n.name == name; });
    return it == nodes.end() ? nullptr : &*it;
}

// ---------------------------------------------------------------- parsing

namespace {

std::string where(const YAML::Node& node)
{
    const auto mark = node.Mark();
    if (mark.line < 0) return "manifest";
    return "manifest line " + std::to_string(mark.line + 1);
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed, std::string_view context)
{
    require(map.IsMap(), ErrorCode::ConfigError, where(map) + ": " + std::string(context) + " must be a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            raise(ErrorCode::ConfigError,
                  where(kv.first) + ": unknown key '" + key + "' in " + std::string(context));
    }
}

template <typename T>
T scalar(const YAML::Node& node, std::string_view what)
{
    require(node && node.IsScalar(), ErrorCode::ConfigError, where(node) + ": " + std::string(what) + " must be a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        raise(ErrorCode::ConfigError, where(node) + ": bad value '" + node.Scalar() + "' for " + std::string(what));
    }
}

ParamValue param_value(const YAML::Node& node)
{
    require(node.IsScalar(), ErrorCode::ConfigError, where(node) + ": node params must be scalars");
    // Quoted scalars stay strings.
    if (node.Tag() == "!") return node.Scalar();
    std::int64_t i;
    if (YAML::convert<std::int64_t>::decode(node, i)) return i;
    double d;
    if (YAML::convert<double>::decode(node, d)) return d;
    bool b;
    if (YAML::convert<bool>::decode(node, b)) return b;
    return node.Scalar();
}

struct DimTable {
    std::map<std::string, std::int64_t> dims;

    std::size_t resolve(const YAML::Node& entry) const
    {
        require(entry.IsScalar(), ErrorCode::ConfigError, where(entry) + ": shape entries must be scalars");
        std::int64_t v;
        if (YAML::convert<std::int64_t>::decode(entry, v)) {
            require(v >= 1, ErrorCode::ConfigError, where(entry) + ": dimension must be >= 1");
            return static_cast<std::size_t>(v);
        }
        auto it = dims.find(entry.Scalar());
        require(it != dims.end(), ErrorCode::ConfigError, where(entry) + ": unknown dimension '" + entry.Scalar() + "'");
        require(it->second >= 1, ErrorCode::ConfigError, "dimension '" + it->first + "' must be >= 1");
        return static_cast<std::size_t>(it->second);
    }
};

std::vector<std::size_t> parse_shape(const YAML::Node& node, const DimTable& dims)
{
    require(node && node.IsSequence(), ErrorCode::ConfigError, where(node) + ": shape must be a list");
    std::vector<std::size_t> shape;
    for (const auto& e : node) shape.push_back(dims.resolve(e));
    return shape;
}

TensorSpec parse_spec(const YAML::Node& node, const DimTable& dims)
{
    check_keys(node, {"name", "dtype", "shape", "layout"}, "port spec");
    TensorSpec spec;
    spec.name = scalar<std::string>(node["name"], "port name");
    try {
        spec.dtype = dtype_from_string(scalar<std::string>(node["dtype"], "dtype"));
    } catch (const Error& e) {
        raise(ErrorCode::ConfigError, where(node) + ": " + e.what());
    }
    spec.shape = parse_shape(node["shape"], dims);
    if (node["layout"]) spec.layout = scalar<std::string>(node["layout"], "layout");
    require(spec.layout == "row_major", ErrorCode::ConfigError, where(node) + ": only row_major layout is supported");
    return spec;
}

std::vector<PortRef> parse_targets(const YAML::Node& node)
{
    std::vector<PortRef> out;
    if (node && node.IsScalar()) {
        out.push_back(PortRef::parse(node.Scalar()));
    } else {
        require(node && node.IsSequence(), ErrorCode::ConfigError, where(node) + ": 'to' must be a port or a list of ports");
        for (const auto& e : node) out.push_back(PortRef::parse(scalar<std::string>(e, "port")));
    }
    return out;
}

AdapterKind parse_adapter_kind(const YAML::Node& node, const DimTable& dims)
{
    const auto kind = scalar<std::string>(node["kind"], "adapter kind");
    if (kind == "pack_complex_to_planar") return AdapterKind::pack();
    if (kind == "unpack_planar_to_complex") return AdapterKind::unpack();
    if (kind == "reshape") return AdapterKind::reshape(parse_shape(node["shape"], dims));
    raise(ErrorCode::ConfigError, where(node) + ": unknown adapter kind '" + kind + "'");
}

std::vector<int> int_list(const YAML::Node& node, std::string_view what)
{
    std::vector<int> out;
    if (!node) return out;
    require(node.IsSequence(), ErrorCode::ConfigError, where(node) + ": " + std::string(what) + " must be a list");
    for (const auto& e : node) out.push_back(scalar<int>(e, what));
    return out;
}

} // namespace

GraphManifest parse_manifest(std::string_view yaml_text, const std::filesystem::path& base_dir,
                             const DimOverrides& overrides)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        raise(ErrorCode::ConfigError, std::string("manifest is not valid YAML: ") + e.what());
    }
    require(root.IsMap(), ErrorCode::ConfigError, "manifest root must be a mapping");
    check_keys(root, {"version", "dims", "estimator", "simulation", "inputs", "outputs", "nodes", "edges", "adapters"},
               "manifest");

    GraphManifest m;
    m.base_dir = base_dir;
    m.version = root["version"] ? scalar<int>(root["version"], "version") : 1;
    require(m.version == 1, ErrorCode::ConfigError, "unsupported manifest version " + std::to_string(m.version));

    DimTable dims;
    if (const auto d = root["dims"]) {
        require(d.IsMap(), ErrorCode::ConfigError, where(d) + ": dims must be a mapping");
        for (const auto& kv : d) dims.dims[kv.first.as<std::string>()] = scalar<std::int64_t>(kv.second, "dimension");
    }
    for (const auto& [k, v] : overrides) dims.dims[k] = v;
    m.dims = dims.dims;

    if (const auto e = root["estimator"]) {
        check_keys(e, {"kind", "model_dir", "snr_grid", "prb_model_sizes"}, "estimator");
        EstimatorConfig cfg;
        cfg.kind = scalar<std::string>(e["kind"], "estimator kind");
        if (e["model_dir"]) cfg.model_dir = scalar<std::string>(e["model_dir"], "model_dir");
        cfg.snr_grid = int_list(e["snr_grid"], "snr_grid");
        cfg.prb_model_sizes = int_list(e["prb_model_sizes"], "prb_model_sizes");
        m.estimator = std::move(cfg);
    }

    if (const auto s = root["simulation"]) {
        require(s.IsMap(), ErrorCode::ConfigError, where(s) + ": simulation must be a mapping");
        for (const auto& kv : s) m.simulation[kv.first.as<std::string>()] = scalar<std::string>(kv.second, "simulation value");
    }

    const auto nodes = root["nodes"];
    require(nodes && nodes.IsSequence(), ErrorCode::ConfigError, "manifest needs a 'nodes' list");
    for (const auto& n : nodes) {
        check_keys(n, {"name", "kind", "params", "inputs", "outputs"}, "node");
        NodeDescriptor desc;
        desc.name = scalar<std::string>(n["name"], "node name");
        desc.kind = scalar<std::string>(n["kind"], "node kind");
        if (desc.kind == kEstimatorKind) {
            require(m.estimator.has_value(), ErrorCode::ConfigError,
                    "node '" + desc.name + "' uses kind 'estimator' but the manifest has no estimator section");
            desc.kind = "chanest." + m.estimator->kind;
            desc.from_estimator = true;
        }
        if (const auto p = n["params"]) {
            require(p.IsMap(), ErrorCode::ConfigError, where(p) + ": params must be a mapping");
            for (const auto& kv : p) desc.params.set(kv.first.as<std::string>(), param_value(kv.second));
        }
        if (const auto in = n["inputs"]) {
            require(in.IsSequence(), ErrorCode::ConfigError, where(in) + ": inputs must be a list");
            for (const auto& s : in) desc.inputs.push_back(parse_spec(s, dims));
        }
        if (const auto out = n["outputs"]) {
            require(out.IsSequence(), ErrorCode::ConfigError, where(out) + ": outputs must be a list");
            for (const auto& s : out) desc.outputs.push_back(parse_spec(s, dims));
        }
        m.nodes.push_back(std::move(desc));
    }

    if (const auto edges = root["edges"]) {
        require(edges.IsSequence(), ErrorCode::ConfigError, where(edges) + ": edges must be a list");
        for (const auto& e : edges) {
            check_keys(e, {"from", "to"}, "edge");
            m.edges.push_back({PortRef::parse(scalar<std::string>(e["from"], "from")),
                               PortRef::parse(scalar<std::string>(e["to"], "to"))});
        }
    }

    if (const auto adapters = root["adapters"]) {
        require(adapters.IsSequence(), ErrorCode::ConfigError, where(adapters) + ": adapters must be a list");
        for (const auto& a : adapters) {
            check_keys(a, {"from", "to", "kind", "shape"}, "adapter");
            m.adapters.push_back({{PortRef::parse(scalar<std::string>(a["from"], "from")),
                                   PortRef::parse(scalar<std::string>(a["to"], "to"))},
                                  parse_adapter_kind(a, dims)});
        }
    }

    if (const auto inputs = root["inputs"]) {
        require(inputs.IsSequence(), ErrorCode::ConfigError, where(inputs) + ": inputs must be a list");
        for (const auto& i : inputs) {
            check_keys(i, {"name", "to"}, "graph input");
            m.inputs.push_back({scalar<std::string>(i["name"], "input name"), parse_targets(i["to"])});
        }
    }

    if (const auto outputs = root["outputs"]) {
        require(outputs.IsSequence(), ErrorCode::ConfigError, where(outputs) + ": outputs must be a list");
        for (const auto& o : outputs) {
            check_keys(o, {"name", "from"}, "graph output");
            m.outputs.push_back({scalar<std::string>(o["name"], "output name"),
                                 PortRef::parse(scalar<std::string>(o["from"], "from"))});
        }
    }
    return m;
}

GraphManifest load_manifest(const std::filesystem::path& path, const DimOverrides& overrides)
{
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open manifest '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path(), overrides);
}

void set_estimator_kind(GraphManifest& m, const std::string& kind)
{
    require(!kind.empty(), ErrorCode::ConfigError, "estimator kind must be non-empty");
    bool any = false;
    for (auto& n : m.nodes) {
        if (!n.from_estimator) continue;
        n.kind = "chanest." + kind;
        any = true;
    }
    require(any, ErrorCode::ConfigError, "manifest has no node of kind 'estimator' to swap");
    m.estimator->kind = kind;
}

// ---------------------------------------------------------------- validation

std::vector<Diagnostic> validate_manifest(const GraphManifest& m)
{
    using Cat = Diagnostic::Category;
    std::vector<Diagnostic> diags;
    auto emit = [&](Cat c, std::string loc, std::string msg) { diags.push_back({c, std::move(loc), std::move(msg)}); };

    std::set<std::string> names;
    for (const auto& n : m.nodes) {
        const std::string loc = "node '" + n.name + "'";
        if (n.name.empty()) emit(Cat::Structure, "node", "empty node name");
        if (n.name.find('.') != std::string::npos) emit(Cat::Structure, loc, "node names may not contain '.'");
        if (!names.insert(n.name).second) emit(Cat::Structure, loc, "duplicate node name");
        if (n.kind.empty()) emit(Cat::Structure, loc, "empty kind");
        for (const auto* ports : {&n.inputs, &n.outputs}) {
            std::set<std::string> port_names;
            for (const auto& s : *ports) {
                if (!port_names.insert(s.name).second) emit(Cat::Port, loc + " port '" + s.name + "'", "duplicate port name");
                try {
                    validate_spec(s);
                } catch (const Error& e) {
                    emit(Cat::Port, loc + " port '" + s.name + "'", e.what());
                }
            }
        }
    }

    auto output_spec = [&](const PortRef& p) -> const TensorSpec* {
        const auto* n = m.find_node(p.node);
        return n ? n->find_output(p.port) : nullptr;
    };
    auto input_spec = [&](const PortRef& p) -> const TensorSpec* {
        const auto* n = m.find_node(p.node);
        return n ? n->find_input(p.port) : nullptr;
    };

    std::map<PortRef, int> producers;
    std::set<Edge> edge_set;
    for (const auto& e : m.edges) {
        const std::string loc = "edge " + e.str();
        const bool from_ok = output_spec(e.from) != nullptr;
        const bool to_ok = input_spec(e.to) != nullptr;
        if (!from_ok) emit(Cat::Port, loc, "producer port " + e.from.str() + " does not exist");
        if (!to_ok) emit(Cat::Port, loc, "consumer port " + e.to.str() + " does not exist");
        if (!edge_set.insert(e).second) emit(Cat::Structure, loc, "duplicate edge");
        if (to_ok) ++producers[e.to];
    }

    std::set<std::string> input_names;
    for (const auto& gi : m.inputs) {
        const std::string loc = "graph input '" + gi.name + "'";
        if (!input_names.insert(gi.name).second) emit(Cat::Structure, loc, "duplicate graph input name");
        if (gi.targets.empty()) emit(Cat::Structure, loc, "feeds no ports");
        const TensorSpec* first = nullptr;
        for (const auto& t : gi.targets) {
            const auto* spec = input_spec(t);
            if (!spec) {
                emit(Cat::Port, loc, "target port " + t.str() + " does not exist");
                continue;
            }
            ++producers[t];
            if (first && !first->compatible_with(*spec))
                emit(Cat::Port, loc, "targets disagree: " + first->describe() + " vs " + spec->describe());
            if (!first) first = spec;
        }
    }

    std::set<std::string> output_names;
    for (const auto& go : m.outputs) {
        const std::string loc = "graph output '" + go.name + "'";
        if (!output_names.insert(go.name).second) emit(Cat::Structure, loc, "duplicate graph output name");
        if (!output_spec(go.source)) emit(Cat::Port, loc, "source port " + go.source.str() + " does not exist");
    }

    for (const auto& n : m.nodes) {
        for (const auto& s : n.inputs) {
            const PortRef p{n.name, s.name};
            const int count = producers.count(p) ? producers[p] : 0;
            if (count == 0) emit(Cat::Port, "port " + p.str(), "dangling consumer port has no producer");
            if (count > 1) emit(Cat::Port, "port " + p.str(), "consumer port has " + std::to_string(count) + " producers");
        }
    }

    // Adapter chains must reference declared edges and turn the producer spec
    // into the consumer spec.
    std::map<Edge, std::vector<const AdapterEntry*>> chains;
    for (const auto& a : m.adapters) {
        if (!edge_set.count(a.edge)) {
            emit(Cat::Adapter, "adapter " + a.kind.str() + " on " + a.edge.str(), "edge is not declared");
            continue;
        }
        chains[a.edge].push_back(&a);
    }
    for (const auto& e : m.edges) {
        const auto* from = output_spec(e.from);
        const auto* to = input_spec(e.to);
        if (!from || !to) continue;
        TensorSpec current = *from;
        bool chain_ok = true;
        for (const auto* a : chains[e]) {
            try {
                current = adapt_spec(a->kind, current);
            } catch (const Error& err) {
                emit(Cat::Adapter, "adapter " + a->kind.str() + " on " + e.str(), err.what());
                chain_ok = false;
                break;
            }
        }
        if (chain_ok && !current.compatible_with(*to))
            emit(chains[e].empty() ? Cat::Port : Cat::Adapter, "edge " + e.str(),
                 "spec " + current.describe() + " does not match consumer " + to->describe());
    }

    try {
        (void)topological_order(m);
    } catch (const Error& e) {
        emit(Cat::Cycle, "graph", e.what());
    }
    return diags;
}

} // namespace aerial_forge::graph
