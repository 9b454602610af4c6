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
#include <memory>

#include "aerial_forge/chanest/nodes.hpp"
#include "aerial_forge/core/error.hpp"
#include "aerial_forge/engine/nodes.hpp"
#include "aerial_forge/linklevel/simulator.hpp"

namespace aerial_forge::linklevel {

namespace {

// x = conj(H) y / (|H|^2 + s2), per RE.
class MmseEqualizerNode final : public graph::Node {
public:
    explicit MmseEqualizerNode(const graph::NodeDescriptor& d) : Node(d)
    {
        const auto& h = graph::expect_input(d, "h_grid", DType::Complex64);
        graph::expect_shape(d, graph::expect_input(d, "rx_grid", DType::Complex64), h.shape);
        graph::expect_shape(d, graph::expect_input(d, "noise_var", DType::Float32), {1});
        graph::expect_shape(d, graph::expect_output(d, "x_hat", DType::Complex64), h.shape);
    }

    graph::TensorMap run(const graph::TensorMap& in) const override
    {
        const auto h = in.at("h_grid").complex_data();
        const auto y = in.at("rx_grid").complex_data();
        const double s2 = std::max(static_cast<double>(in.at("noise_var").data()[0]), 0.0);
        TensorValue x(*descriptor().find_output("x_hat"));
        auto xd = x.complex_data();
        for (std::size_t i = 0; i < xd.size(); ++i) {
            const cf64 H = h[i];
            const double den = std::norm(H) + s2;
            xd[i] = den > 0.0 ? cf32(std::conj(H) * cf64(y[i]) / den) : cf32{};
        }
        graph::TensorMap out;
        out.emplace("x_hat", std::move(x));
        return out;
    }
};

class IdentityNode final : public graph::Node {
public:
    explicit IdentityNode(const graph::NodeDescriptor& d) : Node(d)
    {
        require(d.inputs.size() == 1 && d.outputs.size() == 1 && d.inputs[0].compatible_with(d.outputs[0]),
                ErrorCode::PortMismatch, "node '" + d.name + "' (util.identity) needs one input and one matching output");
    }

    graph::TensorMap run(const graph::TensorMap& in) const override
    {
        TensorValue v = in.at(descriptor().inputs[0].name);
        v.mutable_spec().name = descriptor().outputs[0].name;
        graph::TensorMap out;
        out.emplace(descriptor().outputs[0].name, std::move(v));
        return out;
    }
};

} // namespace

void register_linklevel_nodes(graph::FactoryRegistry& r)
{
    r.register_factory("eq.mmse", [](const graph::NodeDescriptor& d, const graph::BuildContext&) {
        return std::unique_ptr<graph::Node>(std::make_unique<MmseEqualizerNode>(d));
    });
    r.register_factory("util.identity", [](const graph::NodeDescriptor& d, const graph::BuildContext&) {
        return std::unique_ptr<graph::Node>(std::make_unique<IdentityNode>(d));
    });
}

const graph::FactoryRegistry& default_registry()
{
    static const graph::FactoryRegistry registry = [] {
        graph::FactoryRegistry r;
        engine::register_engine_nodes(r);
        chanest::register_chanest_nodes(r);
        register_linklevel_nodes(r);
        return r;
    }();
    return registry;
}

} // namespace aerial_forge::linklevel
