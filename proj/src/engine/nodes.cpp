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
#include "aerial_forge/engine/nodes.hpp"

#include <memory>

#include "aerial_forge/core/error.hpp"
#include "aerial_forge/engine/engine.hpp"
#include "aerial_forge/engine/golden.hpp"

namespace aerial_forge::engine {

namespace {

class BlobNode final : public graph::Node {
public:
    BlobNode(const graph::NodeDescriptor& d, const graph::BuildContext& ctx)
        : Node(d), engine_(load_engine_file(ctx.resolve(d.params.get_string("blob"))))
    {
        if (d.params.has("golden")) {
            const auto report = verify_golden(engine_, load_golden_file(ctx.resolve(d.params.get_string("golden"))));
            if (!report.passed)
                raise(ErrorCode::BlobLoadError, "node '" + d.name + "': golden vectors fail\n" + report.str());
        }
        require(d.inputs.size() == 1, ErrorCode::PortMismatch, "node '" + d.name + "' (engine.blob) takes one input");
        if (!d.inputs[0].compatible_with(engine_.input_spec()))
            raise(ErrorCode::PortMismatch, "node '" + d.name + "' input " + d.inputs[0].describe() +
                                               " does not match engine input " + engine_.input_spec().describe());
        require(!d.outputs.empty(), ErrorCode::PortMismatch, "node '" + d.name + "' declares no outputs");
        for (const auto& o : d.outputs) {
            std::size_t idx = 0;
            try {
                idx = engine_.output_index(o.name);
            } catch (const Error&) {
                raise(ErrorCode::PortMismatch, "node '" + d.name + "' output '" + o.name + "' is not an engine output");
            }
            if (!o.compatible_with(engine_.outputs()[idx].spec))
                raise(ErrorCode::PortMismatch, "node '" + d.name + "' output " + o.describe() + " does not match " +
                                                   engine_.outputs()[idx].spec.describe());
            taps_.emplace_back(o.name, idx);
        }
    }

    graph::TensorMap run(const graph::TensorMap& in) const override
    {
        auto outs = infer_all(engine_, in.at(descriptor().inputs[0].name));
        graph::TensorMap out;
        for (const auto& [name, idx] : taps_) {
            TensorValue v = outs[idx];
            v.mutable_spec().name = name;
            out.emplace(name, std::move(v));
        }
        return out;
    }

private:
    Engine engine_;
    std::vector<std::pair<std::string, std::size_t>> taps_;
};

} // namespace

void register_engine_nodes(graph::FactoryRegistry& r)
{
    r.register_factory("engine.blob", [](const graph::NodeDescriptor& d, const graph::BuildContext& ctx) {
        return std::unique_ptr<graph::Node>(std::make_unique<BlobNode>(d, ctx));
    });
}

} // namespace aerial_forge::engine
