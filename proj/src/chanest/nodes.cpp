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
#include "aerial_forge/chanest/nodes.hpp"

#include <memory>
#include <numeric>
#include <sstream>

#include "aerial_forge/chanest/bank.hpp"
#include "aerial_forge/chanest/estimators.hpp"
#include "aerial_forge/core/error.hpp"
#include "aerial_forge/core/grid_tensor.hpp"
#include "aerial_forge/linklevel/tdl.hpp"

namespace aerial_forge::chanest {

using graph::BuildContext;
using graph::NodeDescriptor;
using graph::TensorMap;

std::vector<std::size_t> parse_symbol_list(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) raise(ErrorCode::ConfigError, "empty entry in symbol list '" + text + "'");
        const std::string tok = item.substr(b, e - b + 1);
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size() || tok[0] == '-') raise(ErrorCode::ConfigError, "bad symbol index '" + tok + "'");
        out.push_back(v);
    }
    require(!out.empty(), ErrorCode::ConfigError, "symbol list is empty");
    return out;
}

namespace {

std::string symbols_param(const graph::Params& p)
{
    // A bare YAML integer (dmrs_symbols: 2) arrives as an int.
    if (p.has("dmrs_symbols")) {
        const auto& v = p.values().at("dmrs_symbols");
        if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
        return p.get_string("dmrs_symbols");
    }
    return "2";
}

// Shared port checks and plumbing for the estimator kinds.
class EstimatorNode : public graph::Node {
public:
    explicit EstimatorNode(const NodeDescriptor& d) : Node(d)
    {
        const auto& rx = graph::expect_input(d, ports::rx_pilots, DType::Complex64);
        require(rx.shape.size() == 2 && rx.shape[1] % kPilotsPerPrb == 0 && rx.shape[1] > 0, ErrorCode::PortMismatch,
                "node '" + d.name + "' rx_pilots must be (T_dmrs, 6 * n_prb), got " + rx.describe());
        T_ = rx.shape[0];
        F_ = rx.shape[1];
        graph::expect_shape(d, graph::expect_input(d, ports::pilots, DType::Complex64), rx.shape);
        if (const auto* g = d.find_input(ports::genie_h)) {
            graph::expect_input(d, ports::genie_h, DType::Complex64);
            graph::expect_shape(d, *g, rx.shape);
        }
        if (const auto* g = d.find_input(ports::genie_noise_var)) {
            graph::expect_input(d, ports::genie_noise_var, DType::Float32);
            graph::expect_shape(d, *g, {1});
        }
        graph::expect_shape(d, graph::expect_output(d, ports::h_dmrs, DType::Complex64), rx.shape);
        graph::expect_shape(d, graph::expect_output(d, ports::noise_var, DType::Float32), {1});

        symbols_ = parse_symbol_list(symbols_param(d.params));
        if (symbols_.size() != T_) {
            symbols_.resize(T_);
            std::iota(symbols_.begin(), symbols_.end(), std::size_t{0});
        }
    }

    TensorMap run(const TensorMap& in) const override
    {
        DmrsObservation obs;
        obs.rx_pilots = grid_from_tensor(in.at(ports::rx_pilots));
        obs.pilot_symbols = grid_from_tensor(in.at(ports::pilots));
        obs.dmrs_symbols = symbols_;
        obs.prb_count = F_ / kPilotsPerPrb;
        double noise_var = 0.0;
        auto h = estimate(obs, in, noise_var);
        TensorMap out;
        out.emplace(ports::h_dmrs, tensor_from_grid(ports::h_dmrs, h));
        out.emplace(ports::noise_var, scalar_tensor(ports::noise_var, static_cast<float>(noise_var)));
        return out;
    }

protected:
    virtual ComplexGrid estimate(const DmrsObservation& obs, const TensorMap& in, double& noise_var) const = 0;

    void require_genie(const char* port) const
    {
        require(descriptor().find_input(port) != nullptr, ErrorCode::PortMismatch,
                "node '" + name() + "' (" + descriptor().kind + ") needs input port '" + port + "'");
    }

    std::size_t T_ = 0, F_ = 0;
    std::vector<std::size_t> symbols_;
};

class LsNode final : public EstimatorNode {
public:
    using EstimatorNode::EstimatorNode;

protected:
    ComplexGrid estimate(const DmrsObservation& obs, const TensorMap&, double& noise_var) const override
    {
        auto ls = ls_estimate(obs);
        noise_var = ls.noise_var;
        return std::move(ls.h_ls);
    }
};

class MmseNode final : public EstimatorNode {
public:
    MmseNode(const NodeDescriptor& d) : EstimatorNode(d)
    {
        const auto& p = d.params;
        const auto kind = p.get_string("pdp", "uniform");
        const double scs = p.get_double("scs_hz", 30e3);
        Eigen::MatrixXcd R;
        if (kind == "uniform") {
            R = build_uniform_covariance(p.get_double("max_delay_s", 1.2e-6), scs, kPilotSpacing, F_);
        } else if (kind == "tdl") {
            auto pdp = PdpModel::from_tdl(
                linklevel::tdl_profile(p.get_string("tdl_profile", "TDL-C"), p.get_double("delay_spread_s", 300e-9)));
            pdp.validate();
            R = build_freq_covariance(pdp, scs, kPilotSpacing, F_);
        } else {
            raise(ErrorCode::ConfigError, "node '" + d.name + "': pdp must be 'uniform' or 'tdl'");
        }
        const auto nv = p.get_string("noise_var", "estimate");
        require(nv == "estimate" || nv == "genie", ErrorCode::ConfigError,
                "node '" + d.name + "': noise_var must be 'estimate' or 'genie'");
        genie_noise_ = nv == "genie";
        if (genie_noise_) require_genie(ports::genie_noise_var);
        const auto solver = p.get_string("solver", "cholesky");
        require(solver == "cholesky" || solver == "eigh", ErrorCode::ConfigError,
                "node '" + d.name + "': solver must be 'cholesky' or 'eigh'");
        filter_ = std::make_shared<const MmseFilter>(
            std::move(R), solver == "eigh" ? MmseFilter::Solver::Eigh : MmseFilter::Solver::Cholesky);
    }

protected:
    ComplexGrid estimate(const DmrsObservation& obs, const TensorMap& in, double& noise_var) const override
    {
        auto ls = ls_estimate(obs);
        if (genie_noise_) ls.noise_var = in.at(ports::genie_noise_var).data()[0];
        noise_var = ls.noise_var;
        return filter_->apply(ls);
    }

private:
    std::shared_ptr<const MmseFilter> filter_;
    bool genie_noise_ = false;
};

class CnnNode final : public EstimatorNode {
public:
    CnnNode(const NodeDescriptor& d, const BuildContext& ctx) : EstimatorNode(d)
    {
        std::string dir = d.params.get_string("model_dir", "");
        if (dir.empty() && ctx.estimator) dir = ctx.estimator->model_dir;
        require(!dir.empty(), ErrorCode::ConfigError, "node '" + d.name + "': no model_dir for the CNN bank");
        bank_ = std::make_shared<const ModelBank>(load_bank(ctx.resolve(dir), d.params.get_bool("verify_golden", true)));
        if (bank_->time_symbols() != T_)
            raise(ErrorCode::PortMismatch, "node '" + d.name + "': bank engines take " +
                                               std::to_string(bank_->time_symbols()) + " DMRS symbols, port has " +
                                               std::to_string(T_));
        // Fails early (UnsupportedPrbSize) when the allocation is uncoverable.
        (void)decompose_prbs(static_cast<int>(F_ / kPilotsPerPrb), bank_->prb_sizes());
    }

protected:
    ComplexGrid estimate(const DmrsObservation& obs, const TensorMap&, double& noise_var) const override
    {
        const auto ls = ls_estimate(obs);
        noise_var = ls.noise_var;
        return cnn_estimate(ls, *bank_).h;
    }

private:
    std::shared_ptr<const ModelBank> bank_;
};

class PerfectNode final : public EstimatorNode {
public:
    PerfectNode(const NodeDescriptor& d) : EstimatorNode(d)
    {
        require_genie(ports::genie_h);
        require_genie(ports::genie_noise_var);
    }

protected:
    ComplexGrid estimate(const DmrsObservation&, const TensorMap& in, double& noise_var) const override
    {
        noise_var = in.at(ports::genie_noise_var).data()[0];
        return grid_from_tensor(in.at(ports::genie_h));
    }
};

class InterpolateNode final : public graph::Node {
public:
    explicit InterpolateNode(const NodeDescriptor& d) : Node(d)
    {
        const auto& in = graph::expect_input(d, ports::h_dmrs, DType::Complex64);
        require(in.shape.size() == 2 && in.shape[1] % kPilotsPerPrb == 0, ErrorCode::PortMismatch,
                "node '" + d.name + "' h_dmrs must be (T_dmrs, 6 * n_prb)");
        prb_ = in.shape[1] / kPilotsPerPrb;
        symbols_ = parse_symbol_list(symbols_param(d.params));
        n_symbols_ = static_cast<std::size_t>(d.params.get_int("n_symbols", 14));
        require(symbols_.size() == in.shape[0], ErrorCode::PortMismatch,
                "node '" + d.name + "': dmrs_symbols lists " + std::to_string(symbols_.size()) +
                    " symbols but h_dmrs has " + std::to_string(in.shape[0]) + " rows");
        for (auto s : symbols_)
            require(s < n_symbols_, ErrorCode::ConfigError, "node '" + d.name + "': DMRS symbol outside the slot");
        graph::expect_shape(d, graph::expect_output(d, ports::h_grid, DType::Complex64),
                            {n_symbols_, kSubcarriersPerPrb * prb_});
    }

    TensorMap run(const TensorMap& in) const override
    {
        const auto g = interpolate_grid(grid_from_tensor(in.at(ports::h_dmrs)), symbols_, n_symbols_, prb_);
        TensorMap out;
        out.emplace(ports::h_grid, tensor_from_grid(ports::h_grid, g));
        return out;
    }

private:
    std::size_t prb_ = 0, n_symbols_ = 14;
    std::vector<std::size_t> symbols_;
};

template <typename T>
graph::NodeBuilder simple()
{
    return [](const NodeDescriptor& d, const BuildContext&) -> std::unique_ptr<graph::Node> {
        return std::make_unique<T>(d);
    };
}

} // namespace

void register_chanest_nodes(graph::FactoryRegistry& r)
{
    r.register_factory("chanest.ls", simple<LsNode>());
    r.register_factory("chanest.mmse", simple<MmseNode>());
    r.register_factory("chanest.perfect", simple<PerfectNode>());
    r.register_factory("chanest.cnn", [](const NodeDescriptor& d, const BuildContext& ctx) -> std::unique_ptr<graph::Node> {
        return std::make_unique<CnnNode>(d, ctx);
    });
    r.register_factory("chanest.interpolate", simple<InterpolateNode>());
}

} // namespace aerial_forge::chanest
