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
#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "aerial_forge/chanest/bank.hpp"
#include "aerial_forge/chanest/estimators.hpp"
#include "aerial_forge/chanest/reference_cnn.hpp"
#include "aerial_forge/core/error.hpp"
#include "aerial_forge/engine/engine.hpp"
#include "aerial_forge/engine/golden.hpp"
#include "aerial_forge/harness/harness.hpp"
#include "aerial_forge/linklevel/dataset.hpp"
#include "aerial_forge/linklevel/simulator.hpp"
#include "aerial_forge/linklevel/tdl.hpp"

namespace py = pybind11;
using namespace aerial_forge;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<std::complex<float>, py::array::c_style | py::array::forcecast>;

PyObject* g_error = nullptr;

std::vector<float> to_floats(const FloatArray& a)
{
    return {a.data(), a.data() + a.size()};
}

py::array_t<float> from_floats(std::span<const float> v, std::vector<std::size_t> shape)
{
    py::array_t<float> a(std::vector<py::ssize_t>(shape.begin(), shape.end()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

ComplexGrid to_grid(const ComplexArray& a)
{
    if (a.ndim() != 2) raise(ErrorCode::InvalidArgument, "expected a 2-D complex64 array");
    ComplexGrid g(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), g.flat().begin());
    return g;
}

py::array_t<std::complex<float>> from_grid(const ComplexGrid& g)
{
    py::array_t<std::complex<float>> a({static_cast<py::ssize_t>(g.rows()), static_cast<py::ssize_t>(g.cols())});
    std::copy(g.flat().begin(), g.flat().end(), a.mutable_data());
    return a;
}

TensorValue input_tensor(const engine::Engine& e, const FloatArray& x)
{
    const auto& spec = e.input_spec();
    const std::vector<std::size_t> shape(x.shape(), x.shape() + x.ndim());
    if (shape != spec.shape) raise(ErrorCode::SpecMismatch, "input shape does not match " + spec.describe());
    return TensorValue(spec, to_floats(x));
}

py::dict infer_dict(const engine::Engine& e, const FloatArray& x)
{
    const auto in = input_tensor(e, x);
    std::vector<TensorValue> outs;
    {
        py::gil_scoped_release release;
        outs = engine::infer_all(e, in);
    }
    py::dict d;
    for (std::size_t i = 0; i < outs.size(); ++i)
        d[py::str(e.outputs()[i].spec.name)] = from_floats(outs[i].data(), outs[i].spec().shape);
    return d;
}

py::list layers_list(const engine::EngineDefinition& def)
{
    py::list out;
    for (const auto& L : def.layers) {
        py::dict d;
        d["name"] = L.name;
        d["kind"] = std::string(engine::to_string(L.kind));
        d["inputs"] = L.inputs;
        if (L.kind == engine::LayerKind::Conv2d) {
            d["in_ch"] = L.in_ch;
            d["out_ch"] = L.out_ch;
        } else if (L.kind == engine::LayerKind::Dense) {
            d["in_dim"] = L.in_dim;
            d["out_dim"] = L.out_dim;
        }
        d["weight_offset"] = L.weight_offset;
        d["weight_len"] = L.weight_len;
        out.append(d);
    }
    return out;
}

py::list outputs_list(const std::vector<engine::OutputBinding>& outputs)
{
    py::list out;
    for (const auto& o : outputs) out.append(py::make_tuple(o.spec.name, o.layer, o.spec.shape));
    return out;
}

py::dict row_dict(const harness::ResultRow& r)
{
    py::dict d;
    d["kind"] = r.kind;
    d["snr_db"] = r.snr_db;
    d["slots"] = r.slots;
    d["mse_dmrs"] = r.mse_dmrs;
    d["ber"] = r.ber;
    d["sinr_eff_db"] = r.sinr_eff_db;
    d["tput_proxy_bits"] = r.tput_proxy_bits;
    d["wall_time_ms"] = r.wall_time_ms;
    if (r.tput_gain_pct) d["tput_gain_pct"] = *r.tput_gain_pct;
    return d;
}

py::dict bank_dict(const chanest::BankManifest& m)
{
    py::dict d;
    d["version"] = m.version;
    d["snr_grid"] = m.snr_grid;
    d["prb_sizes"] = m.prb_sizes;
    py::list models;
    for (const auto& e : m.models) {
        py::dict x;
        x["snr_bucket"] = e.key.snr_bucket_db;
        x["prb_size"] = e.key.prb_size;
        x["blob"] = e.blob;
        x["golden"] = e.golden;
        models.append(x);
    }
    d["models"] = models;
    return d;
}

chanest::BankManifest bank_from_dict(const py::dict& d)
{
    chanest::BankManifest m;
    if (d.contains("version")) m.version = d["version"].cast<int>();
    m.snr_grid = d["snr_grid"].cast<std::vector<int>>();
    m.prb_sizes = d["prb_sizes"].cast<std::vector<int>>();
    for (auto item : d["models"]) {
        const auto x = item.cast<py::dict>();
        chanest::BankEntry e;
        e.key = {x["snr_bucket"].cast<int>(), x["prb_size"].cast<int>()};
        e.blob = x["blob"].cast<std::string>();
        if (x.contains("golden")) e.golden = x["golden"].cast<std::string>();
        m.models.push_back(std::move(e));
    }
    return m;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "aerial-forge runtime bindings";

    g_error = PyErr_NewException("aerial_forge.AerialForgeError", PyExc_RuntimeError, nullptr);
    m.attr("AerialForgeError") = py::handle(g_error);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyObject* inst = PyObject_CallFunction(g_error, "s", e.what());
            if (!inst) return;
            PyObject* code = PyUnicode_FromString(std::string(to_string(e.code())).c_str());
            PyObject_SetAttrString(inst, "code", code);
            Py_DECREF(code);
            PyErr_SetObject(g_error, inst);
            Py_DECREF(inst);
        }
    });

    // engine blobs
    py::class_<engine::EngineDefinition>(m, "EngineDefinition")
        .def_property_readonly("input_shape", [](const engine::EngineDefinition& d) { return d.input.shape; })
        .def_property_readonly("input_name", [](const engine::EngineDefinition& d) { return d.input.name; })
        .def_property_readonly("layers", &layers_list)
        .def_property_readonly("outputs", [](const engine::EngineDefinition& d) { return outputs_list(d.outputs); })
        .def_property_readonly("meta", [](const engine::EngineDefinition& d) {
            return py::make_tuple(d.meta.snr_bucket_db, d.meta.prb_size);
        })
        .def_property(
            "weights", [](const engine::EngineDefinition& d) { return from_floats(d.weights, {d.weights.size()}); },
            [](engine::EngineDefinition& d, const FloatArray& w) {
                if (static_cast<std::size_t>(w.size()) != d.weights.size())
                    raise(ErrorCode::InvalidArgument, "weight count must stay " + std::to_string(d.weights.size()));
                d.weights = to_floats(w);
            })
        .def("set_meta", [](engine::EngineDefinition& d, int snr_bucket_db, int prb_size) {
            d.meta = {snr_bucket_db, prb_size};
        });

    py::class_<engine::EngineBuilder>(m, "EngineBuilder")
        .def(py::init([](const std::string& name, std::vector<std::size_t> shape) {
                 return engine::EngineBuilder(TensorSpec{name, DType::Float32, std::move(shape)});
             }),
             py::arg("input_name"), py::arg("shape"))
        .def(
            "conv2d",
            [](engine::EngineBuilder& b, std::string name, std::string input, std::uint32_t in_ch,
               std::uint32_t out_ch, const FloatArray& kernel, const FloatArray& bias) -> engine::EngineBuilder& {
                return b.conv2d(std::move(name), std::move(input), in_ch, out_ch, to_floats(kernel), to_floats(bias));
            },
            py::return_value_policy::reference_internal)
        .def(
            "dense",
            [](engine::EngineBuilder& b, std::string name, std::string input, std::uint32_t in_dim,
               std::uint32_t out_dim, const FloatArray& matrix, const FloatArray& bias) -> engine::EngineBuilder& {
                return b.dense(std::move(name), std::move(input), in_dim, out_dim, to_floats(matrix), to_floats(bias));
            },
            py::return_value_policy::reference_internal)
        .def("relu", &engine::EngineBuilder::relu, py::return_value_policy::reference_internal)
        .def("add", &engine::EngineBuilder::add, py::return_value_policy::reference_internal)
        .def("output", &engine::EngineBuilder::output, py::return_value_policy::reference_internal)
        .def(
            "meta",
            [](engine::EngineBuilder& b, int snr_bucket_db, int prb_size) -> engine::EngineBuilder& {
                return b.meta({snr_bucket_db, prb_size});
            },
            py::return_value_policy::reference_internal)
        .def("build", &engine::EngineBuilder::build);

    py::class_<engine::Engine>(m, "Engine")
        .def_property_readonly("input_shape", [](const engine::Engine& e) { return e.input_spec().shape; })
        .def_property_readonly("outputs", [](const engine::Engine& e) { return outputs_list(e.outputs()); })
        .def_property_readonly("parameter_count", &engine::Engine::parameter_count)
        .def_property_readonly("meta", [](const engine::Engine& e) {
            return py::make_tuple(e.meta().snr_bucket_db, e.meta().prb_size);
        })
        .def_property_readonly("definition", &engine::Engine::definition)
        .def("infer", &infer_dict, py::arg("x"), "Runs every output; returns {name: float32 array}.");

    m.def("serialize_engine", [](const engine::EngineDefinition& d) {
        const auto b = engine::serialize_engine(d);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
    });
    m.def("load_engine", [](const py::bytes& data) {
        const std::string s = data;
        return engine::load_engine(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    });
    m.def("load_engine_file", &engine::load_engine_file);
    m.def("make_engine", &engine::make_engine);

    // golden vectors
    py::class_<engine::GoldenVectors>(m, "GoldenVectors")
        .def(py::init([](const py::list& vectors) {
                 engine::GoldenVectors g;
                 for (auto item : vectors) {
                     const auto t = item.cast<py::tuple>();
                     g.vectors.push_back({0, t[0].cast<std::uint32_t>(), to_floats(t[1].cast<FloatArray>()),
                                          to_floats(t[2].cast<FloatArray>())});
                 }
                 return g;
             }),
             py::arg("vectors") = py::list(), "vectors: [(output_index, input, expected), ...]")
        .def("__len__", [](const engine::GoldenVectors& g) { return g.vectors.size(); })
        .def_property_readonly("vectors", [](const engine::GoldenVectors& g) {
            py::list out;
            for (const auto& v : g.vectors)
                out.append(py::make_tuple(v.output_spec_id, from_floats(v.input, {v.input.size()}),
                                          from_floats(v.expected, {v.expected.size()})));
            return out;
        })
        .def("to_bytes", [](const engine::GoldenVectors& g) {
            const auto b = engine::serialize_golden(g);
            return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
        });
    m.def("parse_golden", [](const py::bytes& data) {
        const std::string s = data;
        return engine::parse_golden(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    });
    m.def("load_golden_file", &engine::load_golden_file);
    m.def("make_golden", &chanest::make_golden, py::arg("engine"), py::arg("count") = 16, py::arg("seed") = 0);
    m.def("verify_golden", [](const engine::Engine& e, const engine::GoldenVectors& g) {
        const auto r = engine::verify_golden(e, g);
        py::dict d;
        d["passed"] = r.passed;
        d["vacuous"] = r.vacuous;
        d["failures"] = r.failures();
        d["report"] = r.str();
        return d;
    });

    // reference CNN and bank
    m.def(
        "reference_cnn",
        [](std::size_t time_symbols, std::size_t pilots, const std::string& init, std::uint64_t seed, int snr_bucket_db,
           int prb_size) {
            return chanest::reference_cnn(time_symbols, pilots, chanest::reference_init_from_string(init), seed,
                                          {snr_bucket_db, prb_size});
        },
        py::arg("time_symbols"), py::arg("pilots"), py::arg("init") = "identity", py::arg("seed") = 0,
        py::arg("snr_bucket_db") = 0, py::arg("prb_size") = 0);
    m.def(
        "write_reference_bank",
        [](const std::filesystem::path& dir, std::vector<int> snr_grid, std::vector<int> prb_sizes,
           std::size_t time_symbols, const std::string& init, std::uint64_t seed, std::size_t golden_count) {
            chanest::write_reference_bank(dir, snr_grid, prb_sizes, time_symbols, chanest::reference_init_from_string(init),
                                          seed, golden_count);
        },
        py::arg("dir"), py::arg("snr_grid"), py::arg("prb_sizes"), py::arg("time_symbols") = 1,
        py::arg("init") = "identity", py::arg("seed") = 0, py::arg("golden_count") = 16);
    m.def("parse_bank_manifest", [](const std::string& text) { return bank_dict(chanest::parse_bank_manifest(text)); });
    m.def("format_bank_manifest", [](const py::dict& d) { return chanest::format_bank_manifest(bank_from_dict(d)); });
    m.def("decompose_prbs", &chanest::decompose_prbs, py::arg("n"), py::arg("supported"));
    m.def("default_snr_grid", &chanest::default_snr_grid);
    m.def("default_prb_sizes", &chanest::default_prb_sizes);

    py::class_<chanest::ModelBank, std::shared_ptr<chanest::ModelBank>>(m, "ModelBank")
        .def_property_readonly("snr_grid", &chanest::ModelBank::snr_grid)
        .def_property_readonly("prb_sizes", &chanest::ModelBank::prb_sizes)
        .def_property_readonly("time_symbols", &chanest::ModelBank::time_symbols)
        .def("__len__", &chanest::ModelBank::size)
        .def("select_model", [](const chanest::ModelBank& b, double snr_db, int prb) {
            const auto k = chanest::select_model(snr_db, prb, b);
            return py::make_tuple(k.snr_bucket_db, k.prb_size);
        })
        .def("cnn_estimate", [](const chanest::ModelBank& b, const ComplexArray& h_ls, double noise_var) {
            const chanest::LsEstimate ls{to_grid(h_ls), noise_var};
            chanest::CnnResult r;
            {
                py::gil_scoped_release release;
                r = chanest::cnn_estimate(ls, b);
            }
            py::dict d;
            d["h"] = from_grid(r.h);
            d["snr_est_db"] = r.snr_est_db;
            d["snr_bucket_db"] = r.snr_bucket_db;
            d["blocks"] = r.blocks;
            return d;
        });
    m.def(
        "load_bank",
        [](const std::filesystem::path& dir, bool verify) {
            return std::make_shared<chanest::ModelBank>(chanest::load_bank(dir, verify));
        },
        py::arg("dir"), py::arg("verify") = true);

    // estimators
    m.def(
        "ls_estimate",
        [](const ComplexArray& rx_pilots, const ComplexArray& pilots, std::vector<std::size_t> dmrs_symbols) {
            chanest::DmrsObservation obs;
            obs.rx_pilots = to_grid(rx_pilots);
            obs.pilot_symbols = to_grid(pilots);
            obs.prb_count = obs.rx_pilots.cols() / chanest::kPilotsPerPrb;
            obs.dmrs_symbols = dmrs_symbols.empty() ? std::vector<std::size_t>(obs.rx_pilots.rows(), 2) : dmrs_symbols;
            const auto ls = chanest::ls_estimate(obs);
            return py::make_tuple(from_grid(ls.h_ls), ls.noise_var);
        },
        py::arg("rx_pilots"), py::arg("pilots"), py::arg("dmrs_symbols") = std::vector<std::size_t>{});
    m.def("estimate_noise_var", [](const ComplexArray& h) { return chanest::estimate_noise_var(to_grid(h)); });
    m.def(
        "mmse_estimate",
        [](const ComplexArray& h_ls, double noise_var, const std::string& profile, double delay_spread_s,
           double scs_hz) {
            const chanest::LsEstimate ls{to_grid(h_ls), noise_var};
            const auto pdp = chanest::PdpModel::from_tdl(linklevel::tdl_profile(profile, delay_spread_s));
            return from_grid(chanest::mmse_estimate(ls, pdp, scs_hz));
        },
        py::arg("h_ls"), py::arg("noise_var"), py::arg("profile") = "TDL-C", py::arg("delay_spread_s") = 300e-9,
        py::arg("scs_hz") = 30e3);
    m.def("tdl_max_excess_delay", [](const std::string& profile, double delay_spread_s) {
        return linklevel::tdl_profile(profile, delay_spread_s).max_excess_delay_s();
    });

    // simulator and datasets
    m.def(
        "generate_slot",
        [](std::size_t n_prb, double snr_db, std::uint64_t seed, std::uint64_t slot_index, const std::string& profile,
           double delay_spread_s, double speed_mps, std::vector<std::size_t> dmrs_symbols, int qam_order) {
            linklevel::GridConfig grid;
            grid.n_prb = n_prb;
            grid.dmrs_symbols = std::move(dmrs_symbols);
            grid.qam_order = qam_order;
            linklevel::ChannelConfig ch;
            ch.profile = profile;
            ch.delay_spread_s = delay_spread_s;
            ch.speed_mps = speed_mps;
            const auto s = linklevel::generate_slot(grid, ch, snr_db, seed, slot_index);
            py::dict d;
            d["tx"] = from_grid(s.tx);
            d["rx"] = from_grid(s.rx);
            d["h"] = from_grid(s.h);
            d["pilots"] = from_grid(s.pilots);
            d["rx_pilots"] = from_grid(s.rx_pilots(grid));
            d["h_dmrs"] = from_grid(s.h_dmrs(grid));
            d["noise_var"] = s.noise_var;
            return d;
        },
        py::arg("n_prb"), py::arg("snr_db"), py::arg("seed"), py::arg("slot_index") = 0, py::arg("profile") = "TDL-C",
        py::arg("delay_spread_s") = 300e-9, py::arg("speed_mps") = 2.235,
        py::arg("dmrs_symbols") = std::vector<std::size_t>{2}, py::arg("qam_order") = 4);

    m.def(
        "generate_dataset",
        [](const std::filesystem::path& out, std::uint64_t count, std::uint64_t seed, std::vector<int> prb_sizes,
           std::vector<double> snr_db, std::vector<std::string> profiles, std::vector<std::size_t> dmrs_symbols) {
            linklevel::DatasetConfig c;
            c.count = count;
            c.seed = seed;
            if (!prb_sizes.empty()) c.prb_sizes = std::move(prb_sizes);
            if (!snr_db.empty()) c.snr_db = std::move(snr_db);
            if (!profiles.empty()) c.profiles = std::move(profiles);
            if (!dmrs_symbols.empty()) c.dmrs_symbols = std::move(dmrs_symbols);
            py::gil_scoped_release release;
            const auto s = linklevel::generate_dataset(c, out);
            return std::make_pair(s.count, s.crc);
        },
        py::arg("out"), py::arg("count"), py::arg("seed") = 0, py::arg("prb_sizes") = std::vector<int>{},
        py::arg("snr_db") = std::vector<double>{}, py::arg("profiles") = std::vector<std::string>{},
        py::arg("dmrs_symbols") = std::vector<std::size_t>{}, "Returns (count, crc32).");
    m.def("read_dataset", [](const std::filesystem::path& path) {
        const auto records = linklevel::read_dataset(path);
        py::list out;
        for (const auto& r : records) {
            py::dict d;
            d["prb_size"] = r.prb_size;
            d["true_snr_db"] = r.true_snr_db;
            d["ls_input"] = from_floats(r.ls_input, {2, r.T, r.F});
            d["target"] = from_floats(r.target, {2, r.T, r.F});
            out.append(d);
        }
        return out;
    });

    // harness
    m.def(
        "run_sweep",
        [](const std::filesystem::path& manifest, std::size_t slots, std::uint64_t seed, std::vector<double> snrs,
           std::vector<std::string> kinds, std::optional<std::size_t> prb, std::optional<std::string> model_dir) {
            harness::RunConfig c;
            c.manifest = manifest;
            c.slots = slots;
            c.seed = seed;
            c.snrs = std::move(snrs);
            c.kinds = std::move(kinds);
            c.timing = false;
            c.prb = prb;
            c.model_dir = std::move(model_dir);
            std::vector<harness::ResultRow> rows;
            {
                py::gil_scoped_release release;
                rows = harness::run_sweep(c);
            }
            py::list out;
            for (const auto& r : rows) out.append(row_dict(r));
            return out;
        },
        py::arg("manifest"), py::arg("slots") = 100, py::arg("seed") = 0, py::arg("snrs") = std::vector<double>{0.0},
        py::arg("kinds") = std::vector<std::string>{}, py::arg("prb") = py::none(), py::arg("model_dir") = py::none());
    m.def("parse_snr_spec", &harness::parse_snr_spec);
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = harness::run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the aerial-forge command line in process; returns (exit_code, stdout, stderr).");
}
