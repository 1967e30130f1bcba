// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The detid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Structured values cross the boundary as dicts, converted
// through their JSON form.

#include "detid/bounds.hpp"
#include "detid/cli.hpp"
#include "detid/codebook.hpp"
#include "detid/fading.hpp"
#include "detid/harness.hpp"
#include "detid/packing.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object to_py(const json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

json from_py(const py::handle& obj)
{
    return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

detid::BigIndex to_index(const py::int_& i)
{
    return detid::BigIndex(py::str(i).cast<std::string>());
}

py::int_ to_int(const detid::BigIndex& i)
{
    return py::int_(py::reinterpret_steal<py::object>(PyLong_FromString(i.str().c_str(), nullptr, 10)));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "detid core: deterministic identification codes over fading channels";

    py::register_exception<detid::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<detid::InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);

    m.def(
        "plan_params",
        [](std::uint64_t n, double a, double A, double eps1, double eps2, std::optional<std::uint64_t> q1,
           std::uint64_t field_seed) {
            detid::PlanOptions opt;
            opt.q1 = q1;
            opt.field_seed = field_seed;
            return to_py(detid::params_to_json(detid::plan_params(n, a, A, eps1, eps2, opt)));
        },
        py::arg("n"), py::arg("a") = 0.05, py::arg("A") = 1.0, py::arg("eps1") = 0.1, py::arg("eps2") = 0.1,
        py::arg("q1") = py::none(), py::arg("field_seed") = 0);

    py::class_<detid::ConcatCodebook>(m, "ConcatCodebook")
        .def(py::init([](const py::dict& params) {
                 return detid::ConcatCodebook(detid::params_from_json(from_py(params)));
             }),
             py::arg("params"))
        .def_property_readonly("n", &detid::ConcatCodebook::blocklength)
        .def_property_readonly("size", [](const detid::ConcatCodebook& cb) { return to_int(cb.size()); })
        .def_property_readonly("params",
                               [](const detid::ConcatCodebook& cb) { return to_py(detid::params_to_json(cb.params())); })
        .def(
            "encode",
            [](const detid::ConcatCodebook& cb, const py::int_& index) { return cb.encode_identity(to_index(index)); },
            py::arg("index"))
        .def(
            "symbols",
            [](const detid::ConcatCodebook& cb, const py::int_& index) {
                return cb.encode_symbols(cb.message_from_index(to_index(index)));
            },
            py::arg("index"));

    m.def("di_rate", &detid::di_rate, py::arg("log2_M"), py::arg("n"));
    m.def("sphere_packing_rate", &detid::sphere_packing_rate, py::arg("n"), py::arg("A"), py::arg("d_min"));
    m.def("min_distance_lower_bound", &detid::min_distance_lower_bound, py::arg("lambda_sum"), py::arg("sigma"));
    m.def(
        "fading_moments",
        [](const py::dict& law) {
            const auto mo = detid::moments(detid::fading_from_json(from_py(law)));
            py::dict d;
            d["mean"] = mo.mean;
            d["m2"] = mo.m2;
            d["m3"] = mo.m3;
            d["m4"] = mo.m4;
            d["var"] = mo.var;
            d["mu3"] = mo.mu3;
            d["mu4"] = mo.mu4;
            return d;
        },
        py::arg("law"));

    m.def(
        "generate_packing",
        [](const py::dict& spec) {
            const auto [s, kind] = detid::packing_spec_from_json(from_py(spec));
            py::gil_scoped_release release;
            return detid::generate_expurgated(s, kind).codewords;
        },
        py::arg("spec"));

    m.def(
        "run_experiment",
        [](const py::dict& config, bool include_rows) {
            const auto cfg = detid::experiment_config_from_json(from_py(config));
            json out;
            {
                py::gil_scoped_release release;
                out = detid::report_to_json(detid::run_experiment(cfg), include_rows);
            }
            return to_py(out);
        },
        py::arg("config"), py::arg("include_rows") = false);

    m.def(
        "moment_validation",
        [](std::size_t n, std::size_t draws, double noise_var, double z, std::uint64_t seed, unsigned workers,
           bool skew_test) {
            detid::MomentValidationConfig cfg;
            cfg.n = n;
            cfg.draws = draws;
            cfg.noise_var = noise_var;
            cfg.z = z;
            cfg.seed = seed;
            cfg.workers = workers;
            cfg.skew_test = skew_test;
            json out;
            {
                py::gil_scoped_release release;
                out = detid::moment_report_to_json(detid::moment_validation(cfg));
            }
            return to_py(out);
        },
        py::arg("n") = 8, py::arg("draws") = 1000000, py::arg("noise_var") = 0.5, py::arg("z") = 4.0,
        py::arg("seed") = 0, py::arg("workers") = 1, py::arg("skew_test") = true);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"detid"};
            for (const auto& a : args)
                argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = detid::cli::run(int(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
