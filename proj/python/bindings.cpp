// Copyright 2026 The qsearch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "qsearch/cutting.hpp"
#include "qsearch/errors.hpp"
#include "qsearch/hqnn.hpp"
#include "qsearch/pipeline.hpp"
#include "qsearch/qsim.hpp"
#include "qsearch/stats.hpp"

namespace py = pybind11;
namespace pl = qsearch::pipeline;
using qsearch::Genome;

namespace {

// Genomes, configs and reports cross the boundary as JSON text; the Python
// wrapper turns them into dicts.
Genome genome_of(const std::string& text) { return pl::genome_from_json(pl::json::parse(text)); }

pl::SearchConfig config_of(const std::string& dataset, const std::string& overrides) {
  auto base = pl::SearchConfig::defaults_for(pl::parse_dataset(dataset));
  return pl::parse_config_text(overrides, base);
}

}  // namespace

PYBIND11_MODULE(_qsearch, m) {
  m.doc() = "Native core of qsearch.";

  py::register_exception<qsearch::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<qsearch::StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<qsearch::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<qsearch::IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<qsearch::NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("entangling_pairs", [](int n, int range, const std::string& mode) {
    return qsearch::hqnn::entangling_pairs(n, range, qsearch::parse_cnot_mode(mode));
  });
  m.def("gate_cost", [](const std::string& g) { return qsearch::hqnn::gate_cost_per_sample(qsearch::hqnn::build_circuit(genome_of(g))); });
  m.def("estimate_f3", [](const std::string& g, int q) { return qsearch::cutting::estimate_f3(genome_of(g), q); });
  m.def("cut_plan", [](const std::string& g, int q) { return pl::cmd_cut_plan(genome_of(g), q).dump(); });
  m.def("execution_overhead", &qsearch::cutting::execution_overhead);

  m.def("expectations", [](const std::string& g, const std::vector<double>& params, const std::vector<double>& input) {
    return qsearch::qsim::expectations(qsearch::hqnn::build_circuit(genome_of(g)), params, input);
  });
  m.def("adjoint_gradient", [](const std::string& g, const std::vector<double>& params,
                               const std::vector<double>& input, const std::vector<double>& upstream) {
    auto r = qsearch::qsim::grad_adjoint(qsearch::hqnn::build_circuit(genome_of(g)), params, input, upstream);
    return py::make_tuple(r.params, r.input);
  });
  m.def("n_params", [](const std::string& g) { return qsearch::hqnn::build_circuit(genome_of(g)).n_params; });

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return qsearch::stats::pearson(x, y); });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return qsearch::stats::spearman(x, y); });

  m.def("search", [](const std::string& dataset, const std::string& overrides) {
    const auto c = config_of(dataset, overrides);
    py::gil_scoped_release release;
    return pl::cmd_search(c).output_dir.string();
  });
  m.def("retrain", [](const std::string& g, int epochs, const std::string& dataset, const std::string& overrides) {
    const auto c = config_of(dataset, overrides);
    const auto genome = genome_of(g);
    py::gil_scoped_release release;
    return pl::cmd_retrain(genome, epochs, c).to_json().dump();
  });
  m.def("export_pareto", [](const std::string& dir) { return pl::cmd_export_pareto(dir); });
}
