# Copyright 2026 The qsearch Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the qsearch core: circuits, cutting estimates and search runs."""

import json
from pathlib import Path

from . import _qsearch
from ._qsearch import (
    ConfigError,
    DataError,
    IoError,
    NumericError,
    StructuralError,
    entangling_pairs,
    execution_overhead,
    pearson,
    spearman,
)

__all__ = [
    "ConfigError",
    "DataError",
    "IoError",
    "NumericError",
    "StructuralError",
    "adjoint_gradient",
    "cut_plan",
    "entangling_pairs",
    "estimate_f3",
    "execution_overhead",
    "expectations",
    "export_pareto",
    "gate_cost",
    "n_params",
    "pearson",
    "retrain",
    "search",
    "spearman",
]


def _g(genome):
    return genome if isinstance(genome, str) else json.dumps(genome)


def _overrides(options):
    return "\n".join(f"{k} = {v}" for k, v in options.items())


def n_params(genome):
    return _qsearch.n_params(_g(genome))


def gate_cost(genome):
    """Per-sample gate cost of the circuit a genome describes."""
    return _qsearch.gate_cost(_g(genome))


def estimate_f3(genome, q_target):
    return _qsearch.estimate_f3(_g(genome), q_target)


def cut_plan(genome, q_target):
    return json.loads(_qsearch.cut_plan(_g(genome), q_target))


def expectations(genome, params, inputs):
    return _qsearch.expectations(_g(genome), list(params), list(inputs))


def adjoint_gradient(genome, params, inputs, upstream):
    """Returns (d/dparams, d/dinputs) of sum(upstream * <Z>)."""
    return _qsearch.adjoint_gradient(_g(genome), list(params), list(inputs), list(upstream))


def search(dataset="iris", **options):
    """Runs a search; options use the config-file keys. Returns the output directory."""
    return Path(_qsearch.search(dataset, _overrides(options)))


def retrain(genome, epochs, dataset="iris", **options):
    return json.loads(_qsearch.retrain(_g(genome), epochs, dataset, _overrides(options)))


def export_pareto(results_dir):
    return _qsearch.export_pareto(str(results_dir))
