# Copyright 2026 The wcoj Authors
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
"""Python bindings for the wcoj join engines."""

import json

from ._core import WcojError, standard_query
from . import _core

__all__ = ["WcojError", "standard_query", "run", "count", "run_delta"]


def run(engine, query, edges, workers=1, batch=64, seed=0):
    """Evaluate `query` over `edges`.

    engine is one of "serial", "oracle", "static", "static-balanced".
    Returns (tuples, metrics) where tuples is a list of (values, weight).
    """
    tuples, metrics = _core.run(engine, query, list(edges), workers, batch, seed)
    return [(tuple(t), w) for t, w in tuples], json.loads(metrics)


def count(engine, query, edges, **kwargs):
    tuples, _ = run(engine, query, edges, **kwargs)
    return sum(w for _, w in tuples)


def run_delta(query, base, updates, workers=1, batch=64, seed=0):
    """Maintain `query` under updates given as (sign, u, v, t)."""
    deltas, metrics = _core.run_delta(query, list(base), list(updates), workers, batch, seed)
    return [(tuple(t), w, ts) for t, w, ts in deltas], json.loads(metrics)
