# Copyright 2026 The tempocorr Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Temporal correlations: simulation, macrorealism certificates and bounds.

Documents (models, behaviors, expressions, machines) are plain dicts in the
JSON formats read by the command-line tool.
"""

import json

from . import _core
from ._core import (AotViolationError, Error, InputError, InvariantError, MissingDataError, SizeGuardError,
                    SolverError, StructuralError)

__all__ = [
    "AotViolationError", "Error", "InputError", "InvariantError", "MissingDataError", "SizeGuardError",
    "SolverError", "StructuralError", "lgi", "lgi_stationary", "eq31", "load", "simulate", "macrorealism", "nsit",
    "evaluate", "classical_bound", "projective_bound", "export_sdp", "max_expression_classical",
    "max_expression_quantum", "deterministic_complexity", "clock", "steering_check",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def _decode_machine(result):
    result["machine"] = json.loads(result["machine"])
    return result


def load(path):
    with open(path) as f:
        return json.load(f)


def lgi(n):
    return json.loads(_core.lgi(n))


def lgi_stationary(branch=-1):
    return json.loads(_core.lgi_stationary(branch))


def eq31():
    return json.loads(_core.eq31())


def simulate(model, schedule):
    """Behavior of a model over a list of setting sequences."""
    return json.loads(_core.simulate(_text(model), [list(s) for s in schedule]))


def macrorealism(behavior):
    r = _core.macrorealism(_text(behavior))
    if "certificate" in r:
        r["certificate"] = json.loads(r["certificate"])
    return r


def nsit(behavior, tol=1e-9):
    return _core.nsit(_text(behavior), tol)


def evaluate(expression, behavior):
    return _core.evaluate(_text(expression), _text(behavior))


def classical_bound(expression, model="macrorealist"):
    return _core.classical_bound(_text(expression), model)


def projective_bound(expression, level=None):
    return _core.projective_bound(_text(expression), level)


def export_sdp(expression, level=None):
    """SDPA text of the moment SDP with the (offset, sign) mapping its optimum to the expression value."""
    return _core.export_sdp(_text(expression), level)


def max_expression_classical(expression, d, restarts=50, seed=1):
    return _decode_machine(_core.max_expression_classical(_text(expression), d, restarts, seed))


def max_expression_quantum(expression, d, restarts=50, seed=1):
    return _decode_machine(_core.max_expression_quantum(_text(expression), d, restarts, seed))


def deterministic_complexity(sequence):
    return _decode_machine(_core.deterministic_complexity(sequence))


def clock(machine, t_max):
    return _core.clock(_text(machine), t_max)


def steering_check(members, tol=1e-7):
    """members[x][a] are the complex matrices sigma_{a|x}."""
    return _core.steering_check(members, tol)
