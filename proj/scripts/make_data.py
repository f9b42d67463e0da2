#!/usr/bin/env python3
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
"""Writes the bundled documents in data/."""

import json
import math
import pathlib

import numpy as np

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
PM = {"+1": 1.0, "-1": -1.0}


def cmat(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def instrument(outcomes, kraus):
    return {"outcomes": outcomes, "kraus": [[cmat(k) for k in ks] for ks in kraus]}


def header(kind):
    return {"format_version": 1, "kind": kind}


def model(initial, instruments, inter_step=None, values=None):
    doc = header("model")
    doc["initial"] = cmat(initial)
    doc["instruments"] = instruments
    if inter_step is not None:
        doc["inter_step"] = inter_step
    doc["declare_skip"] = True
    doc["outcome_values"] = values or {}
    return doc


def lg_scenario(n):
    return {
        "length": n,
        "settings": ["0", "1"],
        "outcomes": {"0": ["0"], "1": ["+1", "-1"]},
        "no_measurement": "0",
        "outcome_values": PM,
    }


def lgi(n):
    def pair(i, j):
        s = ["0"] * n
        s[i] = s[j] = "1"
        return s

    terms = [{"type": "correlator", "coefficient": 1.0, "settings": pair(i, i + 1), "positions": [i, i + 1]}
             for i in range(n - 1)]
    terms.append({"type": "correlator", "coefficient": -1.0, "settings": pair(0, n - 1), "positions": [0, n - 1]})
    doc = header("expression")
    doc.update({"name": f"lgi_n({n})", "scenario": lg_scenario(n), "terms": terms, "sense": "upper",
                "classical_bound": float(n - 2), "quantum_bound": n * math.cos(math.pi / n)})
    return doc


def sigma_z():
    return instrument(["+1", "-1"], [[proj([1, 0])], [proj([0, 1])]])


def rotating(angle):
    sy = np.array([[0, -1j], [1j, 0]])
    return model(proj([1, 0]), {"1": sigma_z()}, {"hamiltonian": cmat(sy / 2), "time": angle}, PM)


def spin1():
    jx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]) / math.sqrt(2)
    e = np.eye(3)
    inst = instrument(["+1", "-1"], [[proj(e[0]), proj(e[1])], [proj(e[2])]])
    return model(proj(e[0]), {"1": inst}, {"hamiltonian": cmat(jx), "time": 1.3}, PM)


def fig2():
    z = instrument(["+", "-"], [[proj([1, 0])], [proj([0, 1])]])
    x = instrument(["+", "-"], [[proj([1, 1]) / 2], [proj([1, -1]) / 2]])
    return model(proj([1, 1]) / 2, {"z": z, "x": x})


def eq31():
    doc = header("expression")
    doc.update({
        "name": "eq31",
        "scenario": {"length": 2, "settings": ["0", "1"], "outcomes": {"0": ["0", "1"], "1": ["0", "1"]},
                     "no_measurement": None, "outcome_values": {}},
        "terms": [
            {"type": "probability", "coefficient": 1.0, "settings": ["0", "0"], "outcomes": ["0", "1"]},
            {"type": "probability", "coefficient": 1.0, "settings": ["1", "0"], "outcomes": ["1", "0"]},
            {"type": "probability", "coefficient": 1.0, "settings": ["1", "1"], "outcomes": ["1", "0"]},
        ],
        "sense": "upper",
        "classical_bound": 2.25,
    })
    return doc


def counter(d):
    transfer = [np.zeros((d, d)), np.zeros((d, d))]
    for r in range(d):
        if r < d - 1:
            transfer[0][r + 1, r] = 1.0
        else:
            transfer[1][0, r] = 1.0
    doc = header("machine")
    doc.update({"type": "classical", "inputs": ["*"], "outputs": ["0", "1"], "initial": [1.0] + [0.0] * (d - 1),
                "transfer": [[t.tolist() for t in transfer]]})
    return doc


def geometric(rate):
    doc = header("machine")
    doc.update({"type": "classical", "inputs": ["*"], "outputs": ["0", "1"], "initial": [1.0],
                "transfer": [[[[1.0 - rate]], [[rate]]]]})
    return doc


def main():
    DATA.mkdir(exist_ok=True)
    docs = {
        "rotating_qubit.json": rotating(math.pi / 3),
        "four_time_qubit.json": rotating(math.pi / 4),
        "spin1_precession.json": spin1(),
        "fig2_superposition.json": fig2(),
        "lgi3.json": lgi(3),
        "lgi4.json": lgi(4),
        "lgi5.json": lgi(5),
        "eq31.json": eq31(),
        "one_tick_counter4.json": counter(4),
        "geometric_half.json": geometric(0.5),
    }
    for name, doc in docs.items():
        (DATA / name).write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
