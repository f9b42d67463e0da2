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

import json
import math
import os
import pathlib
import subprocess

import pytest

CLI = os.environ.get("TEMPOCORR_CLI", "build/tempocorr")
DATA = pathlib.Path(os.environ.get("TEMPOCORR_DATA", "data"))


def run(*args, check=True):
    proc = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
    return proc


def report(*args):
    doc = json.loads(run(*args, "--json").stdout)
    assert doc["format_version"] == 1
    assert doc["kind"] == "report"
    return doc


def test_simulate_rotating_qubit_and_certify(tmp_path):
    out = tmp_path / "b.json"
    run("simulate", DATA / "rotating_qubit.json", "--all", 3, "-o", out)
    b = json.loads(out.read_text())
    assert b["kind"] == "behavior"
    assert len(b["table"]) == 8
    r = report("certify", out)
    assert r["witnesses"]["lgi"]["value"] == pytest.approx(1.5, abs=1e-9)
    assert r["aot"]["pass"]
    assert r["mr"]["status"] == "rejected"
    assert r["mr"]["certificate"]["margin"] >= 0.49


def test_fig2_nsit(tmp_path):
    out = tmp_path / "b.json"
    run("simulate", DATA / "fig2_superposition.json", "--sequence", "z,x", "--sequence", "0,x", "-o", out)
    r = report("certify", out)
    assert r["nsit"]["max_deviation_by_position"]["0"] == pytest.approx(0.5, abs=1e-9)


def test_spin1_exceeds_two_level_value(tmp_path):
    out = tmp_path / "b.json"
    run("simulate", DATA / "spin1_precession.json", "--all", 3, "-o", out)
    assert report("certify", out)["witnesses"]["lgi"]["value"] > 1.5


def test_empty_schedule():
    b = json.loads(run("simulate", DATA / "rotating_qubit.json").stdout)
    assert b["table"] == []


def test_truncated_behavior_lists_untestable(tmp_path):
    out = tmp_path / "b.json"
    run("simulate", DATA / "rotating_qubit.json", "--sequence", "1,1,1", "--sequence", "1,1,0", "-o", out)
    r = report("certify", out)
    assert r["nsit"]["untestable"] or r["aot"]["untestable"]


def test_bounds():
    assert report("bound", DATA / "lgi3.json", "--class", "qproj")["value"] == pytest.approx(1.5, abs=1e-6)
    assert report("bound", DATA / "lgi4.json", "--class", "qproj")["value"] == pytest.approx(2 * math.sqrt(2), abs=1e-6)
    assert report("bound", DATA / "lgi3.json", "--class", "mr")["value"] == pytest.approx(1.0)
    r = report("bound", DATA / "eq31.json", "--class", "classical-d", "--dim", 2, "--seed", 3)
    assert r["value"] == pytest.approx(2.25, abs=1e-6)
    assert r["seed"] == 3 and r["certification"] == "none" and "runtime_s" in r
    q = report("bound", DATA / "eq31.json", "--class", "quantum-d", "--dim", 2)
    assert q["value"] >= 2.3556
    assert q["machine"]["type"] == "quantum"


def test_missing_dim_is_input_error():
    proc = run("bound", DATA / "eq31.json", "--class", "classical-d", check=False)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"]["type"] == "input"


def test_dc():
    assert report("dc", "010101")["complexity"] == 2
    assert report("dc", "0001")["complexity"] == 4
    assert "DC = 2" in run("dc", "010101").stdout


def test_clock():
    r = report("clock", DATA / "geometric_half.json", "--tmax", 64)
    assert r["accuracy"] == pytest.approx(2.0, abs=1e-9)
    c = report("clock", DATA / "one_tick_counter4.json", "--tmax", 10)
    assert c["deterministic"] and c["accuracy"] is None
    assert "deterministic clock" in run("clock", DATA / "one_tick_counter4.json", "--tmax", 10).stdout


def test_clock_tail_too_heavy():
    assert run("clock", DATA / "geometric_half.json", "--tmax", 5, check=False).returncode == 2


def test_export_sdp(tmp_path):
    out = tmp_path / "lgi3.dat-s"
    run("export-sdp", DATA / "lgi3.json", "-o", out)
    lines = out.read_text().splitlines()
    assert lines[0].startswith('"')
    assert int(lines[1]) > 0


def test_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    proc = run("certify", bad, check=False)
    assert proc.returncode == 2
    assert "error" in json.loads(proc.stderr)
    doc = json.loads((DATA / "lgi3.json").read_text())
    doc["unexpected"] = True
    bad.write_text(json.dumps(doc))
    assert run("bound", bad, "--class", "mr", check=False).returncode == 2


def test_unphysical_model_exit_code(tmp_path):
    doc = json.loads((DATA / "rotating_qubit.json").read_text())
    doc["initial"] = [[[2.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
    bad = tmp_path / "m.json"
    bad.write_text(json.dumps(doc))
    assert run("simulate", bad, "--all", 2, check=False).returncode == 2


def test_zero_dimension_is_rejected():
    proc = run("bound", DATA / "eq31.json", "--class", "classical-d", "--dim", 0, check=False)
    assert proc.returncode == 2


def test_size_guard_exit_code(tmp_path):
    doc = json.loads((DATA / "lgi3.json").read_text())
    n = 12
    pair = lambda i, j: ["1" if k in (i, j) else "0" for k in range(n)]
    doc["scenario"]["length"] = n
    doc["terms"] = [{"type": "correlator", "coefficient": 1.0, "settings": pair(i, i + 1), "positions": [i, i + 1]}
                    for i in range(n - 1)]
    big = tmp_path / "big.json"
    big.write_text(json.dumps(doc))
    proc = run("bound", big, "--class", "aot", check=False)
    assert proc.returncode == 4
    assert json.loads(proc.stderr)["error"]["type"] == "size_guard"


def test_reports_are_deterministic():
    args = ("bound", DATA / "eq31.json", "--class", "classical-d", "--dim", 2, "--no-runtime", "--json")
    assert run(*args).stdout == run(*args).stdout


def test_bundled_documents_parse():
    for path in DATA.glob("*.json"):
        doc = json.loads(path.read_text())
        assert doc["format_version"] == 1
        assert doc["kind"] in {"model", "expression", "machine", "behavior", "scenario"}
