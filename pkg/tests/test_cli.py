"""End-to-end checks of the JSON batch interface."""

import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from stable_slices.cli import main

FLAGSHIP_Z = [[0.0, 23.0], [-463.0, 0.0], [0.0, -8461.0], [8020.0, 0.0]]


def run_job(tmp_path, job, args=()):
    jf = tmp_path / "job.json"
    of = tmp_path / "out.txt"
    jf.write_text(json.dumps(job))
    code = main(["--job", str(jf), "--out", str(of), *args])
    text = of.read_text() if of.exists() else ""
    return code, text


def run_json(tmp_path, job, args=()):
    code, text = run_job(tmp_path, job, args)
    assert code == 0, text
    return json.loads(text)


class TestRoots:
    def test_quadratic(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "roots",
            "payload": {"poly": {"z": [[0, 0], [1, 0]],
                                 "convention": "vieta-alternating"}},
        })
        assert doc["roots"] == [[0.0, -1.0], [0.0, 1.0]]
        assert "tolerances" in doc

    def test_result_shape_validates(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "roots",
            "payload": {"poly": {"z": FLAGSHIP_Z}},
        })
        schema = {
            "type": "object",
            "properties": {
                "roots": {"type": "array",
                          "items": {"type": "array",
                                    "items": {"type": "number"},
                                    "minItems": 2, "maxItems": 2}},
                "tolerances": {"type": "object"},
            },
            "required": ["roots", "tolerances"],
            "additionalProperties": False,
        }
        jsonschema.validate(doc, schema)
        assert len(doc["roots"]) == 4


class TestVieta:
    def test_two_roots(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "vieta",
            "payload": {"roots": [[0, 1], [0, 2]]},
        })
        assert doc["poly"]["convention"] == "vieta-alternating"
        assert np.allclose(doc["poly"]["z"], [[0.0, 3.0], [-2.0, 0.0]])


class TestStableCheck:
    def test_flagship(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "stable-check",
            "payload": {"poly": {"z": FLAGSHIP_Z}},
        })
        assert doc["stable"] is True
        assert doc["profile"]["outside_total"] == 0
        assert doc["profile"]["interior_total"] == 4
        assert len(doc["witness_roots"]) == 4

    def test_unstable(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "stable-check",
            "payload": {"poly": {"z": [[0, -1]]}},
        })
        assert doc["stable"] is False
        assert doc["profile"]["outside_total"] == 1


class TestHurwitzCommands:
    def test_embed_unembed_round_trip(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "embed",
            "payload": {"coefficients": [4, 6, 4]},
        })
        assert np.allclose(doc["poly"]["z"],
                           [[0.0, 4.0], [-6.0, 0.0], [0.0, -4.0]])
        back = run_json(tmp_path, {
            "command": "unembed",
            "payload": {"poly": doc["poly"]},
        })
        assert back["coefficients"] == pytest.approx([4.0, 6.0, 4.0])

    def test_hurwitz_check(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "hurwitz-check",
            "payload": {"coefficients": [4, 6, 4]},
        })
        assert doc["stable"] is True and doc["strict"] is True


class TestBounds:
    def test_flagship_window(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "bounds",
            "payload": {"a1": [0, 23], "a2": [-463, 0], "n": 4},
        })
        assert doc["empty"] is False
        assert doc["im"] == pytest.approx([0.0, 23.0])
        assert doc["re_sq_bound"] == pytest.approx(2513.0)

    def test_empty_slice(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "bounds",
            "payload": {"a1": [0, 2], "a2": [10, 0], "n": 2},
        })
        assert doc == {"empty": True, "tolerances": doc["tolerances"]}


class TestCompress:
    def test_triple_root_instance(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "compress",
            "payload": {
                "poly": {"z": [[6, 0], [11, 0], [6, 0]]},
                "slice": {"matrix": [[1, 0, 0]], "target": [6]},
            },
        })
        z = doc["final_z"]["z"]
        assert z[0] == pytest.approx([6.0, 0.0], abs=1e-9)
        assert z[1] == pytest.approx([11.0, 0.0], abs=1e-8)
        assert z[2][0] == pytest.approx(6.384900179459756, abs=1e-8)
        assert doc["final_profile"]["boundary_distinct"] == 2
        assert doc["final_profile"]["interior_total"] == 0
        assert doc["cap_reached"] is False
        assert doc["checkpoints"] == [[0, 3], [0, 2]]
        for step in doc["steps"]:
            assert step["stable"] is True


class TestGws:
    def test_e2_example(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "gws",
            "payload": {
                "f": {"n": 2, "degree": 2,
                      "terms": [{"exponents": [0, 1], "coefficient": [1, 0]}]},
                "x": [[0, 2], [0, 8]],
            },
        })
        assert doc["y"] == pytest.approx([0.0, 4.0])
        assert doc["residual"] <= 1e-10


class TestSliceSample:
    def test_csv_bytes(self, tmp_path):
        code, text = run_job(tmp_path, {
            "command": "slice-sample",
            "payload": {
                "slice": {"matrix": [[0, 1]], "target": [-1]},
                "free_axes": [0, 1],
                "window": [0, 0, 0, 0],
                "resolution": [1, 1],
            },
        })
        assert code == 0
        assert text == "x,y,member\n0.0,0.0,1\n"

    def test_json_format(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "slice-sample",
            "payload": {
                "slice": {"matrix": [[0, 1]], "target": [-1]},
                "free_axes": [0, 1],
                "window": [-1, 1, -5, -2],
                "resolution": [3, 2],
                "format": "json",
            },
        })
        assert doc["xs"] == [-1.0, 0.0, 1.0]
        assert doc["members"] == [[0, 0, 0], [0, 0, 0]]


class TestMoebius:
    def test_shift(self, tmp_path):
        doc = run_json(tmp_path, {
            "command": "moebius",
            "payload": {
                "map": {"a": [1, 0], "b": [1, 0], "c": [0, 0], "d": [1, 0]},
                "poly": {"z": [[0, 0], [1, 0]]},
            },
        })
        # T^2 + 1 under T -> T + 1 becomes T^2 + 2T + 2
        assert doc["degree_drop"] == 0
        assert np.allclose(doc["coefficients"],
                           [[1.0, 0.0], [2.0, 0.0], [2.0, 0.0]])


class TestValidation:
    def test_unknown_command(self, tmp_path):
        code, text = run_job(tmp_path, {"command": "frobnicate", "payload": {}})
        assert code == 2
        assert text == ""

    def test_bad_field_value(self, tmp_path):
        code, _ = run_job(tmp_path, {
            "command": "compress",
            "payload": {
                "poly": {"z": [[6, 0], [11, 0], [6, 0]]},
                "slice": {"matrix": [[1, 0, 0]], "target": [6],
                          "field": "quaternion"},
            },
        })
        assert code == 2

    def test_runtime_dimension_error(self, tmp_path):
        # free axis 2 touches z2, which the slice pins
        code, _ = run_job(tmp_path, {
            "command": "slice-sample",
            "payload": {
                "slice": {"matrix": [[0, 1]], "target": [-1]},
                "free_axes": [2, 3],
                "window": [0, 0, 0, 0],
                "resolution": [1, 1],
            },
        })
        assert code == 2

    def test_malformed_json(self, tmp_path):
        jf = tmp_path / "bad.json"
        jf.write_text("{not json")
        assert main(["--job", str(jf)]) == 2


class TestDeterminism:
    def test_variety_search_repeats_byte_identical(self, tmp_path):
        job = {
            "command": "variety-search",
            "payload": {
                "polys": [{"n": 2, "degree": 1,
                           "terms": [{"exponents": [1], "coefficient": [1, 0]}]}],
                "pattern": [1, 0],
                "budget": 30,
            },
            "seed": 11,
        }
        _, first = run_job(tmp_path, job)
        _, second = run_job(tmp_path, job)
        assert first == second
        doc = json.loads(first)
        assert doc["found"] is True

    def test_seed_flag_overrides_document(self, tmp_path):
        job = {
            "command": "halfdeg-opt",
            "payload": {
                "f": {"n": 2, "degree": 1,
                      "terms": [{"exponents": [1], "coefficient": [1, 0]}]},
                "lambda": 0.0,
                "mu": 1.0,
                "budget": 4,
            },
            "seed": 5,
        }
        doc_a = run_json(tmp_path, job, args=("--seed", "5"))
        doc_b = run_json(tmp_path, job)
        assert doc_a == doc_b
        assert doc_a["inf_full"] == pytest.approx(0.0, abs=1e-6)


class TestModuleEntry:
    def test_python_dash_m_matches_in_process(self, tmp_path):
        job = {"command": "roots",
               "payload": {"poly": {"z": [[0, 0], [1, 0]]}}}
        jf = tmp_path / "job.json"
        jf.write_text(json.dumps(job))
        proc = subprocess.run(
            [sys.executable, "-m", "stable_slices.cli", "--job", str(jf)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        _, local = run_job(tmp_path, job)
        assert proc.stdout == local
