import csv
import io
import json
import math
import shutil
import subprocess
from importlib import resources

import numpy as np
import pytest
from jsonschema import Draft202012Validator

from dsonc.cli import run
from dsonc.documents import SignomialDocument
from dsonc.errors import DocumentError
from helpers import example_docs

RESULT_SCHEMA = Draft202012Validator(json.loads(resources.files("dsonc").joinpath("schemas/result.schema.json").read_text()))
DOC_SCHEMA = Draft202012Validator(json.loads(resources.files("dsonc").joinpath("schemas/signomial.schema.json").read_text()))


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data), encoding="utf-8")
    return str(p)


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    result = json.loads(out.getvalue())
    RESULT_SCHEMA.validate(result)
    return code, result


@pytest.fixture
def docs(tmp_path):
    return {name: write(tmp_path, f"{name}.json", data) for name, data in example_docs().items()}


class TestCheck:
    def test_motzkin_dsonc_not_member(self, docs):
        code, r = call("check", "--cone", "dsonc", docs["m31"])
        assert code == 1 and r["verdict"] == "NotMember"
        assert r["diagnostics"]["theta_check"] == pytest.approx(1.0)

    def test_motzkin_sonc_boundary(self, docs):
        code, r = call("check", "--cone", "sonc", docs["m31"])
        assert code == 0 and r["verdict"] == "Boundary"
        assert r["diagnostics"]["theta"] == pytest.approx(3.0)

    def test_boundary_has_witness(self, docs):
        code, r = call("check", "--cone", "dsonc", docs["m327"])
        assert code == 0 and r["verdict"] == "Boundary"
        np.testing.assert_allclose(r["witnesses"][0]["tau"], [math.log(3) / 2] * 2, atol=1e-7)

    def test_dual_sonc(self, docs):
        code, r = call("check", "--cone", "dual-sonc", docs["ex33"])
        assert code == 0 and r["verdict"] == "Member"
        code, r = call("check", "--cone", "dsonc", docs["ex33"])
        assert code == 1 and r["diagnostics"]["route"] == "split"

    def test_age_route(self, docs):
        code, r = call("check", "--cone", "sonc", docs["age"])
        assert r["diagnostics"]["route"] == "age" and r["verdict"] == "NotMember"

    def test_split_file(self, docs, tmp_path):
        split = {
            "n": 2,
            "pieces": [
                {"inner": ["1", "0"], "shares": [{"e": ["0", "0"], "s": 0.5}, {"e": ["2", "0"], "s": 1}]},
                {"inner": ["0", "1"], "shares": [{"e": ["0", "0"], "s": 0.5}, {"e": ["0", "2"], "s": 1}]},
            ],
        }
        sf = write(tmp_path, "split.json", split)
        assert call("check", "--cone", "dsonc", docs["disjoint"])[0] == 1
        code, r = call("check", "--cone", "dsonc", "--split", "file", "--split-file", sf, docs["disjoint"])
        assert code == 0 and r["verdict"] == "Member" and len(r["witnesses"]) == 2

    def test_split_file_missing(self, docs):
        code, r = call("check", "--cone", "dsonc", "--split", "file", docs["disjoint"])
        assert code == 2 and r["diagnostics"]["code"] == "PARSE_ERROR"

    def test_many_files_with_jobs(self, docs):
        files = [docs["m327"], docs["m31"], docs["m327"]]
        code, r = call("check", "--cone", "dsonc", "--jobs", "3", *files)
        assert code == 1
        assert [x["verdict"] for x in r["diagnostics"]["results"]] == ["Boundary", "NotMember", "Boundary"]
        assert [x["diagnostics"]["file"] for x in r["diagnostics"]["results"]] == files

    def test_jobs_do_not_change_results(self, docs):
        files = list(docs.values())
        _, a = call("check", "--cone", "dsonc", "--jobs", "1", *files)
        _, b = call("check", "--cone", "dsonc", "--jobs", "4", *files)
        assert a == b


class TestErrors:
    def test_parse_error_location(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"n": 1,\n]', encoding="utf-8")
        code, r = call("check", "--cone", "dsonc", str(p))
        assert code == 2
        assert r["diagnostics"]["code"] == "PARSE_ERROR"
        assert (r["diagnostics"]["line"], r["diagnostics"]["column"]) == (2, 1)

    def test_missing_file(self, tmp_path):
        code, r = call("equilibrium", str(tmp_path / "nope.json"))
        assert code == 2 and r["diagnostics"]["code"] == "IO_ERROR"

    def test_negative_vertex(self, tmp_path):
        f = write(tmp_path, "v.json", {"n": 1, "terms": [{"c": 1, "e": ["0"]}, {"c": -1, "e": ["2"]}, {"c": 1, "e": ["1"]}]})
        code, r = call("check", "--cone", "dsonc", f)
        assert code == 2 and r["diagnostics"]["vertices"] == [["2"]]

    def test_float_exponent_rejected(self, tmp_path):
        f = write(tmp_path, "e.json", {"n": 1, "terms": [{"c": 1, "e": [0.5]}]})
        code, r = call("check", "--cone", "dsonc", f)
        assert code == 2 and r["verdict"] == "Error"

    def test_degenerate_equilibrium(self, tmp_path):
        f = write(
            tmp_path,
            "d.json",
            {"n": 2, "terms": [{"c": 1, "e": ["0", "0"]}, {"c": 1, "e": ["2", "2"]}, {"c": -1, "e": ["1", "1"]}]},
        )
        code, r = call("equilibrium", f)
        assert code == 2 and r["diagnostics"]["code"] == "DEGENERATE_CIRCUIT"


class TestOtherCommands:
    def test_bound(self, docs):
        code, r = call("bound", "--boost", docs["h"])
        assert code == 0 and r["verdict"] == "Success"
        assert r["diagnostics"]["gamma_dsonc"] == pytest.approx(1.0, abs=1e-7)
        assert r["diagnostics"]["gamma_sonc_boosted"] == pytest.approx(3.0, abs=1e-7)
        assert r["diagnostics"]["lambda"] == ["1/3"] * 3

    def test_bound_without_certificate(self, tmp_path):
        f = write(tmp_path, "nc.json", {"n": 1, "terms": [{"c": 1, "e": ["4"]}, {"c": 1, "e": ["-4"]}, {"c": -5, "e": ["2"]}]})
        code, r = call("bound", f)
        assert code == 1 and r["diagnostics"]["failed"] == [["2"]]

    def test_bound_unbounded(self, tmp_path):
        f = write(tmp_path, "u.json", {"n": 1, "terms": [{"c": 1, "e": ["2"]}]})
        code, r = call("bound", f)
        assert code == 2 and r["diagnostics"]["code"] == "UNBOUNDED_DIRECTION"

    def test_circuits(self, tmp_path):
        f = write(tmp_path, "pts.json", {"n": 2, "points": [["0", "0"], ["4", "0"], ["0", "4"], ["2", "2"], ["4/3", "4/3"]]})
        code, r = call("circuits", f)
        assert code == 0 and r["diagnostics"]["count"] == 2
        code, r = call("circuits", "--cap", "1", f)
        assert code == 2 and r["diagnostics"]["code"] == "ENUMERATION_CAP_EXCEEDED"

    def test_equilibrium_and_minimizer(self, docs):
        _, r = call("equilibrium", docs["m327"])
        np.testing.assert_allclose(r["diagnostics"]["point"], [math.log(3) / 2] * 2, atol=1e-9)
        assert r["diagnostics"]["common_value"] == pytest.approx(3.0)
        assert r["diagnostics"]["boundary"] and r["diagnostics"]["genus_zero"]
        _, r = call("minimizer", docs["m327"])
        assert r["diagnostics"]["equals_equilibrium"]

    def test_extreme_ray(self, docs, tmp_path):
        assert call("extreme-ray", docs["uni"])[0] == 0
        data = dict(example_docs()["uni"], ambient=[["0"], ["1"], ["2"], ["4"]])
        code, r = call("extreme-ray", write(tmp_path, "amb.json", data))
        assert code == 1 and "minimal" in r["diagnostics"]["reason"]

    def test_mms(self, tmp_path):
        f = write(tmp_path, "delta.json", {"n": 2, "delta": [["0", "0"], ["2", "4"], ["4", "2"]]})
        code, r = call("mms", f)
        assert code == 0
        assert ["2", "2"] in r["diagnostics"]["removed"]
        assert len(r["diagnostics"]["mediated"]) == 6

    def test_sos_check(self, docs):
        code, r = call("sos-check", docs["m327"])
        assert code == 1 and r["diagnostics"]["in_dsonc"] == "Boundary"
        code, r = call("sos-check", docs["p"])
        assert code == 0 and r["diagnostics"]["in_dsonc"] == "NotMember"

    def test_generate_round_trip(self, tmp_path):
        circ = write(tmp_path, "c.json", {"n": 2, "vertices": [["4", "2"], ["2", "4"], ["0", "0"]], "inner": ["2", "2"]})
        out = tmp_path / "gen.json"
        w = f"{math.log(3) / 2},{math.log(3) / 2}"
        code, r = call("generate", "--circuit", circ, "--w", w, "--t", "3", "--out", str(out))
        assert code == 0 and r["diagnostics"]["dsonc"] == "Boundary"
        DOC_SCHEMA.validate(json.loads(out.read_text()))
        assert b"\r\n" not in out.read_bytes()
        coeffs = sorted(c for c, _ in SignomialDocument.load(out).terms)
        np.testing.assert_allclose(coeffs, [-3, 1, 1, 27], rtol=1e-9)
        code, r = call("check", "--cone", "dsonc", str(out))
        assert r["verdict"] == "Boundary"

    def test_generate_negative_w(self, tmp_path):
        circ = write(tmp_path, "c.json", {"n": 1, "vertices": [["0"], ["2"]], "inner": ["1"]})
        code, r = call("generate", "--circuit", circ, "--w", "-1", "--t", "1")
        assert code == 0

    def test_plot_one_dimensional(self, docs, tmp_path):
        out = tmp_path / "p.csv"
        code, r = call("plot", docs["p"], "--grid", "-2:2:101", "--out", str(out))
        assert code == 0 and r["diagnostics"]["rows"] == 101
        raw = out.read_bytes()
        assert b"\r\n" not in raw
        rows = list(csv.reader(io.StringIO(raw.decode())))
        assert rows[0] == ["x", "f"] and len(rows) == 102
        for x, v in rows[1:]:
            x = float(x)
            assert float(v) == pytest.approx(5 * x**2 + 5 * x**6 - 8 * x**4, abs=1e-9)

    def test_plot_two_dimensional(self, docs, tmp_path):
        out = tmp_path / "m.csv"
        code, _ = call("plot", docs["m31"], "--grid", "-1:1:5,-1:1:7", "--out", str(out))
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["x", "y", "f"] and len(rows) == 36

    def test_plot_grid_mismatch(self, docs, tmp_path):
        code, r = call("plot", docs["m31"], "--grid", "-1:1:5", "--out", str(tmp_path / "x.csv"))
        assert code == 2


class TestDocuments:
    def test_round_trip(self, tmp_path):
        for name, data in example_docs().items():
            DOC_SCHEMA.validate(data)
            doc = SignomialDocument.from_dict(data)
            p = tmp_path / f"{name}.rt.json"
            doc.save(p)
            again = SignomialDocument.load(p)
            assert again == doc
            assert again.to_signomial() == doc.to_signomial()

    def test_poly_mode_rejects_negative_exponent(self):
        with pytest.raises(DocumentError):
            SignomialDocument.from_dict({"n": 1, "mode": "poly", "terms": [{"c": 1, "e": ["-2"]}]})

    def test_wrong_arity(self):
        with pytest.raises(DocumentError):
            SignomialDocument.from_dict({"n": 2, "terms": [{"c": 1, "e": ["1"]}]})


@pytest.mark.skipif(shutil.which("dsonc") is None, reason="console script not installed")
def test_console_script(docs):
    proc = subprocess.run(["dsonc", "check", "--cone", "dsonc", docs["m31"]], capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["verdict"] == "NotMember"
