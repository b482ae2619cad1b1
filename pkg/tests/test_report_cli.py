import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from neumannkit import cli
from neumannkit.critical import Kind
from neumannkit.report import Entry, VerificationReport, dumps
from neumannkit.render import render_complex
from neumannkit.suite import CLAIMS, Workspace, run_suite

SVG = "{http://www.w3.org/2000/svg}"


# -- report serialization -----------------------------------------------------

def test_floats_round_trip_exactly():
    vals = [math.pi, 1 / 3, 2.0 ** -40, 1e300, -0.1, np.float64(math.e)]
    back = json.loads(dumps({"v": vals}))["v"]
    assert back == [float(v) for v in vals]
    assert "3.1415926535897931" in dumps(math.pi)


def test_non_finite_become_null():
    assert json.loads(dumps([float("nan"), float("inf"), 1]))[:2] == [None, None]


def test_entry_provenance_checked():
    with pytest.raises(ValueError):
        Entry("x", 1, "", "GUESS", True)


def test_report_shape():
    rep = VerificationReport("paper", [Entry("a", 1, "q", "PAPER", True, {"x": 0.5})], {"total_seconds": 1.0})
    doc = json.loads(dumps(rep))
    assert doc["passed"] and doc["entries"][0]["measured"] == {"x": 0.5}
    assert "seconds" in doc["metadata"] and "seconds" not in doc["entries"][0]


def test_unknown_claim_rejected():
    with pytest.raises(KeyError):
        run_suite(Workspace(), only=["nope"])


def test_claims_cover_all_criteria():
    assert set(CLAIMS) >= {"square_u1", "disk_u1", "disk_u2", "mfs_disk", "gradient_bound", "courant",
                           "corollary_nodal", "identities", "annulus_u1", "left_ends", "audits"}


# -- configuration ------------------------------------------------------------

def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# flower run\ndomain.kind = flower\ndomain.n = 4\ndomain.a: 0.3\nk = 1-3\n")
    cfg = cli.RunConfig.build(cli.read_config(path), cli._overrides(["--a", "0.35", "--tol-g=1e-8"]))
    spec = cfg.domain()
    assert (spec.kind, spec.n, spec.a) == ("flower", 4, 0.35)
    assert cfg["k"] == [1, 2, 3] and cfg["tol_g"] == 1e-8


@pytest.mark.parametrize("values", [{"bogus": "1"}, {"tol_g": "-1"}, {"k": "0"}, {"backend": "fem"},
                                    {"jobs": "0"}, {"domain.coeffs": "[1,"}])
def test_config_errors(values):
    with pytest.raises(cli.ConfigError):
        cli.RunConfig.build({}, values)


def test_config_line_without_separator(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("domain disk\n")
    with pytest.raises(cli.ConfigError):
        cli.read_config(path)


# -- command line ---------------------------------------------------------------

def test_solve_disk(capsys, tmp_path):
    out = tmp_path / "solve.json"
    assert cli.main(["solve", "--domain", "disk", "--k", "1-2", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "positive=True" in text
    rows = json.loads(out.read_text())["eigenpairs"]
    assert rows[0]["lam"] == pytest.approx(5.783185962946785, abs=1e-12)
    assert rows[1]["lam"] == pytest.approx(14.681970642123893, abs=1e-12)


@pytest.mark.parametrize("argv", [
    ["solve", "--domain", "triangle"],
    ["solve", "--domain", "annulus", "--a", "2"],
    ["solve"],
    ["solve", "--domain", "disk", "--nonsense", "3"],
    ["verify", "--only", "no_such_claim"],
    ["solve", "--config", "/nonexistent/file.cfg"],
])
def test_config_exit_code(argv, capsys):
    assert cli.main(argv) == cli.EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_abort_exit_code(capsys):
    # the square has corners, which the MFS backend refuses
    assert cli.main(["solve", "--domain", "square", "--backend", "mfs"]) == cli.EXIT_ABORT


def test_verify_single_claim_deterministic(tmp_path, capsys):
    docs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert cli.main(["verify", "--only", "disk_u2", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        doc.pop("metadata")
        docs.append(doc)
    assert docs[0] == docs[1]
    assert docs[0]["entries"][0]["id"] == "disk_u2" and docs[0]["passed"]
    assert "[PASS] disk_u2" in capsys.readouterr().out


def test_tampered_tolerance_fails(capsys):
    assert cli.main(["verify", "--only", "critical_completeness"]) == cli.EXIT_OK
    assert cli.main(["verify", "--only", "critical_completeness", "--tol_g", "1e-2"]) == cli.EXIT_FAIL
    assert "[FAIL] critical_completeness" in capsys.readouterr().out


def test_analyze_writes_report_and_svg(tmp_path, capsys):
    out, svg = tmp_path / "a.json", tmp_path / "a.svg"
    assert cli.main(["analyze", "--domain", "disk", "--k", "2", "--out", str(out), "--svg", str(svg)]) == 0
    doc = json.loads(out.read_text())
    assert (doc["neumann_total"], doc["neumann_interior"], doc["neumann_boundary"]) == (3, 1, 2)
    assert doc["nodal"] == 2 and doc["payne"] == 2 and doc["identities"]["passed"]
    assert ET.parse(svg).getroot().tag == SVG + "svg"


# -- rendering -----------------------------------------------------------------

def test_svg_glyphs_match_complex(ws):
    from neumannkit.geometry import DomainSpec
    cx = ws.complex(DomainSpec.square(), 4)
    root = ET.fromstring(render_complex(cx, "square u4"))
    by_class = {}
    for el in root.iter():
        cls = el.get("class")
        if cls:
            by_class.setdefault(cls, []).append(el)
    crit = cx.crit
    assert len(by_class.get("max", [])) == len(crit.of_kind(Kind.MAX)) == 2
    assert len(by_class.get("min", [])) == len(crit.of_kind(Kind.MIN)) == 2
    assert len(by_class.get("saddle", [])) == len(crit.of_kind(Kind.SADDLE))
    assert len(by_class.get("separatrix", [])) == sum(1 for e in cx.edges if e.kind == "separatrix")
    assert len(by_class.get("face", [])) == len(cx.faces) == 12
    assert all(m.get("fill") == "black" for m in by_class["max"])
    assert all(m.get("fill") == "white" for m in by_class["min"])
