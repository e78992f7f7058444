"""Document format, command-line front end and golden outputs."""
import json
from pathlib import Path

import numpy as np
import pytest

from inertia_bundles import cli, io
from inertia_bundles.bundle import FormField, trivial_bundle
from inertia_bundles.errors import DegenerateForm, DocumentError
from inertia_bundles.random_fields import random_form_over_splitting, random_splitting

GOLDEN = Path(__file__).parent / "golden"


def run_cli(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def lk_docs(tmp_path, capsys):
    paths = {}
    for k in (0, 1, 2):
        p = tmp_path / f"l{k}.json"
        assert run_cli(capsys, "demo-lk", "--n-vertices", 32, "--k", k, "--out", p)[0] == 0
        paths[k] = p
    return paths


def write_json(path, data):
    path.write_text(json.dumps(data))
    return path


# -- golden files -----------------------------------------------------------

def test_golden_demo_lk(capsys):
    code, out, _ = run_cli(capsys, "demo-lk", "--n-vertices", 8, "--k", 1)
    assert code == 0
    assert out == (GOLDEN / "demo_lk_8_1.json").read_text()


def test_golden_invariants_l2(lk_docs, capsys):
    code, out, _ = run_cli(capsys, "invariants", lk_docs[2])
    assert code == 0
    assert out == (GOLDEN / "invariants_l2.json").read_text()


def test_golden_orbit_restricted_not_connected(lk_docs, capsys):
    code, out, err = run_cli(capsys, "orbit", lk_docs[0], lk_docs[2], "--mode", "restricted")
    assert code == 1
    assert out == (GOLDEN / "orbit_l0_l2_restricted.json").read_text()
    assert err.startswith("error: NotConnected")


# -- subcommands ------------------------------------------------------------

def test_inspect_report(lk_docs, capsys):
    code, out, _ = run_cli(capsys, "inspect", lk_docs[1])
    rep = json.loads(out)
    assert code == 0
    assert rep["inertia"] == {"n_plus": 1, "n_minus": 1}
    assert rep["trivial"] is True and rep["monodromy_det_sign"] == 1
    assert rep["q_splitting"] == {"passed": True, "first_failure": None}
    assert [s["dim"] for s in rep["subbundles"]] == [1, 1]


def test_split_writes_valid_document(lk_docs, tmp_path, capsys):
    out_path = tmp_path / "split.json"
    code, out, _ = run_cli(capsys, "split", lk_docs[2], "--reference", lk_docs[0], "--out", out_path)
    assert code == 1  # the l0 form is indefinite, so it cannot be a reference
    code, out, _ = run_cli(capsys, "split", lk_docs[2], "--out", out_path)
    rep = json.loads(out)
    assert code == 0
    assert rep["plus"]["winding"] == 2 and rep["minus"]["w1"] == 1
    code, out, _ = run_cli(capsys, "inspect", out_path)
    assert code == 0 and json.loads(out)["q_splitting"]["passed"]


def test_isometry_and_round_trip(tmp_path, capsys):
    rng = np.random.default_rng(71)
    b = trivial_bundle(16, 3)
    s = random_splitting(rng, b, 2, halfturns=1)
    docs = []
    for j in range(2):
        q = random_form_over_splitting(rng, s, cross=0.2)
        docs.append(tmp_path / f"q{j}.json")
        io.save(io.Document(b, form=q, subbundles=[s.plus, s.minus]), docs[-1])
    gauge_path = tmp_path / "gauge.json"
    code, out, _ = run_cli(capsys, "isometry", *docs, "--steps", 8, "--out", gauge_path)
    rep = json.loads(out)
    assert code == 0
    assert rep["method"] == "splitting" and rep["steps"] == 8
    assert rep["residual"] < 1e-9 and rep["min_det"] > 0
    code, out, _ = run_cli(capsys, "inspect", gauge_path)
    rep = json.loads(out)
    assert code == 0 and rep["gauge_path_steps"] == 8 and rep["gauge_min_abs_det"] > 0


def test_isometry_positive_forms(tmp_path, capsys):
    b = trivial_bundle(6, 2)
    d0 = tmp_path / "a.json"
    d1 = tmp_path / "b.json"
    io.save(io.Document(b, form=FormField(b, np.broadcast_to(np.diag([4.0, 1.0]), (6, 2, 2)))), d0)
    io.save(io.Document(b, form=FormField(b, np.broadcast_to(np.eye(2), (6, 2, 2)))), d1)
    code, out, _ = run_cli(capsys, "isometry", d0, d1)
    rep = json.loads(out)
    assert code == 0 and rep["method"] == "positive" and rep["residual"] < 1e-12


def test_isometry_inertia_mismatch(tmp_path, capsys):
    b = trivial_bundle(6, 2)
    d0, d1 = tmp_path / "a.json", tmp_path / "b.json"
    io.save(io.Document(b, form=FormField(b, np.broadcast_to(np.eye(2), (6, 2, 2)))), d0)
    io.save(io.Document(b, form=FormField(b, np.broadcast_to(np.diag([1.0, -1.0]), (6, 2, 2)))), d1)
    code, _, err = run_cli(capsys, "isometry", d0, d1)
    assert code == 1 and "NotConnected" in err


def test_orbit_full_writes_gauge(lk_docs, tmp_path, capsys):
    g = tmp_path / "g.json"
    code, out, _ = run_cli(capsys, "orbit", lk_docs[0], lk_docs[2], "--out", g)
    rep = json.loads(out)
    assert code == 0 and rep["connected"] and rep["residual"] < 1e-9
    assert run_cli(capsys, "inspect", g)[0] == 0
    code, out, _ = run_cli(capsys, "orbit", lk_docs[0], lk_docs[1])
    assert code == 1 and json.loads(out)["connected"] is False


def test_orbit_restricted_same_document(lk_docs, capsys):
    code, out, _ = run_cli(capsys, "orbit", lk_docs[1], lk_docs[1], "--mode", "restricted")
    rep = json.loads(out)
    assert code == 0 and rep["witness_steps"] == 1 and rep["residual"] == 0.0


def test_demo_lk_document_round_trip(tmp_path, capsys):
    p = tmp_path / "d.json"
    code, out, _ = run_cli(capsys, "demo-lk", "--n-vertices", 12, "--k", 3, "--out", p)
    assert code == 0 and json.loads(out) == {"written": str(p), "n_vertices": 12, "k": 3}
    doc = io.load(p)
    assert io.dumps(io.to_dict(doc)) + "\n" == p.read_text()


# -- exit codes -------------------------------------------------------------

def test_missing_file_is_io_error(tmp_path, capsys):
    code, _, err = run_cli(capsys, "inspect", tmp_path / "nope.json")
    assert code == 2 and "cannot read" in err


def test_invalid_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run_cli(capsys, "inspect", p)[0] == 2


def test_schema_error(tmp_path, capsys):
    p = write_json(tmp_path / "s.json", {"schema": "inertia-bundles/0", "base": {"n_vertices": 3}})
    code, _, err = run_cli(capsys, "inspect", p)
    assert code == 2 and "schema" in err


def test_shape_error_names_entry(tmp_path, capsys):
    data = io.to_dict(cli.lk_document(4, 0))
    data["form"][2] = [1.0, 0.0, 0.0]
    code, _, err = run_cli(capsys, "inspect", write_json(tmp_path / "s.json", data))
    assert code == 2 and "form[2]" in err


def test_degenerate_form_is_domain_error_naming_vertex(tmp_path, capsys):
    data = io.to_dict(cli.lk_document(5, 0))
    data["form"][3] = [1.0, 0.0, 0.0, 0.0]
    code, _, err = run_cli(capsys, "inspect", write_json(tmp_path / "d.json", data))
    assert code == 1 and "DegenerateForm" in err and "vertex 3" in err


def test_sampling_too_coarse(capsys):
    code, _, err = run_cli(capsys, "demo-lk", "--n-vertices", 4, "--k", 2)
    assert code == 1 and "SamplingTooCoarse" in err


def test_usage_error_exit_code(capsys):
    assert run_cli(capsys, "orbit", "a.json")[0] == 2
    assert run_cli(capsys, "isometry", "a.json", "b.json", "--steps", 1)[0] == 2


def test_no_form_in_document(tmp_path, capsys):
    p = tmp_path / "b.json"
    io.save(io.Document(trivial_bundle(4, 2)), p)
    assert run_cli(capsys, "inspect", p)[0] == 0
    code, _, err = run_cli(capsys, "invariants", p)
    assert code == 2 and "no form" in err


# -- tolerance override -----------------------------------------------------

def test_tolerance_from_env():
    assert cli.tolerance_from_env({}) == 1e-10
    assert cli.tolerance_from_env({cli.TOL_ENV: "1e-6"}) == 1e-6
    for bad in ("abc", "-1", "2"):
        with pytest.raises(DocumentError):
            cli.tolerance_from_env({cli.TOL_ENV: bad})


def test_tolerance_env_changes_degeneracy(tmp_path, capsys, monkeypatch):
    b = trivial_bundle(4, 2)
    p = tmp_path / "q.json"
    io.save(io.Document(b, form=FormField(b, np.broadcast_to(np.diag([1.0, -1e-8]), (4, 2, 2)))), p)
    assert run_cli(capsys, "inspect", p)[0] == 0
    monkeypatch.setenv(cli.TOL_ENV, "1e-6")
    code, _, err = run_cli(capsys, "inspect", p)
    assert code == 1 and "vertex 0" in err
    monkeypatch.setenv(cli.TOL_ENV, "bogus")
    assert run_cli(capsys, "inspect", p)[0] == 2


# -- io ---------------------------------------------------------------------

def test_dumps_format():
    text = io.dumps({"a": [1, 0.1, float("inf")], "b": {"c": True, "d": None}, "e": [[1.0], [2.5]]})
    assert text == '{\n  "a": [1, 0.10000000000000001, null],\n  "b": {\n    "c": true,\n    "d": null\n  },\n  "e": [\n    [1],\n    [2.5]\n  ]\n}'
    with pytest.raises(TypeError):
        io.dumps({"x": object()})


def test_floats_round_trip_exactly(tmp_path):
    rng = np.random.default_rng(72)
    b = trivial_bundle(7, 3)
    s = random_splitting(rng, b, 1)
    q = random_form_over_splitting(rng, s, cross=0.3)
    p = tmp_path / "q.json"
    io.save(io.Document(b, form=q, subbundles=[s.plus, s.minus]), p)
    back = io.load(p)
    assert np.array_equal(back.form.forms, q.forms)
    assert np.array_equal(back.subbundles[0].frames, s.plus.frames)
    assert back.splitting() is not None


def test_from_dict_rejects_oversized_subbundle():
    data = io.to_dict(cli.lk_document(4, 0))
    data["subbundles"][0]["dim"] = 3
    with pytest.raises(DocumentError, match="exceeds rank"):
        io.from_dict(data)


def test_from_dict_domain_errors_pass_through():
    data = io.to_dict(cli.lk_document(4, 0))
    data["form"][1] = [0.0, 0.0, 0.0, 0.0]
    with pytest.raises(DegenerateForm, match="vertex 1"):
        io.from_dict(data)


def test_schema_rejects_small_cycle():
    data = io.to_dict(cli.lk_document(4, 0))
    data["base"]["n_vertices"] = 2
    with pytest.raises(DocumentError, match="n_vertices"):
        io.validate(data)
