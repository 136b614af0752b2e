import json
from importlib.resources import files

import jsonschema
import pytest

from nangle import __version__
from nangle import linalg as la
from nangle.cli import main
from nangle.counterexample import counterexample_morphism
from nangle.sequences import (
    f_p_sequence,
    identity_morphism,
    make_sequence,
    zero_morphism,
    zero_sequence,
)

from conftest import Z4

SCHEMAS = files("nangle") / "schemas"


def schema(name):
    return json.loads((SCHEMAS / name).read_text())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def run_err(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def validated(report):
    jsonschema.validate(report, schema(f"report_{report['command']}.json"))
    return report


@pytest.fixture
def files_dir(tmp_path):
    a = f_p_sequence(Z4, 4, 1)
    one = la.scalar(Z4, 1)
    data = {
        "fp.json": a.to_json(),
        "zero.json": zero_sequence(Z4, 4).to_json(),
        "bad.json": make_sequence(Z4, 4, (1, 1, 1, 1), [one] * 4).to_json(),
        "id.json": identity_morphism(a).to_json(),
        "ex.json": counterexample_morphism(4, Z4).to_json(),
        "zz.json": zero_morphism(zero_sequence(Z4, 4), zero_sequence(Z4, 4)).to_json(),
        "sq.json": {"ring": Z4.to_json(), "source": a.to_json(), "target": a.to_json(), "phi1": one.to_json(), "phi2": one.to_json()},
        "oct.json": {"a": a.to_json(), "gamma1": one.to_json()},
    }
    for name, obj in data.items():
        (tmp_path / name).write_text(json.dumps(obj))
    return tmp_path


def test_check_reports(capsys, files_dir):
    code, rep = run(capsys, "check", files_dir / "fp.json")
    assert code == 0 and validated(rep)["result"]["n_angle"] is True
    assert rep["tool"] == {"name": "nangle", "version": __version__}
    code, rep = run(capsys, "check", files_dir / "zero.json")
    res = validated(rep)["result"]
    assert all(res[k] is True for k in ("candidate", "exact", "contractible", "n_angle"))
    code, rep = run(capsys, "check", files_dir / "bad.json")
    res = validated(rep)["result"]
    assert res["candidate"] is False
    assert res["exact"] is res["contractible"] is res["n_angle"] is res["decomposition"] is None


def test_cone_and_good(capsys, files_dir):
    assert validated(run(capsys, "cone", files_dir / "id.json")[1])["result"]["good"] is True
    assert validated(run(capsys, "cone", files_dir / "ex.json")[1])["result"]["good"] is False
    assert validated(run(capsys, "cone", files_dir / "zz.json")[1])["result"]["good"] is True
    assert validated(run(capsys, "good", files_dir / "id.json")[1])["verdict"] == "GOOD"


def test_fillin_middling_verdier_octa(capsys, files_dir):
    code, rep = run(capsys, "fillin", files_dir / "sq.json")
    assert code == 0 and validated(rep)["verdict"] == "FOUND"
    code, rep = run(capsys, "middling", files_dir / "id.json", "--rank-bound", 1)
    assert code == 0 and validated(rep)["verdict"] == "FOUND"
    jsonschema.validate(rep["result"]["diagram"], schema("middling_diagram.json"))
    code, rep = run(capsys, "verdier", files_dir / "id.json")
    assert code == 0 and validated(rep)["verdict"] == "FOUND"
    jsonschema.validate(rep["result"]["witness"], schema("verdier_witness.json"))
    code, rep = run(capsys, "octa", files_dir / "oct.json", "--seed", 3)
    assert code == 0 and validated(rep)["verdict"] == "FOUND"
    witness = rep["result"]["witness"]
    jsonschema.validate(witness, schema("octahedron_witness.json"))
    (files_dir / "w.json").write_text(json.dumps(witness))
    code, rep = run(capsys, "octa", files_dir / "w.json")
    assert code == 0 and validated(rep)["verdict"] == "VERIFIED"


def test_budget_exhaustion_exit_code(capsys, files_dir):
    code, rep = run(capsys, "middling", files_dir / "ex.json", "--budget", 50)
    assert code == 1 and validated(rep)["verdict"] == "NONE_WITHIN_BUDGET"


def test_counterexample_command(capsys):
    code, rep = run(capsys, "counterexample", "--n", 4, "--ring", "z4", "--rank-bound", 2)
    assert code == 0
    assert validated(rep)["verdict"] == "NONE_EXHAUSTIVE"
    assert rep["bounds"] == {"rank_bound": 2}
    assert rep["ring"] == Z4.to_json() and rep["budget"] == 10**6 and rep["seed"] == 0
    assert "jobs" not in json.dumps(rep)


def test_parity_error_exit(capsys):
    code, out, err = run_err(capsys, "counterexample", "--n", 5, "--ring", "z9")
    assert code == 2 and out == ""
    assert "parity" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "missing.json"],
        ["check", "--ring", "z6", "fp.json"],
        ["check", "--n", 5, "fp.json"],
        ["frobnicate"],
        ["middling", "--budget", 0, "id.json"],
    ],
)
def test_invalid_input_exit(capsys, files_dir, monkeypatch, argv):
    monkeypatch.chdir(files_dir)
    assert main([str(a) for a in argv]) == 2


def test_non_morphism_rejected(capsys, files_dir):
    obj = json.loads((files_dir / "id.json").read_text())
    obj["components"][0]["entries"] = [0]
    (files_dir / "nm.json").write_text(json.dumps(obj))
    assert main(["good", str(files_dir / "nm.json")]) == 2


def test_props_command(capsys):
    code, rep = run(capsys, "props", "--seed", 1, "--cases", 36)
    assert code == 0 and validated(rep)["verdict"] == "PASS"


def test_out_file_matches_stdout(capsys, files_dir):
    out = files_dir / "report.json"
    main(["check", str(files_dir / "fp.json"), "--out", str(out)])
    main(["check", str(files_dir / "fp.json")])
    assert out.read_text() == capsys.readouterr().out
