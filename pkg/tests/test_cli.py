"""Command line round trips: each subcommand, both formats, all exit codes."""

import json

import pytest

from cantorconj.bratteli import dump_diagram
from cantorconj.cli import run
from cantorconj import systems


DYADIC = systems.dyadic()
QUATERNARY = systems.quaternary()
TRIADIC = systems.triadic()
FIB = systems.fibonacci()


@pytest.fixture
def corpus(tmp_path):
    paths = {}
    named = [
        ("dyadic", DYADIC),
        ("quaternary", QUATERNARY),
        ("triadic", TRIADIC),
        ("fib", FIB),
    ]
    for name, d in named:
        p = tmp_path / (name + ".obd")
        dump_diagram(d, str(p))
        paths[name] = str(p)
    finite = tmp_path / "finite.obd"
    finite.write_text(
        json.dumps(
            {
                "format": "obd-v1",
                "kind": "explicit",
                "vertices": [1, 1, 1],
                "edges": [[[0, 0]], [[0, 0]]],
            }
        )
    )
    paths["finite"] = str(finite)
    bad = tmp_path / "bad.obd"
    bad.write_text("{not json")
    paths["bad"] = str(bad)
    return paths


def run_json(capsys, argv):
    rc = run(argv + ["--format", "json"])
    out = capsys.readouterr().out
    return rc, json.loads(out)


def test_validate_ok(corpus, capsys):
    rc, rep = run_json(capsys, ["validate", corpus["dyadic"]])
    assert rc == 0
    assert rep["ok"] is True
    assert rep["primitive"] is True


def test_validate_reports_broken_input(corpus, capsys):
    rc, rep = run_json(capsys, ["validate", corpus["bad"]])
    assert rc == 0
    assert rep["ok"] is False
    assert rep["issues"]


def test_heights(corpus, capsys):
    rc, rep = run_json(capsys, ["heights", corpus["dyadic"], "3"])
    assert rc == 0
    assert rep["heights"] == [8]


def test_heights_bad_file_is_input_error(corpus):
    assert run(["heights", corpus["bad"], "1", "--format", "json"]) == 1


def test_heights_past_last_level_is_capability_error(corpus):
    assert run(["heights", corpus["finite"], "7", "--format", "json"]) == 2


def test_k0_class(corpus, capsys):
    rc, rep = run_json(capsys, ["k0-class", corpus["dyadic"], "2", "0:1", "0:2"])
    assert rc == 0
    assert rep["element"] == {"level": 2, "vector": [2]}


def test_positivity_verdicts(corpus, capsys):
    rc, rep = run_json(capsys, ["positivity", corpus["fib"], "1", "1,-1"])
    assert rc == 0
    assert rep["verdict"] == "Positive"
    rc, rep = run_json(capsys, ["positivity", corpus["dyadic"], "1", "0"])
    assert rep["verdict"] == "Zero"
    rc, rep = run_json(capsys, ["positivity", corpus["dyadic"], "2", "-3"])
    assert rep["verdict"] == "Negative"


def test_spectrum_dyadic(corpus, capsys):
    rc, rep = run_json(capsys, ["spectrum", corpus["dyadic"]])
    assert rc == 0
    entries = {e["p"]: e["v"] for e in rep["spectrum"]["entries"]}
    assert entries == {2: "inf"}


def test_spectrum_triadic(corpus, capsys):
    rc, rep = run_json(capsys, ["spectrum", corpus["triadic"]])
    entries = {e["p"]: e["v"] for e in rep["spectrum"]["entries"]}
    assert entries == {3: "inf"}


def test_weak_with_certificate_roundtrip(corpus, tmp_path, capsys):
    rc, rep = run_json(capsys, ["weak", corpus["dyadic"], corpus["quaternary"]])
    assert rc == 0
    assert rep["verdict"] == "weak"
    cert = rep["certificate"]
    cp = tmp_path / "weak.cert.json"
    cp.write_text(json.dumps(cert))
    rc, chk = run_json(
        capsys, ["verify", str(cp), corpus["dyadic"], corpus["quaternary"]]
    )
    assert rc == 0
    assert chk["ok"] is True
    cert["witness"]["forward"][0]["matrix"][0][0] += 1
    cp.write_text(json.dumps(cert))
    rc, chk = run_json(
        capsys, ["verify", str(cp), corpus["dyadic"], corpus["quaternary"]]
    )
    assert rc == 0
    assert chk["ok"] is False


def test_weak_negative_witness(corpus, capsys):
    rc, rep = run_json(capsys, ["weak", corpus["dyadic"], corpus["triadic"]])
    assert rc == 0
    assert rep["verdict"] == "not"
    assert rep["witness"] == 2


def test_tau_verdicts(corpus, capsys):
    rc, rep = run_json(capsys, ["tau", corpus["dyadic"], corpus["quaternary"]])
    assert rc == 0
    assert rep["verdict"] == "tau"
    rc, rep = run_json(capsys, ["tau", corpus["fib"], corpus["dyadic"]])
    assert rep["verdict"] == "not"


def test_tau_certificate_roundtrip(corpus, tmp_path, capsys):
    rc, rep = run_json(capsys, ["tau", corpus["dyadic"], corpus["quaternary"]])
    cp = tmp_path / "tau.cert.json"
    cp.write_text(json.dumps(rep["certificate"]))
    rc, chk = run_json(
        capsys, ["verify", str(cp), corpus["dyadic"], corpus["quaternary"]]
    )
    assert chk["ok"] is True


def test_kconj_certificate_roundtrip(corpus, tmp_path, capsys):
    rc, rep = run_json(capsys, ["kconj", corpus["dyadic"], corpus["quaternary"]])
    assert rc == 0
    assert rep["verdict"] == "k-conjugate"
    assert rep["ladder"]["a_levels"] == [1, 3, 5]
    cp = tmp_path / "ladder.cert.json"
    cp.write_text(json.dumps(rep["certificate"]))
    rc, chk = run_json(
        capsys, ["verify", str(cp), corpus["dyadic"], corpus["quaternary"]]
    )
    assert chk["ok"] is True
    # binding: the same certificate against swapped systems must fail
    rc, chk = run_json(
        capsys, ["verify", str(cp), corpus["quaternary"], corpus["dyadic"]]
    )
    assert chk["ok"] is False


def test_kconj_obstructed(corpus, capsys):
    rc, rep = run_json(capsys, ["kconj", corpus["fib"], corpus["dyadic"]])
    assert rc == 0
    assert rep["verdict"] == "not"
    kinds = {o["kind"] for o in rep["obstructions"]}
    assert "trace" in kinds


def test_kconj_reports_bounds(corpus, capsys):
    rc, rep = run_json(capsys, ["kconj", corpus["dyadic"], corpus["quaternary"]])
    assert rep["bounds"]["depth"] == 40
    assert rep["bounds"]["primes"] == 97
    assert rep["bounds"]["span"] == 12


def test_conjugator_roundtrip(corpus, tmp_path, capsys):
    rc, rep = run_json(
        capsys, ["conjugator", corpus["dyadic"], corpus["quaternary"], "2"]
    )
    assert rc == 0
    assert rep["verdict"] == "ok"
    assert rep["element"]["level"] >= 1
    cp = tmp_path / "conj.cert.json"
    cp.write_text(json.dumps(rep["certificate"]))
    rc, chk = run_json(capsys, ["verify", str(cp), corpus["quaternary"]])
    assert chk["ok"] is True


def test_conjugator_obstructed(corpus, capsys):
    rc, rep = run_json(
        capsys, ["conjugator", corpus["dyadic"], corpus["triadic"], "2"]
    )
    assert rc == 0
    assert rep["verdict"] == "failed"
    assert rep["stage"] == "morphism"
    assert rep["obstruction"]["witness"] == 2


def test_vershik_orbit(corpus, capsys):
    rc, rep = run_json(capsys, ["vershik", corpus["dyadic"], "--level", "2"])
    assert rc == 0
    assert rep["height"] == 4
    floors = [step["floor"] for step in rep["orbit"]]
    assert floors == [1, 2, 3, 4]
    assert rep["orbit"][0]["path"] == [[0, 0], [0, 0]]
    assert rep["orbit"][-1]["successor"] == "max"
    assert all(step["successor"] == "next" for step in rep["orbit"][:-1])


def test_vershik_limit(corpus, capsys):
    rc, rep = run_json(
        capsys, ["vershik", corpus["dyadic"], "--level", "3", "--limit", "3"]
    )
    assert rc == 0
    assert [step["floor"] for step in rep["orbit"]] == [1, 2, 3]


def test_vershik_capability_bound(corpus):
    assert run(["vershik", corpus["dyadic"], "--level", "13", "--format", "json"]) == 2


def test_frobenius(capsys):
    rc, rep = run_json(capsys, ["frobenius", "3", "5"])
    assert rc == 0
    assert rep["threshold"] == 8


def test_frobenius_rejects_non_coprime():
    assert run(["frobenius", "2", "4", "--format", "json"]) == 1


def test_out_flag_writes_file(corpus, tmp_path, capsys):
    target = tmp_path / "report.json"
    rc = run(
        ["heights", corpus["dyadic"], "2", "--format", "json", "--out", str(target)]
    )
    assert rc == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["heights"] == [4]


def test_table_format_is_default(capsys):
    rc = run(["frobenius", "3", "5"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "threshold: 8" in out


def test_unknown_subcommand_is_usage_error():
    assert run(["no-such-command"]) == 1


def test_missing_argument_is_usage_error():
    assert run(["heights"]) == 1


def test_missing_file_is_input_error(tmp_path):
    assert run(["heights", str(tmp_path / "nope.obd"), "1"]) == 1
