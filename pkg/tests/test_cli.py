import csv
import json

import pytest

from quadcmc.cli import main, read_config_file, resolve_config, ConfigError
from quadcmc.report import ANCHORS, UnknownAnchor, VerificationReport

RUNS = {
    "verify-clifford": ["verify", "--samples", "100"],
    "verify-umbilical": ["verify", "--family", "umbilical", "--samples", "100"],
    "verify-counterexample": ["verify", "--family", "counterexample", "--samples", "100"],
    "verify-custom-v": ["verify", "--samples", "100", "--v", "1,0,0,0"],
    "geodesics-clifford": ["geodesics"],
    "geodesics-counterexample": ["geodesics", "--family", "counterexample"],
    "spectrum": ["spectrum", "--grid", "32"],
    "spectrum-minimal": ["spectrum", "--r", "0.7071067811865476", "--grid", "32"],
    "index-sweep": ["index-sweep"],
    "counterexample": ["counterexample", "--samples", "100"],
    "lemma22": ["lemma22", "--samples", "50"],
}


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    out = {}
    for name, argv in RUNS.items():
        target = tmp_path_factory.mktemp(name)
        code = main([*argv, "--out", str(target)])
        out[name] = (code, target, json.loads((target / "report.json").read_text()))
    return out


def test_every_anchor_is_exercised(runs):
    seen = {row["anchor"] for _, _, rep in runs.values() for row in rep["checks"].values()}
    assert seen == set(ANCHORS.values())


def test_reports_carry_schema_and_anchor(runs):
    for code, _, rep in runs.values():
        assert rep["schema"] == 1
        assert all(row["anchor"] in ANCHORS.values() for row in rep["checks"].values())
        assert code == (1 if rep["summary"]["fail"] else 0)


def test_expected_outcomes(runs):
    assert runs["verify-clifford"][0] == 0
    assert runs["geodesics-counterexample"][0] == 0
    assert runs["spectrum"][0] == 0
    # on the minimal torus ell_e = +-f_e, so the two families are not orthogonal
    code, _, rep = runs["spectrum-minimal"]
    assert code == 1 and rep["checks"]["spectrum.orthogonality"]["status"] == "fail"


def test_tables_are_written(runs):
    _, spec_dir, _ = runs["spectrum"]
    with open(spec_dir / "spectrum.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["p", "q", "mu", "mult", "jac", "class"]
    assert {r["class"] for r in rows} >= {"neg", "kernel", "pos"}
    _, geo_dir, _ = runs["geodesics-clifford"]
    lines = (geo_dir / "geodesic.tsv").read_text().splitlines()
    assert lines[0].startswith("# s\tx0")
    assert len({len(line.split("\t")) for line in lines[1:]}) == 1
    _, sweep_dir, _ = runs["index-sweep"]
    assert (sweep_dir / "index_sweep.tsv").exists() and (sweep_dir / "index_sweep.csv").exists()


def test_reports_are_byte_stable(tmp_path, capsys):
    argv = ["verify", "--samples", "100", "--seed", "7"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nfamily = umbilical\nc = 0.25\nsamples=150\ntol-grad = 1e-9\n")
    conf = resolve_config(["verify", "--config", str(cfg), "--c", "0.4"])
    assert conf.family == "umbilical" and conf.c == 0.4 and conf.samples == 150
    assert conf.tol["grad"] == 1e-9


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n")
    with pytest.raises(ConfigError):
        read_config_file(str(bad))
    bad.write_text("colour = red\n")
    assert main(["verify", "--config", str(bad)]) == 2
    bad.write_text("family = torus\n")
    assert main(["verify", "--config", str(bad)]) == 2
    assert main(["verify", "--config", str(tmp_path / "missing.cfg")]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--r", "1.5"],
        ["verify", "--family", "clifford", "--k", "0"],
        ["index-sweep", "--r-grid", ""],
        ["spectrum", "--family", "umbilical"],
        ["counterexample", "--m-freq", "3"],
        ["verify", "--v", "1,0,0"],
        ["verify", "--tol-grad", "-1"],
    ],
)
def test_configuration_errors_exit_with_two(argv, capsys):
    assert main(argv) == 2


def test_off_n_anchor_is_reported(capsys):
    code = main(["geodesics", "--anchor", "0.3,0.3", "--anchor-mode", "keep"])
    rep = json.loads(capsys.readouterr().out)
    assert code == 1
    assert rep["checks"]["geodesic.closed_form"]["detail"].startswith("AnchorNotOnN")
    assert rep["checks"]["geodesic.ell_law"]["status"] == "pass"


def test_report_rejects_unknown_anchor():
    rep = VerificationReport("x", {})
    with pytest.raises(UnknownAnchor):
        rep.add("a", "no.such.anchor", 0.0, 1.0)
