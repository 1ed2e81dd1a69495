from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from multifrey import __version__
from multifrey.cli import main
from multifrey.frey import FreyC7, FreyE


@pytest.fixture
def runner():
    return CliRunner()


def naive_affine_count(coeffs, q):
    """Points of y^2 = f(x) over F_q with one point at infinity."""
    n = 1
    for x in range(q):
        fx = sum(c * pow(x, i, q) for i, c in enumerate(coeffs)) % q
        n += sum(1 for y in range(q) if y * y % q == fx)
    return n


class TestCount:
    def test_C7(self, runner):
        r = runner.invoke(main, ["count", "--curve", "C7", "--a", "1", "--b", "2", "--q", "11"])
        assert r.exit_code == 0
        assert int(r.output) == naive_affine_count(FreyC7(1, 2).coefficients, 11)

    def test_E(self, runner):
        r = runner.invoke(main, ["count", "--curve", "E", "--a", "1", "--b", "0", "--q", "13"])
        a2, a4, a6 = FreyE(1, 0).coefficients
        assert int(r.output) == naive_affine_count((a6, a4, a2, 1), 13)

    def test_F_lists_primes(self, runner):
        r = runner.invoke(main, ["count", "--curve", "F", "--a", "1", "--b", "2", "--q", "13", "--delta", "-7"])
        assert r.exit_code == 0 and len(r.output.splitlines()) == 3

    def test_bad_reduction(self, runner):
        r = runner.invoke(main, ["count", "--curve", "C7", "--a", "1", "--b", "2", "--q", "43"])
        assert r.exit_code == 1 and "bad reduction" in r.output


def test_tq_csv(runner):
    r = runner.invoke(main, ["tq", "--q", "13", "--pairs", "0,1;1,12"])
    assert r.exit_code == 0
    assert r.output.splitlines() == ["q,x,y,trace_set", '13,0,1,"(0,0,0)"', "13,1,12,bad"]


def test_tq_rejects_7(runner):
    assert runner.invoke(main, ["tq", "--q", "7"]).exit_code == 2


def test_info_and_version(runner):
    assert "kernels:" in runner.invoke(main, ["info"]).output
    assert __version__ in runner.invoke(main, ["--version"]).output


class TestProve:
    def test_overq_complete(self, runner, tmp_path):
        out = tmp_path / "c.json"
        r = runner.invoke(main, ["prove", "--theorem", "overQ", "--out", str(out)])
        assert r.exit_code == 0, r.output
        assert json.loads(out.read_text())["conclusion"] == "complete"
        assert "conclusion: complete" in r.stderr

    def test_byte_identical(self, runner, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        runner.invoke(main, ["prove", "--theorem", "overQ", "--out", str(a)])
        runner.invoke(main, ["prove", "--theorem", "overQ", "--out", str(b), "--jobs", "2"])
        assert a.read_bytes() == b.read_bytes()

    def test_missing_fixtures_exit(self, runner):
        r = runner.invoke(main, ["prove", "--theorem", "main-fastest"])
        assert r.exit_code == 3
        assert "q2^2q3q7" in r.stderr

    def test_incomplete_exit(self, runner):
        # with q = 3 alone the 392 forms are not all separated from E
        r = runner.invoke(main, ["prove", "--theorem", "overQ", "--aux-primes", "3"])
        assert r.exit_code == 2
        assert "conclusion: incomplete" in r.stderr

    def test_route_only_for_main(self, runner):
        r = runner.invoke(main, ["prove", "--theorem", "overQ", "--route", "fastest"])
        assert r.exit_code == 2 and "--route" in r.output

    def test_cap_is_usage_error(self, runner):
        r = runner.invoke(main, ["prove", "--theorem", "overQ", "--max-enum", "50"])
        assert r.exit_code == 2

    def test_bad_aux_list(self, runner):
        assert runner.invoke(main, ["prove", "--theorem", "overQ", "--aux-primes", "3,x"]).exit_code == 2


class TestVerify:
    def test_clean_and_tampered(self, runner, tmp_path):
        cert = tmp_path / "c.json"
        runner.invoke(main, ["prove", "--theorem", "overQ", "--out", str(cert)])
        r = runner.invoke(main, ["verify", str(cert), "--fraction", "1", "--seed", "0"])
        assert r.exit_code == 0 and "0 mismatches" in r.output
        data = json.loads(cert.read_text())
        form = next(f for c in data["cases"] for f in c["forms"] if f["bounds"])
        for entry in form["bounds"].values():
            entry["sha256"] = "f" * 64
        cert.write_text(json.dumps(data))
        r = runner.invoke(main, ["verify", str(cert), "--fraction", "1", "--seed", "0"])
        assert r.exit_code == 1


def test_bounds_listing(runner):
    r = runner.invoke(main, ["bounds", "--level", "196", "--q", "3,5,11"])
    assert r.exit_code == 0
    lines = r.output.splitlines()
    assert any(line.startswith("196.a") for line in lines)
    assert "  survivors: self-survivor" in lines


def test_bounds_missing_level(runner):
    assert runner.invoke(main, ["bounds", "--level", "q2q3", "--q", "5"]).exit_code == 3


def test_modsym_writes_fixture(runner, tmp_path):
    r = runner.invoke(main, ["modsym", "--level", "11", "--bound", "20", "--out", str(tmp_path)])
    assert r.exit_code == 0
    data = json.loads((tmp_path / "classical_11.json").read_text())
    assert data["level"] == {"N": 11} and len(data["forms"]) == 1


def test_fetch_reports_network_failure(runner, monkeypatch, tmp_path):
    from multifrey import lmfdb

    def boom(level, bound):
        raise lmfdb.LMFDBError("unreachable")

    monkeypatch.setattr(lmfdb, "fetch_classical_records", boom)
    r = runner.invoke(main, ["fetch", "--level", "11", "--out", str(tmp_path)])
    assert r.exit_code == 1 and "unreachable" in r.output
