import json
import subprocess
import sys

import numpy as np
import pytest

from kakopt.io import dump_matrix, matrix_from_json, matrix_to_json
from kakopt.linalg import expm_skew, frob, haar_su, spin_op
from kakopt.twoqubit import canonical_reconstruct


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "kakopt.cli", *args],
        capture_output=True,
        text=True,
    )


class TestIoRoundTrip:
    def test_matrix_json(self):
        m = haar_su(4, np.random.default_rng(0))
        back = matrix_from_json(matrix_to_json(m))
        assert frob(back - m) == 0.0

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            matrix_from_json({"n": 3, "re": [[1.0]], "im": [[0.0]]})


class TestDecompose(object):
    @pytest.mark.parametrize("family", ["sun-son", "su2n"])
    def test_round_trip(self, family, tmp_path):
        u = haar_su(4, np.random.default_rng(1))
        path = tmp_path / "u.json"
        dump_matrix(u, str(path))
        res = run_cli("decompose", "--family", family, "--input", str(path))
        assert res.returncode == 0, res.stderr
        out = json.loads(res.stdout)
        assert out["residual"] <= 1e-8
        assert len(out["cartan"]) in (4, 2)

    def test_bad_input_exits_nonzero(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 2, "re": [[1, 0], [0, 1]]}')
        res = run_cli("decompose", "--family", "sun-son", "--input", str(path))
        assert res.returncode == 1
        assert "error" in res.stderr


class TestCanonicalAndCoupling:
    def test_canonical(self, tmp_path):
        u = haar_su(4, np.random.default_rng(2))
        path = tmp_path / "u.json"
        dump_matrix(u, str(path))
        res = run_cli("canonical", "--input", str(path))
        assert res.returncode == 0, res.stderr
        out = json.loads(res.stdout)
        triple = np.array(out["triple"])
        k1 = matrix_from_json(out["k1"])
        k2 = matrix_from_json(out["k2"])
        assert frob(canonical_reconstruct(triple, k1, k2) - u) <= 1e-8

    def test_coupling(self, tmp_path):
        path = tmp_path / "j.json"
        path.write_text(json.dumps([[2.0, 0, 0], [0, 1.0, 0], [0, 0, 0.5]]))
        res = run_cli("coupling", "--J", str(path))
        assert res.returncode == 0, res.stderr
        out = json.loads(res.stdout)
        assert np.allclose(out["triple"], [2.0, 1.0, 0.5], atol=1e-9)


class TestMintime:
    def test_example(self):
        res = run_cli(
            "mintime", "--drift", "[1,0,0]", "--target", "[1,1,1]",
            "--orbit", "two-qubit",
        )
        assert res.returncode == 0, res.stderr
        out = json.loads(res.stdout)
        assert abs(out["T"] - 3.0) <= 1e-9
        assert len(out["weights"]) == 3

    def test_infeasible(self):
        res = run_cli("mintime", "--drift", "[0,0,0]", "--target", "[1,0,0]")
        assert res.returncode == 1
        assert "error" in res.stderr


class TestRoots:
    def test_twospin(self):
        res = run_cli("roots", "--pair", "twospin")
        assert res.returncode == 0, res.stderr
        out = json.loads(res.stdout)
        assert len(out) == 6
        assert sum(1 for r in out if r["fundamental"]) == 3
        assert all(r["multiplicity"] == 1 for r in out)

    def test_epr_multiplicities(self):
        res = run_cli("roots", "--pair", "epr")
        out = json.loads(res.stdout)
        assert sorted(r["multiplicity"] for r in out) == [1, 1, 2, 2]


class TestSimulate:
    def test_with_check(self, tmp_path):
        lam = np.array([0.9, 0.3, -0.4, -0.8])
        drift = -1j * np.diag(lam).astype(complex)
        path = tmp_path / "d.json"
        dump_matrix(drift, str(path))
        res = run_cli(
            "simulate", "--family", "sun-son:4", "--drift", str(path),
            "--segments", "4", "--seed", "7", "--check",
        )
        assert res.returncode == 0, res.stderr
        out = json.loads(res.stdout)
        assert out["cert"]["feasible"]
        assert out["slack"] >= -1e-7
        endpoint = matrix_from_json(out["endpoint"])
        assert frob(endpoint @ endpoint.conj().T - np.eye(4)) < 1e-9


class TestSynth:
    def test_success_exit_zero(self, tmp_path):
        target = haar_su(4, np.random.default_rng(3))
        tpath = tmp_path / "t.json"
        dump_matrix(target, str(tpath))
        jpath = tmp_path / "j.json"
        jpath.write_text(json.dumps([[1.0, 0, 0], [0, 0.6, 0], [0, 0, 0.2]]))
        res = run_cli("synth", "--target", str(tpath), "--J", str(jpath))
        assert res.returncode == 0, res.stderr
        out = json.loads(res.stdout)
        assert out["residual"] <= 1e-8
        assert out["T"] > 0
        total = sum(seg["t"] for seg in out["segments"])
        assert abs(total - out["T"]) <= 1e-12

    def test_zero_coupling_exit_nonzero(self, tmp_path):
        target = haar_su(4, np.random.default_rng(4))
        tpath = tmp_path / "t.json"
        dump_matrix(target, str(tpath))
        jpath = tmp_path / "j.json"
        jpath.write_text(json.dumps([[0.0] * 3] * 3))
        res = run_cli("synth", "--target", str(tpath), "--J", str(jpath))
        assert res.returncode == 1
        assert "error" in res.stderr


class TestReport:
    def test_writes_figures_and_tables(self, tmp_path):
        outdir = tmp_path / "rep"
        res = run_cli("report", "--outdir", str(outdir), "--seed", "1")
        assert res.returncode == 0, res.stderr
        written = json.loads(res.stdout)["written"]
        assert len(written) == 6
        for p in written:
            assert (tmp_path / "rep").exists()
        names = {p.split("/")[-1] for p in written}
        assert {"mintime.csv", "mintime.png", "contraction.csv",
                "contraction.png", "flow_deviation.csv",
                "flow_deviation.png"} == names
