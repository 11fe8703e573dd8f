import io
import json
import math

import numpy as np
import pytest

from dyafact import cli, operators


def run(argv):
    return cli.main(argv)


class TestEval:
    def test_psi_row(self, tmp_path, capsys):
        out = tmp_path / "psi.csv"
        rc = run(["eval", "--function", "psi", "--x-start", "1", "--points", "1",
                  "--tol", "1e-9", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("x_re,x_im,value_re,value_im,error_estimate,terms_total")
        assert "0.4227843351" in lines[1][:40] or "0.42278433" in lines[1]

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["eval", "--function", "ei-left", "--x-start", "1", "--x-stop", "4",
                "--points", "7", "--tol", "1e-8"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, tmp_path):
        out = tmp_path / "o.json"
        rc = run(["eval", "--function", "erfc", "--x-start", "1", "--points", "2",
                  "--x-stop", "2", "--format", "json", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["columns"][0] == "x_re"
        assert len(doc["rows"]) == 2

    def test_with_oracle_column(self, tmp_path):
        out = tmp_path / "o.csv"
        rc = run(["eval", "--function", "ei-stokes", "--x-start", "2", "--x-stop", "6",
                  "--points", "3", "--tol", "1e-8", "--with-oracle", "--out", str(out)])
        assert rc == 0
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        assert rows.shape[1] == 9
        assert rows[:, 8].max() < 3e-8

    def test_domain_error_exit_code(self):
        # ray pointing into the negative-imaginary cut
        rc = run(["eval", "--function", "ei-stokes", "--x-start", "1", "--x-stop", "3",
                  "--points", "2", "--ray-angle", "-90", "--tol", "1e-6"])
        assert rc == 2

    def test_unknown_function(self):
        rc = run(["eval", "--function", "zeta", "--x-start", "1", "--points", "1"])
        assert rc == 2


class TestPlan:
    def test_plan_prints(self, capsys):
        rc = run(["plan", "--function", "ei-stokes", "--x-start", "5", "--points", "1",
                  "--tol", "1e-5"])
        assert rc == 0
        text = capsys.readouterr().out
        assert "n_terms" in text and "predicted_error" in text


class TestFigures:
    def test_fig_terms(self, tmp_path):
        out = tmp_path / "terms.csv"
        assert run(["figure", "fig-terms", "--out", str(out)]) == 0
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        assert rows.shape == (30, 6)
        # series-0 term magnitude at m = 10 is well below 1e-3 at x = 5
        assert rows[9, 1] < 1e-3

    def test_fig_stokes_dichotomy(self, tmp_path):
        out = tmp_path / "stokes.csv"
        assert run(["figure", "fig-stokes", "--out", str(out)]) == 0
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        t, im_left, im_right = rows[:, 0], rows[:, 1], rows[:, 2]
        assert t[0] == 1.0 and t[-1] == 10.0
        sign_changes = int(np.sum(np.abs(np.diff(np.sign(im_right))) > 0))
        assert sign_changes >= 3
        mags = np.abs(im_left)
        assert all(mags[i + 1] <= mags[i] * 1.05 for i in range(len(mags) - 1))

    def test_fig_errors_smoke(self, tmp_path):
        out = tmp_path / "err.csv"
        assert run(["figure", "fig-errors", "--out", str(out)]) == 0
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        assert rows.shape[1] == 4 and rows[:, 1].max() < 3e-8


class TestCompare:
    def test_ei_left_report(self, capsys):
        rc = run(["compare", "--function", "ei-left", "--x-start", "5", "--tol", "1e-8"])
        assert rc == 0
        text = capsys.readouterr().out
        assert "dyadic factorial expansion" in text
        assert "classical factorial series" in text
        assert "asymptotic series" in text

    def test_ei_stokes_notes_divergence(self, capsys):
        rc = run(["compare", "--function", "ei-stokes", "--x-start", "5", "--tol", "1e-6"])
        assert rc == 0
        assert "divergent / no half-plane" in capsys.readouterr().out

    def test_unsupported(self):
        assert run(["compare", "--function", "psi", "--x-start", "2"]) == 2


class TestOperator:
    def _write_matrix(self, path, a):
        with open(path, "w") as fh:
            operators.write_matrix_text(a, fh)

    def test_resolvent_mode(self, tmp_path, capsys):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        a = (a + a.conj().T) / 2
        mpath = tmp_path / "m.txt"
        self._write_matrix(mpath, a)
        rc = run(["operator", "--matrix", str(mpath), "--mode", "resolvent",
                  "--lambda", "1.0", "--levels", "40"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        final = float(lines[-1].split("=")[-1])
        assert final <= 1e-6

    def test_inverse_mode(self, tmp_path, capsys):
        rng = np.random.default_rng(12)
        q, _ = np.linalg.qr(rng.standard_normal((8, 8)))
        a = (q * np.linspace(0.5, 8.0, 8)) @ q.T
        mpath = tmp_path / "spd.txt"
        self._write_matrix(mpath, (a + a.T) / 2)
        rc = run(["operator", "--matrix", str(mpath), "--mode", "inverse", "--levels", "36"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        errs = [float(l.split("=")[-1]) for l in lines]
        assert errs[-1] < 1e-9

    def test_power_mode(self, tmp_path, capsys):
        rng = np.random.default_rng(13)
        q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        a = (q * np.linspace(0.5, 4.0, 6)) @ q.T
        mpath = tmp_path / "spd.txt"
        self._write_matrix(mpath, (a + a.T) / 2)
        rc = run(["operator", "--matrix", str(mpath), "--mode", "power",
                  "--s", "0.5", "--levels", "60"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert float(lines[-1].split("=")[-1]) <= 1e-6

    def test_rejects_non_hermitian(self, tmp_path):
        mpath = tmp_path / "bad.txt"
        self._write_matrix(mpath, np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
        assert run(["operator", "--matrix", str(mpath)]) == 2

    def test_missing_file(self):
        assert run(["operator", "--matrix", "/nonexistent/m.txt"]) == 4
