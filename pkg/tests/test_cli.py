import json

import numpy as np
import pytest

from polity import core
from polity.cli import run
from polity.io import write_matrix
from polity.structures import gen_correlation_case, mix_uniform

CASE1 = np.asarray(gen_correlation_case(1))


def report(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    assert code == 0, out.err
    return json.loads(out.out)


@pytest.fixture
def case_file(tmp_path):
    path = tmp_path / "case.csv"
    write_matrix(CASE1, path)
    return str(path)


@pytest.fixture
def positive_file(tmp_path, rng):
    m = rng.uniform(0.1, 1, (4, 4))
    path = tmp_path / "pos.json"
    write_matrix(m / m.sum(axis=1, keepdims=True), path)
    return str(path)


class TestAnalysis:
    def test_power(self, capsys, positive_file):
        rep = report(capsys, ["power", positive_file])
        assert rep["command"] == "power"
        assert sum(rep["results"]["omega"]) == pytest.approx(1.0)
        assert rep["results"]["agree"] is True
        assert len(rep["inputs"]["matrix"]["sha256"]) == 64

    def test_elect_case(self, capsys, case_file):
        rep = report(capsys, ["elect", case_file, "--candidates", "3,4"])
        assert np.allclose(rep["results"]["D"], [[0.8, 0.2], [0.8, 0.2]])
        assert rep["results"]["voters"] == [1, 2]

    def test_elect_explicit_voters(self, capsys, case_file):
        rep = report(capsys, ["elect", case_file, "--candidates", "3,4", "--voters", "1"])
        assert np.allclose(rep["results"]["D"], [[0.8, 0.2]])

    def test_families_tree(self, capsys, tmp_path):
        path = tmp_path / "tree.csv"
        assert run(["gen", "tree", "--parents", "1,1,1,2,2,3", "--out", str(path)]) == 0
        rep = report(capsys, ["families", str(path), "--threshold", "0.01"])
        res = rep["results"]
        assert res["upper_class"] == [[1]]
        assert len(res["families"]) == 16
        assert res["connected"] is True

    def test_families_too_many(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("POLITY_MAX_N", "3")
        path = tmp_path / "id.csv"
        write_matrix(mix_uniform(np.eye(5), 1e-4), path)
        rep = report(capsys, ["families", str(path)])
        assert rep["results"]["families"] is None
        assert len(rep["results"]["upper_class"]) == 5
        assert rep["diagnostics"]

    def test_perturb(self, capsys, tmp_path):
        path = tmp_path / "fs.csv"
        assert run(["gen", "father-sons", "--k", "4", "--out", str(path)]) == 0
        rep = report(capsys, ["perturb", str(path), "--candidates", "3,4"])
        res = rep["results"]
        assert np.allclose(res["dominated_power"]["omega_hat"], [1, 0, 0, 0])
        assert np.allclose(res["limit_support"]["D"], [[0.5, 0.5], [0.5, 0.5]])
        assert res["consensus"][0]["family"] == [1]
        assert len(res["residuals"]) == 3

    def test_simulate_deterministic(self, capsys, case_file, tmp_path):
        outs = []
        for k, workers in enumerate(("1", "3")):
            out = tmp_path / f"r{k}.json"
            assert run(["simulate", case_file, "--candidates", "3,4", "--trials", "150000",
                        "--seed", "42", "--workers", workers, "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        capsys.readouterr()
        rep = json.loads(outs[0])
        assert outs[0].replace(b'"workers": 1', b'"workers": 3') == outs[1]
        assert rep["results"]["trials"] == 150000

    def test_simulate_marginal_mode(self, capsys, case_file):
        rep = report(capsys, ["simulate", case_file, "--candidates", "3,4", "--trials",
                              "1000", "--mode", "marginal"])
        assert rep["results"]["joint"] == []


class TestGen:
    @pytest.mark.parametrize("argv", [
        ["father-sons", "--k", "3"],
        ["father-sons", "--k", "3", "--leader-row", "0.5,0.3,0.2"],
        ["equality", "--k", "4", "--s", "0.2"],
        ["case", "--case", "2", "--eps", "0.01"],
        ["tree", "--parents", "1,1,2"],
    ])
    def test_outputs_politics_matrix(self, capsys, argv):
        assert run(["gen", *argv]) == 0
        rows = [list(map(float, line.split(","))) for line in capsys.readouterr().out.split()]
        m = np.array(rows)
        assert np.all(m > 0) and np.allclose(m.sum(axis=1), 1)

    def test_no_mix_keeps_zeros(self, capsys):
        assert run(["gen", "father-sons", "--k", "2", "--mix", "0", "--format", "json"]) == 0
        assert json.loads(capsys.readouterr().out)["rows"] == [[1.0, 0.0], [1.0, 0.0]]

    def test_garden(self, capsys, tmp_path):
        b = tmp_path / "b.csv"
        write_matrix(np.array([[-1.0, 1.0], [1.0, -1.0]]), b)
        assert run(["gen", "garden", "--b", str(b), "--eps", "0.1"]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "0.9,0.1"


class TestErrors:
    def test_row_sum_violation(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.5,0.6\n0.5,0.5\n")
        assert run(["power", str(path)]) == 1
        assert "row 1" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert run(["power", "/nonexistent/m.csv"]) == 1

    def test_usage(self, capsys):
        assert run(["elect"]) == 1
        assert run(["gen", "tree"]) == 1

    def test_zero_index(self, capsys, case_file):
        assert run(["elect", case_file, "--candidates", "0"]) == 1

    def test_numerical_failure(self, capsys, tmp_path):
        path = tmp_path / "tree.csv"
        write_matrix(np.array([[1.0, 0, 0], [1.0, 0, 0], [0, 1.0, 0]]), path)
        assert run(["elect", str(path), "--candidates", "3"]) == 2
        assert "1" in capsys.readouterr().err

    def test_rank_tol_restored(self, capsys, case_file):
        before = core.RANK_TOL
        run(["--rank-tol", "1e-6", "elect", case_file, "--candidates", "3,4"])
        assert core.RANK_TOL == before
