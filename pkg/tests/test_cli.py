"""Tests for the command line interface and state files."""
import numpy as np
import pytest

from nlwitness import cli
from nlwitness.statefile import StateFileError, format_state, parse_state, read_state, write_state
from nlwitness.states import sample_ginibre_state, singlet, werner


def test_state_round_trip(tmp_path, rng):
    rho = sample_ginibre_state((2, 3), rng)
    write_state(tmp_path / "s.txt", rho)
    back = read_state(tmp_path / "s.txt")
    assert back.dims == (2, 3)
    np.testing.assert_array_equal(back.mat, rho.mat)
    assert format_state(back) == format_state(rho)


@pytest.mark.parametrize("text,msg", [
    ("", "empty"),
    ("dim 2 2\n", "dims dA dB"),
    ("dims 2 x\n", "integers"),
    ("dims 2 2\n1 0 0 0\n", "expected 4 matrix rows"),
    ("dims 2 2\n1 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n", ":2: expected 4 entries"),
    ("dims 2 2\n1 0 0 abc\n0 0 0 0\n0 0 0 0\n0 0 0 0\n", "entry 4"),
    ("dims 2 2\n0.5 0.1 0 0\n0 0.5 0 0\n0 0 0 0\n0 0 0 0\n", "Hermitian"),
    ("dims 2 2\n0.5 0 0 0\n0 0.25 0 0\n0 0 0 0\n0 0 0 0\n", "trace"),
])
def test_state_parse_errors(text, msg):
    with pytest.raises(StateFileError, match=msg):
        parse_state(text, "f.txt")


def test_state_parse_comments():
    text = "# werner\ndims 2 2\n\n0.25 0 0 0\n0 0.25 0 0\n0 0 0.25 0\n0 0 0 0.25\n"
    np.testing.assert_allclose(parse_state(text).mat, np.eye(4) / 4)


def test_eval_all(tmp_path, capsys):
    write_state(tmp_path / "s.txt", singlet())
    assert cli.main(["eval", str(tmp_path / "s.txt"), "--alpha", str(np.pi / 4)]) == 0
    out = dict((ln.split()[0], ln.split()[1:]) for ln in capsys.readouterr().out.splitlines())
    assert set(out) == {"W", "F1", "F2", "NL5", "F3"}
    assert abs(float(out["W"][0]) + 0.5) < 1e-12
    assert abs(float(out["F2"][0]) + 0.75) < 1e-12
    assert abs(float(out["F1"][0]) + 1.0) < 1e-12
    assert all(v[1] == "detected" for v in out.values())


def test_eval_single_and_npt_generator(tmp_path, capsys):
    write_state(tmp_path / "w.txt", werner(0.8))
    assert cli.main(["eval", str(tmp_path / "w.txt"), "--criterion", "W"]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("W -0.35")


def test_eval_errors(tmp_path, capsys):
    write_state(tmp_path / "w.txt", werner(0.2))
    assert cli.main(["eval", str(tmp_path / "w.txt")]) == 2
    assert "not NPT" in capsys.readouterr().err
    assert cli.main(["eval", str(tmp_path / "missing.txt")]) == 4
    (tmp_path / "bad.txt").write_text("dims 2 2\n")
    assert cli.main(["eval", str(tmp_path / "bad.txt")]) == 2
    write_state(tmp_path / "s.txt", singlet())
    assert cli.main(["eval", str(tmp_path / "s.txt"), "--criterion", "F3"]) == 2


def test_sweep_outputs(tmp_path):
    args = ["sweep", "--alphas", "0,0.785398", "--samples", "50", "--csv", str(tmp_path / "a.csv"),
            "--plot", str(tmp_path / "a.dat"), "--svg", str(tmp_path / "a.svg"), "--seed", "7"]
    assert cli.main(args) == 0
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert len(lines) == 3 and lines[1].startswith("0.000000,50,")
    assert (tmp_path / "a.svg").exists() and (tmp_path / "a.dat").exists()


def test_sweep_grid_count_and_criteria(tmp_path):
    out = tmp_path / "b.csv"
    assert cli.main(["sweep", "--alphas", "3", "--samples", "20", "--criteria", "W,NL5", "--csv", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert [ln.split(",")[0] for ln in lines[1:]] == ["0.000000", "0.785398", "1.570796"]
    assert lines[1].split(",")[5] == ""


def test_sweep_exit_codes(tmp_path):
    csv = str(tmp_path / "c.csv")
    assert cli.main(["sweep", "--alphas", "2", "--samples", "5", "--radius", "-1", "--csv", csv]) == 2
    assert cli.main(["sweep", "--alphas", "1", "--samples", "5", "--sampler", "ginibre", "--max-tries", "2",
                     "--csv", csv]) == 3
    assert cli.main(["sweep", "--alphas", "1", "--samples", "5", "--csv", "/nonexistent/d/c.csv"]) == 4


def test_sweep_invariant_exit_code(tmp_path, monkeypatch):
    from nlwitness import experiment as ex

    def broken(stats, alpha):
        det = {c: stats[:, 1] < 1e9 for c in ex.CRITERIA}
        det["F2"] = np.zeros(len(stats), dtype=bool)
        return det

    monkeypatch.setattr(ex, "classify_stats", broken)
    assert cli.main(["sweep", "--alphas", "1", "--samples", "5", "--csv", str(tmp_path / "d.csv")]) == 5


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--criteria", "W,Q", "--csv", "x.csv"])
    assert exc.value.code == 2
