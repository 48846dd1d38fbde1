"""Tests for nlwitness.experiment."""
import numpy as np
import pytest

from nlwitness import experiment as ex
from nlwitness import kernels
from nlwitness.errors import InvariantViolation, NotNPTError, SamplerExhausted
from nlwitness.states import DensityMatrix, bell_basis, boundary_state, is_ppt, phi_alpha, singlet


def small_config(tmp_path=None, **kw):
    base = dict(alpha_grid=[0.0, 0.5, np.pi / 4], samples_per_alpha=300)
    base.update(kw)
    return ex.SweepConfig(**base)


def test_classify_singlet():
    det = ex.classify_sample(np.pi / 4, singlet())
    assert det["W"] and det["F1psi2"] and det["F2"] and det["NL5"]


@pytest.mark.parametrize("alpha", np.linspace(0, np.pi / 2, 9))
def test_classify_boundary_states(alpha):
    assert not any(ex.classify_sample(alpha, boundary_state(alpha), force=True).values())
    with pytest.raises(NotNPTError):
        ex.classify_sample(alpha, boundary_state(alpha))


@pytest.mark.parametrize("alpha", [0.1, 0.5, np.pi / 4, 1.2])
def test_batched_path_matches_reference(alpha):
    center = boundary_state(alpha).mat
    rhos, _ = kernels.sample_ball_batch(center, 0.2, 0, 17, 0, np.arange(400), 100_000)
    psis = np.array([b.vec for b in bell_basis()])
    stats = kernels.pt_stats(rhos, 2, 2, phi_alpha(alpha).vec, psis)
    det = ex.classify_stats(stats, alpha)
    checked = 0
    for k, r in enumerate(rhos):
        rho = DensityMatrix(r, (2, 2))
        if is_ppt(rho):
            assert not any(bool(det[c][k]) for c in ex.CRITERIA)
            continue
        ref = ex.classify_sample(alpha, rho)
        assert {c: bool(det[c][k]) for c in ex.CRITERIA} == ref
        checked += 1
    assert checked > 50


def test_f3_s_phi():
    assert abs(ex.f3_s_phi(0.3) - np.cos(0.3) ** 2) < 1e-15
    assert abs(ex.f3_s_phi(1.2) - np.sin(1.2) ** 2) < 1e-15
    assert ex.f3_s_phi(np.pi / 4) >= 0.5 - 1e-15


def test_check_relations_flags_violations():
    npt = np.array([True, True])
    det = {c: np.array([False, False]) for c in ex.CRITERIA}
    ex.check_relations(det, npt, 0.1)
    bad = dict(det, W=np.array([True, False]))
    with pytest.raises(InvariantViolation, match="W"):
        ex.check_relations(bad, npt, 0.1)
    fp = {c: np.array([True, False]) for c in ex.CRITERIA}
    with pytest.raises(InvariantViolation, match="PPT"):
        ex.check_relations(fp, np.array([False, True]), 0.1)


def test_config_validation():
    for kw in [dict(radius=0), dict(samples_per_alpha=0), dict(alpha_grid=[2.0]), dict(alpha_grid=[]),
               dict(sampler="uniform"), dict(criteria=("W", "XX")), dict(threads=0)]:
        with pytest.raises(ValueError):
            ex.run_sweep(small_config(**kw))


def test_row_invariants():
    rows = ex.run_sweep(small_config())
    assert len(rows) == 3
    for r in rows:
        d = r.detected
        assert max(d.values()) <= r.n_entangled <= r.n_sampled
        assert d["F2"] >= d["W"] and d["NL5"] >= d["F1psi2"] and d["NL5"] >= d["F2"]
        assert 0 < r.acc_rate <= 1
    assert rows[0].n_entangled > 0
    assert rows[2].fraction("F2") > rows[2].fraction("W")


def test_deterministic_csv(tmp_path):
    cfg = dict(alpha_grid=[np.pi / 4], samples_per_alpha=10)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    ex.run_sweep(ex.SweepConfig(csv_path=str(a), **cfg))
    ex.run_sweep(ex.SweepConfig(csv_path=str(b), **cfg))
    assert a.read_bytes() == b.read_bytes()


def test_thread_count_does_not_change_output():
    cfg = dict(alpha_grid=[0.3, np.pi / 4], samples_per_alpha=2500)
    one = ex.format_csv(ex.run_sweep(ex.SweepConfig(threads=1, **cfg)))
    four = ex.format_csv(ex.run_sweep(ex.SweepConfig(threads=4, **cfg)))
    assert one == four


@pytest.mark.skipif(kernels._core is None, reason="compiled core not built")
def test_backends_give_identical_csv():
    cfg = dict(alpha_grid=[0.2, np.pi / 4], samples_per_alpha=300)
    a = ex.format_csv(ex.run_sweep(ex.SweepConfig(backend="python", **cfg)))
    b = ex.format_csv(ex.run_sweep(ex.SweepConfig(backend="compiled", **cfg)))
    assert a == b


def test_csv_format():
    rows = [ex.SweepRow(0.1, 10, 4, 0.5, {c: 1 for c in ex.CRITERIA}),
            ex.SweepRow(0.2, 10, 0, 0.25, {c: 0 for c in ex.CRITERIA})]
    text = ex.format_csv(rows)
    lines = text.split("\n")
    assert lines[0] == ex.CSV_HEADER
    assert lines[0] == ("alpha,n_sampled,n_entangled,acc_rate,det_W,det_F1psi2,det_F2,det_NL5,det_F3,"
                        "frac_W,frac_F1psi2,frac_F2,frac_NL5,frac_F3")
    assert len(lines) == 4 and lines[-1] == ""
    assert lines[1] == "0.100000,10,4,0.500000,1,1,1,1,1,0.250000,0.250000,0.250000,0.250000,0.250000"
    assert "\r" not in text


def test_csv_blank_for_unselected_criteria():
    row = ex.SweepRow(0.1, 10, 4, 0.5, {c: 1 for c in ex.CRITERIA}, criteria=("W", "F2"))
    fields = ex.format_csv([row]).split("\n")[1].split(",")
    assert fields[4] == "1" and fields[5] == "" and fields[9] == "0.250000" and fields[10] == ""


def test_emitters(tmp_path):
    rows = ex.run_sweep(small_config(samples_per_alpha=50))
    ex.emit_csv(rows, tmp_path / "o.csv")
    ex.emit_plotdata(rows, tmp_path / "o.dat")
    ex.emit_svg(rows, tmp_path / "o.svg")
    first = (tmp_path / "o.csv").read_bytes()
    ex.emit_csv(rows, tmp_path / "o.csv")
    assert (tmp_path / "o.csv").read_bytes() == first
    dat = (tmp_path / "o.dat").read_text().splitlines()
    assert dat[0].startswith("#") and len(dat) == 4
    svg = (tmp_path / "o.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_emit_reports_path():
    with pytest.raises(OSError, match="/nonexistent/dir/x.csv"):
        ex.emit_csv([ex.SweepRow(0.1, 1, 0, 1.0, {c: 0 for c in ex.CRITERIA})], "/nonexistent/dir/x.csv")


def test_sampler_exhaustion_reports_rate():
    cfg = ex.SweepConfig(alpha_grid=[0.0], samples_per_alpha=5, sampler="ginibre", max_tries=3)
    with pytest.raises(SamplerExhausted, match="acceptance rate") as exc:
        ex.run_sweep(cfg)
    assert exc.value.acceptance_rate >= 0
