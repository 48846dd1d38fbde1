"""Backend parity between the compiled core and the numpy fallback."""
import numpy as np
import pytest

from nlwitness import kernels
from nlwitness import linalg as la
from nlwitness.states import bell_basis, boundary_state, ginibre_batch, phi_alpha

compiled = pytest.mark.skipif(kernels._core is None, reason="compiled core not built")


def _stats_reference(rhos, dA, dB, phi, psis):
    rows = []
    for r in rhos:
        R = la.partial_transpose(r, (dA, dB))
        eta = R @ phi
        rows.append([np.linalg.eigvalsh(la.hermitize(R))[0], np.vdot(phi, eta).real, np.vdot(eta, eta).real,
                     la.nuclear_norm_vec(eta, (dA, dB)) ** 2] + [abs(np.vdot(p, eta)) ** 2 for p in psis])
    return np.array(rows)


@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=compiled)])
@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
def test_pt_stats_matches_reference(backend, dims):
    g = np.random.default_rng(3)
    d = dims[0] * dims[1]
    rhos = ginibre_batch(40, d, g)
    phi = g.standard_normal(d) + 1j * g.standard_normal(d)
    phi /= np.linalg.norm(phi)
    psis = np.linalg.qr(g.standard_normal((d, d)) + 1j * g.standard_normal((d, d)))[0].T[:3]
    got = kernels.pt_stats(rhos, dims[0], dims[1], phi, psis, backend=backend)
    np.testing.assert_allclose(got, _stats_reference(rhos, *dims, phi, psis), atol=1e-12)


@compiled
def test_min_eigvalsh_parity():
    rhos = ginibre_batch(100, 6, np.random.default_rng(0))
    a = kernels.min_eigvalsh(rhos, backend="python")
    b = kernels.min_eigvalsh(rhos, backend="compiled")
    np.testing.assert_allclose(a, b, atol=1e-14)


def test_empty_batches():
    assert kernels.min_eigvalsh(np.empty((0, 4, 4))).shape == (0,)
    assert kernels.pt_stats(np.empty((0, 4, 4)), 2, 2, np.ones(4), np.eye(4)).shape == (0, kernels.NSTAT + 4)


@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=compiled)])
def test_stream_keys_distinct(backend):
    k = kernels.stream_keys(1, 0, np.arange(1000), backend=backend)
    assert len(np.unique(k)) == 1000
    assert not np.array_equal(k, kernels.stream_keys(1, 1, np.arange(1000), backend=backend))
    assert not np.array_equal(k, kernels.stream_keys(2, 0, np.arange(1000), backend=backend))


@compiled
def test_stream_keys_parity():
    o = np.arange(0, 2**40, 2**30, dtype=np.uint64)
    np.testing.assert_array_equal(kernels.stream_keys(2**63 + 5, 7, o, backend="python"),
                                  kernels.stream_keys(2**63 + 5, 7, o, backend="compiled"))


@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=compiled)])
def test_ball_samples_valid(backend):
    center = boundary_state(0.4).mat
    rhos, tries = kernels.sample_ball_batch(center, 0.2, 0, 11, 0, np.arange(200), 10_000, backend=backend)
    assert np.all(tries >= 1)
    for r in rhos:
        assert la.hs_norm(r - center) <= 0.2 + 1e-12
        assert abs(np.trace(r) - 1) < 1e-12
        np.testing.assert_allclose(r, r.conj().T, atol=1e-15)
        assert np.linalg.eigvalsh(r)[0] >= -1e-12


@compiled
@pytest.mark.parametrize("method,radius,center", [(0, 0.2, "boundary"), (1, 0.35, "mixed")])
def test_sampler_parity(method, radius, center):
    c = boundary_state(np.pi / 4).mat if center == "boundary" else np.eye(4, dtype=complex) / 4
    o = np.arange(50, 90)
    a, ta = kernels.sample_ball_batch(c, radius, method, 5, 3, o, 20_000, backend="python")
    b, tb = kernels.sample_ball_batch(c, radius, method, 5, 3, o, 20_000, backend="compiled")
    np.testing.assert_array_equal(ta, tb)
    np.testing.assert_allclose(a, b, atol=1e-15)


@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=compiled)])
def test_sampler_is_per_ordinal(backend):
    c = boundary_state(np.pi / 4).mat
    full, _ = kernels.sample_ball_batch(c, 0.2, 0, 9, 2, np.arange(30), 10_000, backend=backend)
    part, _ = kernels.sample_ball_batch(c, 0.2, 0, 9, 2, np.arange(10, 20), 10_000, backend=backend)
    np.testing.assert_array_equal(full[10:20], part)


@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=compiled)])
def test_sampler_exhaustion_flag(backend):
    pure = la.proj(la.ket(0, 0))
    _, tries = kernels.sample_ball_batch(pure, 0.05, 1, 1, 0, np.arange(4), 5, backend=backend)
    assert np.all(tries == -1)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.min_eigvalsh(np.eye(2)[None], backend="fortran")


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")


def test_bell_stats_sum_to_norm():
    rhos = ginibre_batch(20, 4, np.random.default_rng(1))
    psis = np.array([b.vec for b in bell_basis()])
    s = kernels.pt_stats(rhos, 2, 2, phi_alpha(0.3).vec, psis)
    np.testing.assert_allclose(s[:, kernels.NSTAT:].sum(axis=1), s[:, 2], atol=1e-14)
