import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import entropy as shannon

from qloss import qmath
from conftest import random_density

seeds = st.integers(0, 2**32 - 1)


def partial_trace_loops(rho, dims, keep):
    # independent reference: explicit index sums
    n = len(dims)
    t = rho.reshape(list(dims) * 2)
    for ax in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def test_ket_and_kron():
    assert np.allclose(qmath.ket(0, 1), [0, 1, 0, 0])
    a, b = np.arange(4.0).reshape(2, 2), np.eye(2) * 1j
    assert np.allclose(qmath.kron(a, b), np.kron(a, b))
    assert np.allclose(qmath.kron2(a, b), np.kron(a, b))


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(ValueError):
        qmath.eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


@given(seeds)
def test_eigenvalues_ascending_and_match_numpy(seed):
    rho = random_density(np.random.default_rng(seed), 4)
    w = qmath.eig_hermitian(rho)
    assert np.all(np.diff(w) >= -1e-15)
    assert np.allclose(w, np.sort(np.linalg.eigvals(rho).real), atol=1e-12)


def test_check_density_errors():
    with pytest.raises(ValueError):
        qmath.check_density(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        qmath.check_density(np.diag([1.2, -0.2]))
    qmath.check_density(np.diag([0.2, 0.3]), normalized=False)


@given(seeds, st.sampled_from([[2, 2], [2, 2, 2], [3, 2], [2, 3, 2]]))
def test_partial_trace_matches_loops(seed, dims):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, int(np.prod(dims)))
    keep = sorted(rng.choice(len(dims), size=rng.integers(1, len(dims) + 1), replace=False).tolist())
    out = qmath.partial_trace(rho, dims, keep)
    assert np.allclose(out, partial_trace_loops(rho, dims, keep), atol=1e-12)
    assert np.isclose(np.trace(out).real, 1.0)


def test_partial_trace_dim_mismatch():
    with pytest.raises(ValueError):
        qmath.partial_trace(np.eye(4) / 4, [2, 3], [0])


def test_entropy_examples():
    assert qmath.von_neumann_entropy(qmath.dm(qmath.ket(0))) == pytest.approx(0.0, abs=1e-12)
    assert qmath.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        qmath.von_neumann_entropy(np.diag([0.5, 0.6]))


@given(seeds)
def test_entropy_matches_shannon_of_spectrum(seed):
    rho = random_density(np.random.default_rng(seed), 4)
    ref = shannon(np.clip(np.linalg.eigvalsh(rho), 0, None), base=2)
    assert qmath.von_neumann_entropy(rho) == pytest.approx(ref, abs=1e-10)
    assert qmath.entropies(rho[None])[0] == pytest.approx(ref, abs=1e-10)


@given(seeds, st.integers(2, 4))
def test_entropy_unitary_invariance(seed, dim):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, dim)
    u, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    assert qmath.von_neumann_entropy(u @ rho @ u.conj().T) == pytest.approx(qmath.von_neumann_entropy(rho), abs=1e-9)


@given(seeds)
def test_pure_fidelity_bounds(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 2)
    phi = rng.normal(size=2) + 1j * rng.normal(size=2)
    phi /= np.linalg.norm(phi)
    f = qmath.pure_fidelity(phi, rho)
    assert 0.0 <= f <= 1.0
    assert qmath.pure_fidelity(phi, qmath.dm(phi)) == pytest.approx(1.0)


@given(seeds)
def test_apply_local_matches_full_kron(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 4)
    ks = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(2)]
    for target in (0, 1):
        full = [np.kron(k, np.eye(2)) if target == 0 else np.kron(np.eye(2), k) for k in ks]
        ref = sum(k @ rho @ k.conj().T for k in full)
        assert np.allclose(qmath.apply_local(rho, [2, 2], target, ks), ref, atol=1e-12)


def test_apply_local_changes_dimension():
    rho = np.eye(4, dtype=complex) / 4
    iso = np.eye(3, 2)
    out = qmath.apply_local(rho, [2, 2], 1, [iso])
    assert out.shape == (6, 6)
    assert np.allclose(out, np.kron(np.eye(2), iso @ iso.T) / 4)
