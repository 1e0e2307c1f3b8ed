import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qloss import qmath
from qloss.states import (
    PAULIS,
    BellFamily,
    bell_state,
    bloch_state,
    entangled_state,
    pauli,
    sample_bloch,
)


def test_family_parse_aliases():
    assert BellFamily.parse("psi-plus") is BellFamily.PSI_PLUS
    assert BellFamily.parse("phi-plus") is BellFamily.PHI_PLUS
    assert BellFamily.parse(BellFamily.PHI_PLUS) is BellFamily.PHI_PLUS
    with pytest.raises(ValueError):
        BellFamily.parse("omega")


def test_bell_states():
    s = 1 / np.sqrt(2)
    assert np.allclose(bell_state("psi-plus"), [0, s, s, 0])
    assert np.allclose(bell_state("phi-plus"), [s, 0, 0, s])


@given(st.floats(0, 1), st.sampled_from(list(BellFamily)))
def test_entangled_state_normalized(p, fam):
    v = entangled_state(fam, p)
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_entangled_state_weights():
    v = entangled_state("psi-plus", 0.3)
    assert abs(v[1]) ** 2 == pytest.approx(0.3) and abs(v[2]) ** 2 == pytest.approx(0.7)
    with pytest.raises(ValueError):
        entangled_state("psi-plus", 1.5)


def test_paulis():
    x, z = PAULIS[1], PAULIS[2]
    assert np.allclose(pauli(3), z @ x)
    for p in PAULIS:
        assert np.allclose(p.conj().T @ p, np.eye(2))
    with pytest.raises(ValueError):
        pauli(4)


def test_sample_bloch_reproducible_and_prefix():
    a = sample_bloch(7, 300)
    assert a.shape == (300, 2)
    assert np.array_equal(a, sample_bloch(7, 300))
    assert np.array_equal(sample_bloch(7, 10), a[:10])
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)


def test_sample_bloch_is_isotropic():
    # Bloch vectors of uniform states average to zero, second moments to I/3
    phis = sample_bloch(0, 20000)
    rhos = np.einsum("ni,nj->nij", phis, phis.conj())
    r = np.stack([np.einsum("nij,ji->n", rhos, p).real for p in (PAULIS[1], -1j * PAULIS[2] @ PAULIS[1], PAULIS[2])], 1)
    assert np.abs(r.mean(0)).max() < 0.02
    assert np.abs(r.T @ r / len(r) - np.eye(3) / 3).max() < 0.02


def test_bloch_state_poles():
    assert np.allclose(bloch_state(0.0, 1.0), [1, 0])
    assert qmath.pure_fidelity(np.array([0, 1]), qmath.dm(bloch_state(np.pi, 0.0))) == pytest.approx(1.0)
