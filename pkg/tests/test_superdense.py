import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qloss import qmath
from qloss.channels import LossParams, forward_channel, lossy_shared_state
from qloss.states import PAULIS, BellFamily
from qloss.superdense import (
    EncodingEnsemble,
    SDOptions,
    SDScheme,
    _damped_binary,
    _holevo_fast,
    binary_ensemble,
    classical_capacity,
    classical_capacity_grid,
    encoded_ensemble,
    holevo,
    mutual_info_max,
    percent_advantage,
    quantum_advantage,
    softmax,
)

ts = st.floats(0, 1)


def holevo_reference(states, probs):
    # explicit definition with the checked entropy routine
    avg = sum(p * s for p, s in zip(probs, states))
    return qmath.von_neumann_entropy(avg) - sum(p * qmath.von_neumann_entropy(s) for p, s in zip(probs, states))


def test_ensemble_validation():
    with pytest.raises(ValueError):
        EncodingEnsemble([0.5, 0.6], np.stack([np.eye(2) / 2] * 2))
    with pytest.raises(ValueError):
        EncodingEnsemble([0.5, 0.5], np.stack([np.eye(2) / 2] * 3))


def test_lossless_dense_coding_two_bits():
    rho = lossy_shared_state("psi-plus", 0.5, LossParams(1, 1))
    assert holevo(encoded_ensemble(rho, np.full(4, 0.25), 1.0)) == pytest.approx(2.0)


@given(st.floats(0.01, 0.99), ts, ts, ts, st.integers(0, 100))
def test_fast_holevo_matches_reference(p, ta, tb, tf, seed):
    rho = lossy_shared_state("phi-plus", p, LossParams(ta, tb))
    probs = softmax(np.random.default_rng(seed).normal(size=4))
    states = [forward_channel(np.kron(s, np.eye(2)) @ rho @ np.kron(s, np.eye(2)).conj().T, tf) for s in PAULIS]
    ref = holevo_reference(states, probs)
    assert holevo(encoded_ensemble(rho, probs, tf)) == pytest.approx(ref, abs=1e-9)
    assert _holevo_fast(rho, probs, tf) == pytest.approx(ref, abs=1e-9)


@given(ts, ts)
def test_binary_closed_form(eta, tf):
    plus, minus = binary_ensemble(eta, tf)
    closed = _damped_binary(eta, tf)
    assert np.allclose(closed[0], plus) and np.allclose(closed[1], minus)


def test_capacity_endpoints_and_oracle():
    assert classical_capacity(1.0)[0] == pytest.approx(1.0, abs=1e-6)
    assert classical_capacity(0.0)[0] == pytest.approx(0.0, abs=1e-9)
    for tf in (0.1, 0.5, 0.9):
        assert classical_capacity(tf)[0] == pytest.approx(classical_capacity_grid(tf, 120)[0], abs=3e-4)
        assert classical_capacity(tf)[0] >= classical_capacity_grid(tf, 120)[0] - 1e-9


def test_capacity_monotone_in_transmissivity():
    c = [classical_capacity(t)[0] for t in (0.1, 0.3, 0.5, 0.7, 0.9)]
    assert np.all(np.diff(c) > 0)


def test_percent_advantage():
    assert percent_advantage(2.0, 1.0) == pytest.approx(100.0)
    assert percent_advantage(1.0, 0.0) == float("inf")


def test_softmax_is_a_distribution():
    p = softmax(np.array([1000.0, 0.0, -5.0, 2.0]))
    assert p.sum() == pytest.approx(1.0) and np.all(p >= 0)


def test_optimum_beats_uniform_encoding():
    # uniform encoding of the maximally entangled pair is one feasible point of the search
    loss = LossParams(1, 1, 0.5)
    r = quantum_advantage("psi-plus", loss, "baseline", SDOptions(restarts=6))
    rho = lossy_shared_state("psi-plus", 0.5, loss)
    states = [forward_channel(np.kron(s, np.eye(2)) @ rho @ np.kron(s, np.eye(2)).conj().T, 0.5) for s in PAULIS]
    assert r.i_ab >= holevo_reference(states, np.full(4, 0.25)) - 1e-7
    assert r.q == pytest.approx(r.i_ab - r.capacity)


@settings(max_examples=3)
@given(st.floats(0.2, 0.8))
def test_filtered_schemes_contain_baseline(t):
    loss = LossParams(t, t, 0.5)
    opts = SDOptions(restarts=4)
    base = mutual_info_max("psi-plus", loss, "baseline", opts)
    nla = mutual_info_max("psi-plus", loss, "nla", opts)
    assert nla.objective >= base.objective - 1e-6
    assert nla.p_succ >= 1e-4
    assert 0 <= nla.extra["g_a"] <= 1 and len(nla.extra["p_k"]) == 4


def test_scheme_names():
    assert SDScheme("nla") is SDScheme.NLA
    with pytest.raises(ValueError):
        SDScheme("gains")
