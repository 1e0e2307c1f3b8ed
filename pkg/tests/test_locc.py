import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qloss import qmath
from qloss.channels import LossParams, lossy_shared_state
from qloss.filters import KrausFilter, apply_local_filters
from qloss.locc import (
    lemma1_filter,
    lemma1_fidelity_at,
    lemma1_point,
    lemma1_raw,
    lemma1_verify,
    lemma1_weights,
    lemma2_bound,
    psi_plus_fidelity,
)
from qloss.states import BellFamily, bell_state

ts = st.floats(0.05, 1.0)
deltas = st.floats(1e-4, 0.2)


def test_rejects_zero_transmissivity_and_bad_delta():
    with pytest.raises(ValueError):
        lemma1_filter(LossParams(0.0, 0.5), 0.1)
    with pytest.raises(ValueError):
        lemma1_filter(LossParams(0.5, 0.5), 0.3)


def test_symmetric_filters_coincide():
    pf = lemma1_filter(LossParams(0.4, 0.4), 0.01)
    assert np.allclose(pf.a.m, pf.b.m)
    alpha, beta = lemma1_weights(LossParams(0.4, 0.4), 0.01)
    assert alpha == pytest.approx(beta)


@given(ts, ts, deltas)
def test_balance_condition_and_contraction(ta, tb, d):
    loss = LossParams(ta, tb)
    alpha, beta = lemma1_weights(loss, d)
    assert beta / alpha == pytest.approx(np.sqrt(ta / tb))
    pf = lemma1_filter(loss, d)
    for f in (pf.a, pf.b):
        assert np.linalg.norm(f.m, 2) <= 1 + 1e-12


@given(ts, ts, deltas)
def test_bound_and_support(ta, tb, d):
    r = lemma1_point(LossParams(ta, tb), d)
    assert r.bound_satisfied
    assert r.support_residual < 1e-10
    assert 0.0 <= r.fidelity <= 1.0


@given(ts, ts, deltas)
def test_raw_filter_weights_entrywise(ta, tb, d):
    # delta^4, delta^2 beta^2, delta^2 alpha^2 weights and the alpha beta coherence
    loss = LossParams(ta, tb)
    a, b = lemma1_raw(loss, d)
    alpha, beta = lemma1_weights(loss, d)
    rho = lossy_shared_state(BellFamily.PSI_PLUS, 0.5, loss)
    k = np.kron(a, b)
    out = k @ rho @ k.conj().T
    p00 = 0.5 * ((1 - ta) + (1 - tb))
    ref = np.zeros((4, 4), dtype=complex)
    ref[0, 0] = d**4 * p00
    ref[1, 1] = d**2 * beta**2 * 0.5 * tb
    ref[2, 2] = d**2 * alpha**2 * 0.5 * ta
    ref[1, 2] = ref[2, 1] = d**2 * alpha * beta * 0.5 * np.sqrt(ta * tb)
    assert np.abs(out - ref).max() < 1e-12
    # normalization: the raw success probability is delta^2
    assert np.trace(out).real == pytest.approx(d**2, rel=1e-12)


def test_filter_applied_through_generic_path():
    loss = LossParams(0.5, 0.5)
    pf = lemma1_filter(loss, 1e-2)
    out = apply_local_filters(lossy_shared_state("psi-plus", 0.5, loss), pf.a, pf.b)
    assert psi_plus_fidelity(out.state) >= 1 - 2e-4
    # P_succ tracks delta^2 alpha^2 T_A of the returned filter within a factor 4
    alpha = pf.a.m[1, 1].real
    assert 0.25 <= out.p_succ / (1e-4 * alpha**2 * 0.5) <= 4


@pytest.mark.parametrize("t", [0.2, 0.5, 0.8])
def test_verify_slope_and_monotone_limit(t):
    s = lemma1_verify(LossParams(t, t), [1e-1, 1e-2, 1e-3])
    assert s.passed
    assert abs(s.slope - 2) <= 0.1
    f = [r.fidelity for r in s.reports]
    assert f[0] < f[1] < f[2]


def test_matched_success_probability():
    r = lemma1_fidelity_at(LossParams(0.5, 0.5), 1e-4)
    assert r.p_succ == pytest.approx(1e-4, rel=1e-8)


def test_lemma2_lossless_is_perfect():
    r = lemma2_bound(1.0, restarts=2, grid_points=11)
    assert r.fidelity == pytest.approx(1.0, abs=1e-9)


def test_lemma2_bounded_below_one_at_half():
    r = lemma2_bound(0.5, restarts=3, grid_points=31, max_evals=5000)
    assert r.p_succ >= 1e-4
    assert r.fidelity <= 0.99
    assert r.fidelity >= r.grid_fidelity - 1e-9
    with pytest.raises(ValueError):
        lemma2_bound(0.0)


@given(st.floats(0.05, 1.0))
def test_phi_fidelity_scale_invariant(c):
    rho = lossy_shared_state("phi-plus", 0.5, LossParams(0.5, 0.5))
    rng = np.random.default_rng(0)
    m = rng.normal(size=(2, 2)) * 0.4
    phi = bell_state("phi-plus")
    f1 = qmath.pure_fidelity(phi, apply_local_filters(rho, KrausFilter(m), KrausFilter(m.T)).state)
    f2 = qmath.pure_fidelity(phi, apply_local_filters(rho, KrausFilter(c * m), KrausFilter(m.T)).state)
    assert f1 == pytest.approx(f2, abs=1e-12)
