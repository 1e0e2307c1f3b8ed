"""Recoverability of lossy Bell pairs under product local filters.

For the lossy ``psi+`` pair, filters ``A = diag(d, alpha)`` and
``B = diag(d, beta)`` with ``beta/alpha = sqrt(T_A/T_B)`` suppress the vacuum
by ``d^2`` and leave ``lam |00><00| + (1-lam) |psi+><psi+|`` with
``lam = d^2 p00``; the success probability falls as ``d^2``. No product filter
does the same for ``phi+``, which we exhibit as a bounded search result.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import qmath
from .channels import LossParams, lossy_shared_state
from .filters import KrausFilter, apply_local_filters, filter_matrix, povm_from_params
from .optimize import Objective, brute_grid, multistart_maximize, with_success_penalty
from .states import BellFamily, bell_state
from .teleport import SUCCESS_MARGIN


@dataclass(frozen=True)
class ProductFilter:
    a: KrausFilter
    b: KrausFilter

    @property
    def k(self) -> np.ndarray:
        return np.kron(self.a.m, self.b.m)


@dataclass(frozen=True)
class LemmaReport:
    delta: float
    fidelity: float
    p_succ: float
    bound_satisfied: bool
    support_residual: float = 0.0


def _populations(loss: LossParams) -> tuple[float, float, float]:
    ta, tb = loss.t_a, loss.t_b
    return 0.5 * ((1 - ta) + (1 - tb)), 0.5 * tb, 0.5 * ta


def lemma1_weights(loss: LossParams, delta: float) -> tuple[float, float]:
    """``(alpha, beta)`` balancing the one-photon block and normalizing the output.

    The conditional state then carries vacuum weight exactly ``delta^2 p00``.
    """
    if loss.t_a <= 0 or loss.t_b <= 0:
        raise ValueError("both transmissivities must be positive")
    if not 0 < delta <= 0.2:
        raise ValueError("delta must lie in (0, 0.2]")
    p00, _, _ = _populations(loss)
    scale = 1.0 - delta**2 * p00
    return float(np.sqrt(scale / loss.t_a)), float(np.sqrt(scale / loss.t_b))


def lemma1_raw(loss: LossParams, delta: float) -> tuple[np.ndarray, np.ndarray]:
    alpha, beta = lemma1_weights(loss, delta)
    return np.diag([delta, alpha]).astype(complex), np.diag([delta, beta]).astype(complex)


def lemma1_filter(loss: LossParams, delta: float) -> ProductFilter:
    """Contraction-normalized version of :func:`lemma1_raw`.

    Each factor is divided by its largest diagonal entry (if above 1); the
    conditional state is unchanged and only the success probability scales.
    """
    a, b = lemma1_raw(loss, delta)
    return ProductFilter(KrausFilter(a / max(1.0, a.real.max())), KrausFilter(b / max(1.0, b.real.max())))


def psi_plus_fidelity(state: np.ndarray) -> float:
    return qmath.pure_fidelity(bell_state(BellFamily.PSI_PLUS), state)


def lemma1_point(loss: LossParams, delta: float) -> LemmaReport:
    rho = lossy_shared_state(BellFamily.PSI_PLUS, 0.5, loss)
    pf = lemma1_filter(loss, delta)
    out = apply_local_filters(rho, pf.a, pf.b, 1)
    f = psi_plus_fidelity(out.state)
    lam = out.state[0, 0].real
    psi = bell_state(BellFamily.PSI_PLUS)
    target = lam * qmath.dm(qmath.ket(0, 0)) + (1 - lam) * qmath.dm(psi)
    return LemmaReport(
        delta=float(delta),
        fidelity=f,
        p_succ=out.p_succ,
        bound_satisfied=bool(f >= 1 - 2 * delta**2),
        support_residual=float(np.abs(out.state - target).max()),
    )


@dataclass
class Lemma1Summary:
    reports: list
    slope: float
    slope_ok: bool

    @property
    def passed(self) -> bool:
        return self.slope_ok and all(r.bound_satisfied for r in self.reports)


def lemma1_verify(loss: LossParams, deltas: Sequence[float]) -> Lemma1Summary:
    """Fidelity bound at each ``delta`` and the log-log slope of ``P_succ`` against ``delta``."""
    reports = [lemma1_point(loss, d) for d in deltas]
    if len(reports) >= 2:
        slope = float(np.polyfit(np.log([r.delta for r in reports]), np.log([r.p_succ for r in reports]), 1)[0])
    else:
        slope = float("nan")
    return Lemma1Summary(reports, slope, bool(abs(slope - 2.0) <= 0.1))


def lemma1_fidelity_at(loss: LossParams, p_target: float) -> LemmaReport:
    """Lemma-1 filter whose success probability equals ``p_target``."""
    hi = lemma1_point(loss, 0.2)
    if hi.p_succ <= p_target:
        return hi
    ld = brentq(lambda x: np.log(lemma1_point(loss, np.exp(x)).p_succ / p_target), np.log(1e-12), np.log(0.2), xtol=1e-12)
    return lemma1_point(loss, float(np.exp(ld)))


# --- phi+ -------------------------------------------------------------------


@dataclass
class Lemma2Result:
    t: float
    fidelity: float
    p_succ: float
    filter: ProductFilter
    grid_fidelity: float
    converged: bool = True
    extra: dict = field(default_factory=dict)


def _phi_objective(rho: np.ndarray) -> Objective:
    phi = bell_state(BellFamily.PHI_PLUS)

    def evaluate(x):
        k = qmath.kron2(filter_matrix(x[:8]), filter_matrix(x[8:]))
        un = k @ rho @ k.conj().T
        tr = float(np.trace(un).real)
        if tr < 1e-300:
            return 0.0, 0.0
        return float(np.vdot(phi, un @ phi).real / tr), tr

    return Objective(16, evaluate)


def _diag_objective(rho: np.ndarray) -> Objective:
    phi = bell_state(BellFamily.PHI_PLUS)

    def evaluate(x):
        a, b = x
        k = np.kron(np.diag([np.cos(a), np.sin(a)]), np.diag([np.cos(b), np.sin(b)]))
        un = k @ rho @ k.T
        tr = float(np.trace(un).real)
        if tr < 1e-300:
            return 0.0, 0.0
        return float(np.vdot(phi, un @ phi).real / tr), tr

    return Objective(2, evaluate)


def lemma2_bound(
    t: float, p_min: float = 1e-4, restarts: int = 16, seed: int = 0, grid_points: int = 61, max_evals: int = 20_000
) -> Lemma2Result:
    """Empirical supremum of the ``phi+`` fidelity over product filters with ``P_succ >= p_min``.

    A grid over diagonal filters seeds the first restart of a 16-parameter
    multistart search over general filter pairs.
    """
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    rho = lossy_shared_state(BellFamily.PHI_PLUS, 0.5, LossParams(t, t))
    floor = p_min * SUCCESS_MARGIN
    axis = np.linspace(0.0, np.pi / 2, grid_points)
    gx, gv = brute_grid(with_success_penalty(_diag_objective(rho), floor), [axis, axis])
    start = np.zeros(16)
    start[0], start[3] = np.cos(gx[0]), np.sin(gx[0])
    start[8], start[11] = np.cos(gx[1]), np.sin(gx[1])
    starts = [start, np.concatenate([np.eye(2).reshape(4), np.zeros(4)] * 2)]
    rep = multistart_maximize(
        with_success_penalty(_phi_objective(rho), floor), None, restarts, seed, 1e-9, max_evals, starts=starts
    )
    x = np.array(rep.x)
    pf = ProductFilter(povm_from_params(x[:8]), povm_from_params(x[8:]))
    return Lemma2Result(
        t=float(t),
        fidelity=rep.objective,
        p_succ=float(rep.p_succ),
        filter=pf,
        grid_fidelity=gv,
        converged=bool(rep.converged and rep.p_succ >= p_min),
    )
