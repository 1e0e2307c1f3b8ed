"""Superdense coding over lossy channels: Holevo information and quantum advantage.

Alice encodes with ``(I, X, Z, ZX)`` on her half of the shared pair and sends
it through a forward loss ``t_f``. Information is scored by the Holevo
quantity of the resulting two-qubit ensemble and compared against the best
single-qubit ensemble sent through the same loss.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import qmath
from .channels import LossParams, forward_channel, loss_kraus, lossy_shared_state
from .filters import SCISSOR_MULTIPLICITY, filter_matrix, params_from_matrix, povm_from_params, scissor_filter
from .optimize import (
    P_MIN,
    RESTARTS_SMALL,
    Objective,
    OptReport,
    brute_grid,
    multistart_maximize,
    with_success_penalty,
)
from .states import PAULIS, BellFamily
from .teleport import SUCCESS_MARGIN

# warm-started from the scissor optimum, so few restarts are needed
SD_RESTARTS_POVM = 8
_EYE2 = np.eye(2, dtype=complex)


class SDScheme(str, enum.Enum):
    BASELINE = "baseline"
    POVM = "povm"
    NLA = "nla"


@dataclass
class EncodingEnsemble:
    probs: np.ndarray
    states: np.ndarray  # (k, 4, 4)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if abs(self.probs.sum() - 1.0) > 1e-10 or np.any(self.probs < -1e-15) or np.any(self.probs > 1 + 1e-15):
            raise ValueError("ensemble probabilities must lie in [0, 1] and sum to 1")
        if self.states.shape[0] != self.probs.shape[0]:
            raise ValueError("one state per probability required")

    @property
    def members(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.probs.tolist(), self.states))


def encoded_ensemble(shared: np.ndarray, probs, t_f: float) -> EncodingEnsemble:
    """Pauli-encode Alice's qubit with probabilities ``probs`` and apply forward loss."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (4,):
        raise ValueError("need four encoding probabilities")
    states = []
    for s in PAULIS:
        u = np.kron(s, np.eye(2))
        states.append(forward_channel(u @ shared @ u.conj().T, t_f))
    return EncodingEnsemble(probs, np.array(states))


def holevo(ensemble: EncodingEnsemble) -> float:
    """``S(sum p rho) - sum p S(rho)`` in bits."""
    p, rhos = ensemble.probs, ensemble.states
    avg = np.einsum("k,kij->ij", p, rhos)
    s = qmath.entropies(np.concatenate([avg[None], rhos]))
    return max(0.0, float(s[0] - p @ s[1:]))


@lru_cache(maxsize=64)
def _encoding_superops(t_f: float) -> np.ndarray:
    """Row-major superoperators ``vec(rho) -> vec(rho_k)``, shape (4, 16, 16)."""
    ks = [np.kron(k, np.eye(2)) for k in loss_kraus(t_f)]
    out = []
    for s in PAULIS:
        u = np.kron(s, np.eye(2))
        out.append(sum(np.kron(k @ u, (k @ u).conj()) for k in ks))
    return np.array(out)


def _holevo_fast(shared: np.ndarray, probs: np.ndarray, t_f: float) -> float:
    rhos = (_encoding_superops(t_f) @ shared.reshape(16)).reshape(4, 4, 4)
    avg = np.einsum("k,kij->ij", probs, rhos)
    s = qmath.entropies(np.concatenate([avg[None], rhos]))
    return max(0.0, float(s[0] - probs @ s[1:]))


def softmax(logits: np.ndarray) -> np.ndarray:
    e = np.exp(logits - np.max(logits))
    return e / e.sum()


# --- classical single-qubit baseline ------------------------------------------


def binary_ensemble(eta: float, t_f: float) -> tuple[np.ndarray, np.ndarray]:
    """States Bob receives for ``sqrt(eta)|0> +- sqrt(1-eta)|1>`` after loss ``t_f``."""
    out = []
    for sign in (1.0, -1.0):
        chi = np.array([np.sqrt(eta), sign * np.sqrt(1.0 - eta)], dtype=complex)
        out.append(qmath.apply_local(qmath.dm(chi), [2], 0, loss_kraus(t_f)))
    return out[0], out[1]


def _damped_binary(eta: float, t_f: float) -> np.ndarray:
    """Closed form of :func:`binary_ensemble`, stacked as (rho_plus, rho_minus)."""
    b = np.sqrt(eta * (1.0 - eta) * t_f)
    d = (1.0 - eta) * t_f
    return np.array([[[1.0 - d, b], [b, d]], [[1.0 - d, -b], [-b, d]]])


def capacity_objective(t_f: float) -> Objective:
    def evaluate(x):
        eta, pc = x
        rp, rm = _damped_binary(eta, t_f)
        avg = pc * rp + (1 - pc) * rm
        s = qmath.entropies(np.array([avg, rp, rm]))
        return float(s[0] - pc * s[1] - (1 - pc) * s[2]), None

    return Objective(2, evaluate, ["eta", "p_c"])


@lru_cache(maxsize=256)
def classical_capacity(t_f: float, restarts: int = 8, seed: int = 0) -> tuple[float, float, float]:
    """Best binary-ensemble Holevo quantity over loss ``t_f``: ``(bits, eta, p_c)``."""
    if not 0.0 <= t_f <= 1.0:
        raise ValueError(f"t_f={t_f!r} outside [0, 1]")
    rep = multistart_maximize(capacity_objective(t_f), [(0.0, 1.0)] * 2, restarts, seed, tol=1e-10)
    return max(0.0, rep.objective), rep.params["eta"], rep.params["p_c"]


def classical_capacity_grid(t_f: float, n: int = 200) -> tuple[float, float, float]:
    """Grid-search counterpart of :func:`classical_capacity`."""
    axis = np.linspace(0.0, 1.0, n)
    x, v = brute_grid(capacity_objective(t_f), [axis, axis])
    return v, float(x[0]), float(x[1])


# --- entanglement-assisted information ------------------------------------------


@dataclass(frozen=True)
class SDOptions:
    restarts: Optional[int] = None
    seed: int = 0
    tol: float = 1e-8
    max_evals: int = 20_000
    p_min: float = P_MIN
    capacity_restarts: int = 8


def mutual_info_objective(family: BellFamily | str, loss: LossParams, scheme: SDScheme | str) -> Objective:
    """Holevo objective over ``p``, four encoding logits and Alice's filter."""
    family = BellFamily.parse(family)
    scheme = SDScheme(scheme)
    t_f = loss.t_f

    def shared(p):
        return lossy_shared_state(family, p, loss)

    names = ["p", "l0", "l1", "l2", "l3"]
    if scheme is SDScheme.BASELINE:

        def evaluate(x):
            return _holevo_fast(shared(x[0]), softmax(x[1:5]), t_f), None

        return Objective(5, evaluate, names)

    if scheme is SDScheme.NLA:

        def evaluate(x):
            g = x[5]
            w = np.sqrt(np.kron([g, 1 - g], [1.0, 1.0]) / 2)
            un = shared(x[0]) * np.outer(w, w)
            tr = float(np.trace(un).real)
            if tr < 1e-300:
                return 0.0, 0.0
            return _holevo_fast(un / tr, softmax(x[1:5]), t_f), SCISSOR_MULTIPLICITY * tr

        return Objective(6, evaluate, names + ["g_a"])

    def evaluate(x):
        k = qmath.kron2(filter_matrix(x[5:13]), _EYE2)
        un = k @ shared(x[0]) @ k.conj().T
        tr = float(np.trace(un).real)
        if tr < 1e-300:
            return 0.0, 0.0
        return _holevo_fast(un / tr, softmax(x[1:5]), t_f), tr

    return Objective(13, evaluate, names + [f"m{i}" for i in range(8)])


def _bounds(scheme: SDScheme) -> list:
    b = [(0.0, 1.0)] + [None] * 4
    if scheme is SDScheme.NLA:
        b.append((0.0, 1.0))
    elif scheme is SDScheme.POVM:
        b += [None] * 8
    return b


def _finish(rep: OptReport, scheme: SDScheme) -> OptReport:
    x = np.array(rep.x)
    rep.extra["p"] = float(x[0])
    rep.extra["p_k"] = softmax(x[1:5]).tolist()
    if scheme is SDScheme.NLA:
        rep.extra["g_a"] = float(x[5])
    elif scheme is SDScheme.POVM:
        m = povm_from_params(x[5:13]).m
        rep.extra["m_a"] = [[[float(v.real), float(v.imag)] for v in row] for row in m]
    return rep


def mutual_info_max(
    family: BellFamily | str, loss: LossParams, scheme: SDScheme | str, opts: SDOptions = SDOptions()
) -> OptReport:
    """Maximize the Holevo information of the encoded ensemble.

    Filtered schemes are warm-started from the optimum of the next smaller
    scheme (baseline -> scissor -> general filter), each of which is contained
    in the larger feasible set.
    """
    family = BellFamily.parse(family)
    scheme = SDScheme(scheme)
    restarts = opts.restarts or (SD_RESTARTS_POVM if scheme is SDScheme.POVM else RESTARTS_SMALL)
    obj = mutual_info_objective(family, loss, scheme)
    starts = []
    if scheme is not SDScheme.BASELINE:
        obj = with_success_penalty(obj, opts.p_min * SUCCESS_MARGIN)
        sub_scheme = SDScheme.BASELINE if scheme is SDScheme.NLA else SDScheme.NLA
        sub = mutual_info_max(family, loss, sub_scheme, _sub_opts(opts))
        x = np.array(sub.x)
        if scheme is SDScheme.NLA:
            starts.append(np.concatenate([x, [0.5]]))
        else:
            starts.append(np.concatenate([x[:5], params_from_matrix(np.sqrt(2) * scissor_filter(x[5]).m)]))
    rep = multistart_maximize(obj, _bounds(scheme), restarts, opts.seed, opts.tol, opts.max_evals, starts=starts)
    if scheme is not SDScheme.BASELINE and (rep.p_succ is None or rep.p_succ < opts.p_min):
        rep.converged = False
    return _finish(rep, scheme)


def _sub_opts(opts: SDOptions) -> SDOptions:
    r = opts.restarts
    return SDOptions(None if r is None else max(4, r // 2), opts.seed, opts.tol, opts.max_evals, opts.p_min, opts.capacity_restarts)


@dataclass
class AdvantageReport:
    i_ab: float
    capacity: float
    q: float
    q_pct: float
    params: dict = field(default_factory=dict)
    p_succ: Optional[float] = None
    converged: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def percent_advantage(i_ab: float, capacity: float) -> float:
    """Advantage as a percentage of the single-qubit capacity."""
    return 100.0 * (i_ab - capacity) / capacity if capacity > 0 else float("inf")


def quantum_advantage(
    family: BellFamily | str, loss: LossParams, scheme: SDScheme | str, opts: SDOptions = SDOptions()
) -> AdvantageReport:
    rep = mutual_info_max(family, loss, scheme, opts)
    cap = classical_capacity(loss.t_f, opts.capacity_restarts, opts.seed)[0]
    i_ab = rep.objective
    return AdvantageReport(
        i_ab=i_ab,
        capacity=cap,
        q=i_ab - cap,
        q_pct=percent_advantage(i_ab, cap),
        params=dict(rep.extra),
        p_succ=rep.p_succ,
        converged=rep.converged,
    )


@dataclass
class BreakEven:
    t_star: Optional[float]
    scan: list  # (T, q) pairs, in evaluation order

    def to_dict(self) -> dict:
        return asdict(self)


def break_even(
    t_f: float,
    scheme: SDScheme | str,
    family: BellFamily | str = BellFamily.PSI_PLUS,
    opts: SDOptions = SDOptions(),
    step: float = 0.05,
    resolution: float = 0.01,
    q_tol: float = 1e-6,
) -> BreakEven:
    """Smallest symmetric transmissivity with a strictly positive quantum advantage.

    The advantage must exceed ``q_tol`` bits: a general filter can always fall
    back to a classical single-qubit strategy, so below break-even that
    scheme sits at zero advantage rather than below it. A coarse scan brackets
    the first crossing, bisection narrows it below ``resolution`` and the
    crossing is linearly interpolated inside the final bracket. ``t_star`` is
    None when no crossing exists.
    """
    scan = []

    def q(t):
        v = quantum_advantage(family, LossParams(t, t, t_f), scheme, opts).q
        scan.append((float(t), float(v)))
        return v - q_tol

    grid = np.round(np.arange(0.0, 1.0 + step / 2, step), 12)
    prev_t, prev_q = None, None
    for t in grid:
        qt = q(t)
        if qt > 0:
            break
        prev_t, prev_q = t, qt
    else:
        return BreakEven(None, scan)
    if prev_t is None:
        return BreakEven(float(t), scan)
    lo, qlo, hi, qhi = prev_t, prev_q, t, qt
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        qm = q(mid)
        if qm > 0:
            hi, qhi = mid, qm
        else:
            lo, qlo = mid, qm
    t_star = lo + (hi - lo) * (-qlo) / (qhi - qlo) if qhi != qlo else hi
    return BreakEven(float(t_star), scan)
