"""Multistart derivative-free maximization with a soft success constraint.

Each restart runs a Nelder-Mead simplex from a Latin-hypercube start. Bounded
parameters are searched through the smooth map ``x = lo + (hi-lo)(1-cos z)/2``
so the simplex itself is unconstrained.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

P_MIN = 1e-4
PENALTY_WEIGHT = 1e3
DEFAULT_TOL = 1e-8
DEFAULT_MAX_EVALS = 20_000
RESTARTS_SMALL = 24
RESTARTS_POVM = 64
# finite stand-in for non-finite objective values; inf would poison simplex arithmetic
_WORST = 1e300

Bounds = Optional[Sequence[Optional[tuple[float, float]]]]


@dataclass
class Objective:
    """A function of ``arity`` reals returning ``(value, p_succ or None)``."""

    arity: int
    evaluate: Callable[[np.ndarray], tuple[float, Optional[float]]]
    names: Optional[list[str]] = None

    def __call__(self, x) -> tuple[float, Optional[float]]:
        return self.evaluate(np.asarray(x, dtype=float))


@dataclass
class OptReport:
    objective: float
    params: dict
    p_succ: Optional[float]
    restarts_used: int
    best_restart: int
    converged: bool
    evaluations: int
    seed: int
    x: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def with_success_penalty(obj: Objective, p_min: float = P_MIN, weight: float = PENALTY_WEIGHT) -> Objective:
    """Subtract ``weight * max(0, p_min - p)^2 / p_min^2``; the raw ``p`` is passed through."""
    if p_min <= 0:
        raise ValueError("p_min must be positive")

    def evaluate(x):
        value, p = obj.evaluate(x)
        if p is not None:
            value = value - weight * max(0.0, p_min - p) ** 2 / p_min**2
        return value, p

    return Objective(obj.arity, evaluate, obj.names)


def _to_box(z: np.ndarray, bounds) -> np.ndarray:
    x = np.array(z, dtype=float)
    for i, b in enumerate(bounds):
        if b is not None:
            lo, hi = b
            x[i] = lo + (hi - lo) * (1.0 - math.cos(z[i])) / 2.0
    return x


def _from_unit(u: np.ndarray, bounds, start_box) -> np.ndarray:
    """Starting point in search coordinates from a point of the unit cube."""
    z = np.empty_like(u)
    lo, hi = start_box
    for i, b in enumerate(bounds):
        if b is None:
            z[i] = lo + (hi - lo) * u[i]
        else:
            z[i] = math.acos(1.0 - 2.0 * u[i])
    return z


def multistart_maximize(
    obj: Objective,
    bounds: Bounds = None,
    restarts: int = RESTARTS_SMALL,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_evals: int = DEFAULT_MAX_EVALS,
    start_box: tuple[float, float] = (-1.0, 1.0),
    step: float = 0.25,
    starts: Optional[Sequence[Sequence[float]]] = None,
) -> OptReport:
    """Maximize ``obj`` from ``restarts`` seeded starts and keep the best.

    ``starts`` optionally prepends explicit starting points (in parameter
    space, not search space); they count towards ``restarts``. Ties between
    restarts go to the lower restart index, so the result does not depend on
    evaluation order.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    d = obj.arity
    bounds = [None] * d if bounds is None else list(bounds)
    if len(bounds) != d:
        raise ValueError("bounds length does not match objective arity")

    cube = qmc.LatinHypercube(d=d, seed=np.random.default_rng(seed)).random(restarts)
    z_starts = [_from_unit(u, bounds, start_box) for u in cube]
    for i, x0 in enumerate(list(starts or [])[:restarts]):
        x0 = np.asarray(x0, dtype=float)
        u = np.array([0.5] * d)
        for j, b in enumerate(bounds):
            if b is not None:
                lo, hi = b
                u[j] = np.clip((x0[j] - lo) / (hi - lo), 0.0, 1.0)
        z = _from_unit(u, bounds, start_box)
        for j, b in enumerate(bounds):
            if b is None:
                z[j] = x0[j]
        z_starts[i] = z

    evals = 0

    def neg(z):
        nonlocal evals
        evals += 1
        value, p = obj.evaluate(_to_box(z, bounds))
        if not np.isfinite(value):
            return _WORST
        return -value

    best = None
    for r, z0 in enumerate(z_starts):
        simplex = np.vstack([z0] + [z0 + step * e for e in np.eye(d)])
        res = minimize(
            neg,
            z0,
            method="Nelder-Mead",
            options=dict(
                initial_simplex=simplex,
                xatol=tol,
                fatol=tol,
                maxfev=max_evals,
                adaptive=d > 4,
            ),
        )
        value = -float(res.fun)
        if best is None or value > best[0]:
            best = (value, r, res)
    value, r_best, res = best
    x = _to_box(res.x, bounds)
    final_value, p = obj.evaluate(x)
    names = obj.names or [f"x{i}" for i in range(d)]
    return OptReport(
        objective=float(final_value),
        params={n: float(v) for n, v in zip(names, x)},
        p_succ=None if p is None else float(p),
        restarts_used=restarts,
        best_restart=r_best,
        converged=bool(res.success and np.isfinite(final_value)),
        evaluations=evals,
        seed=seed,
        x=[float(v) for v in x],
    )


def brute_grid(obj: Objective, grid: Sequence[Sequence[float]]) -> tuple[np.ndarray, float]:
    """Exhaustive maximum over a product grid.

    Axes are sorted ascending and only strict improvements replace the
    incumbent, so ties resolve to the lexicographically smallest point.
    """
    axes = [np.sort(np.asarray(a, dtype=float)) for a in grid]
    if len(axes) != obj.arity:
        raise ValueError("grid dimension does not match objective arity")
    size = int(np.prod([len(a) for a in axes]))
    if size > 10**7:
        raise ValueError(f"grid of {size} points exceeds 1e7")
    best_x, best_v = None, -np.inf
    for pt in itertools.product(*axes):
        v, _ = obj.evaluate(np.array(pt))
        if v > best_v:
            best_x, best_v = np.array(pt), float(v)
    return best_x, best_v
