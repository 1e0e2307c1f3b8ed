"""Pure-loss channels on single-rail qubits.

Loss acts on a single-rail qubit as amplitude damping. The beamsplitter
coupling to a vacuum ancilla is kept alongside as an independent
construction of the same channel.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from . import qmath
from .states import BellFamily, entangled_state


def _check_t(t: float, name: str = "t") -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"{name}={t!r} outside [0, 1]")
    return t


@dataclass(frozen=True)
class LossParams:
    """Power transmissivities of Alice's, Bob's and the forward channel."""

    t_a: float = 1.0
    t_b: float = 1.0
    t_f: float = 1.0

    def __post_init__(self):
        for name in ("t_a", "t_b", "t_f"):
            _check_t(getattr(self, name), name)

    @classmethod
    def symmetric(cls, t: float, t_f: float = 1.0) -> "LossParams":
        return cls(t, t, t_f)


def loss_kraus(t: float) -> tuple[np.ndarray, np.ndarray]:
    t = _check_t(t)
    k0 = np.diag([1.0, np.sqrt(t)]).astype(complex)
    k1 = np.array([[0.0, np.sqrt(1.0 - t)], [0.0, 0.0]], dtype=complex)
    return k0, k1


def pure_loss(rho: np.ndarray, dims: Sequence[int], target: int, t: float) -> np.ndarray:
    """Send subsystem ``target`` (a single-rail qubit) through loss ``t``."""
    if dims[target] != 2:
        raise ValueError("pure_loss target must be a single-rail qubit")
    return qmath.apply_local(rho, dims, target, loss_kraus(t))


def forward_channel(rho_ab: np.ndarray, t_f: float) -> np.ndarray:
    """Loss on Alice's factor of a two-qubit (Alice, Bob) state."""
    return pure_loss(rho_ab, [2, 2], 0, t_f)


def lossy_shared_state(family: BellFamily | str, p: float, loss: LossParams) -> np.ndarray:
    """Closed-form state after both halves of the resource cross their loss channels."""
    family = BellFamily.parse(family)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p!r} outside [0, 1]")
    ta, tb = loss.t_a, loss.t_b
    q = 1.0 - p
    coh = np.sqrt(p * q * ta * tb)
    rho = np.zeros((4, 4), dtype=complex)
    if family is BellFamily.PSI_PLUS:
        rho[0, 0] = q * (1 - ta) + p * (1 - tb)
        rho[1, 1] = p * tb
        rho[2, 2] = q * ta
        rho[1, 2] = rho[2, 1] = coh
    else:
        rho[0, 0] = p + q * (1 - ta) * (1 - tb)
        rho[1, 1] = q * (1 - ta) * tb
        rho[2, 2] = q * ta * (1 - tb)
        rho[3, 3] = q * ta * tb
        rho[0, 3] = rho[3, 0] = coh
    return rho


def lossy_shared_state_composed(family: BellFamily | str, p: float, loss: LossParams) -> np.ndarray:
    """Same state as :func:`lossy_shared_state`, built by composing loss channels."""
    rho = qmath.dm(entangled_state(family, p))
    rho = pure_loss(rho, [2, 2], 0, loss.t_a)
    return pure_loss(rho, [2, 2], 1, loss.t_b)


def _ladder(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1).astype(complex)


def bs_unitary(t: float, cutoff: int = 3) -> np.ndarray:
    """Two-mode beamsplitter ``exp[acos(sqrt t) (a^dag b - a b^dag)]``.

    Modes are truncated at ``cutoff`` Fock levels each; the first mode is the
    slow index. Sectors with at most ``cutoff - 1`` photons are exact.
    """
    t = _check_t(t)
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    a1 = _ladder(cutoff)
    eye = np.eye(cutoff)
    a = np.kron(a1, eye)
    b = np.kron(eye, a1)
    # arctan2 keeps the angle accurate as t -> 1, where arccos(sqrt t) loses half the digits
    theta = np.arctan2(np.sqrt(1.0 - t), np.sqrt(t))
    gen = theta * (qmath.dag(a) @ b - a @ qmath.dag(b))
    return expm(gen)


def qubit_embedding(cutoff: int) -> np.ndarray:
    """Isometry from the single-rail qubit into a ``cutoff``-level Fock mode."""
    return np.eye(cutoff, 2, dtype=complex)


def beamsplitter_loss_kraus(t: float, cutoff: int = 3) -> list[np.ndarray]:
    """Kraus operators of loss obtained from ``bs_unitary`` with a vacuum ancilla.

    The ancilla is the first beamsplitter mode and is traced out. Operators map
    the qubit into the ``cutoff``-level Fock space.
    """
    u = bs_unitary(t, cutoff).reshape(cutoff, cutoff, cutoff, cutoff)
    emb = qubit_embedding(cutoff)
    # <k|_anc U |0>_anc restricted to qubit inputs
    return [u[k, :, 0, :] @ emb for k in range(cutoff)]


def pure_loss_beamsplitter(
    rho: np.ndarray, dims: Sequence[int], target: int, t: float, cutoff: int = 3
) -> np.ndarray:
    """Beamsplitter-and-trace construction of :func:`pure_loss`."""
    out = qmath.apply_local(rho, dims, target, beamsplitter_loss_kraus(t, cutoff))
    big = list(dims)
    big[target] = cutoff
    proj = qubit_embedding(cutoff).conj().T
    return qmath.apply_local(out, big, target, [proj])


def forward_channel_beamsplitter(rho_ab: np.ndarray, t_f: float, cutoff: int = 3) -> np.ndarray:
    """Explicit ``Tr_1[(BS x I)(|0><0| x rho)(BS x I)^dag]`` on modes (ancilla, Alice, Bob)."""
    emb = np.kron(qubit_embedding(cutoff), np.eye(2))
    vac = np.zeros((cutoff, cutoff), dtype=complex)
    vac[0, 0] = 1.0
    joint = np.kron(vac, emb @ rho_ab @ emb.conj().T)
    u = np.kron(bs_unitary(t_f, cutoff), np.eye(2))
    out = qmath.partial_trace(u @ joint @ u.conj().T, [cutoff, cutoff, 2], keep=[1, 2])
    return emb.conj().T @ out @ emb
