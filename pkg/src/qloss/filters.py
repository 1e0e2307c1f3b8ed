"""Heralded local operations on single-rail qubits.

A heralded operation is represented by the Kraus operator ``M`` of its success
outcome; the complementary POVM element is ``I - M^dag M``. The
noiseless attenuation / amplification circuit (quantum scissor) with
beamsplitter transmissivity ``g`` acts as ``diag(sqrt g, sqrt(1-g)) / sqrt 2``,
so ``g > 0.5`` attenuates and ``g < 0.5`` amplifies.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qmath
from .channels import LossParams, bs_unitary, lossy_shared_state, qubit_embedding
from .states import BellFamily

ZERO_PROB = 1e-300
SCISSOR_MULTIPLICITY = 2


class ZeroProbabilityBranch(ArithmeticError):
    """The heralded outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class KrausFilter:
    """Success-branch Kraus operator of a two-outcome local measurement."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        if m.shape != (2, 2) or not np.all(np.isfinite(m)):
            raise ValueError("KrausFilter needs a finite 2x2 matrix")
        if np.linalg.norm(m, 2) > 1 + 1e-12:
            raise ValueError("filter is not a contraction; M^dag M exceeds identity")
        object.__setattr__(self, "m", m)

    @property
    def e_success(self) -> np.ndarray:
        return self.m.conj().T @ self.m

    @property
    def e_failure(self) -> np.ndarray:
        return np.eye(2) - self.e_success

    @classmethod
    def identity(cls) -> "KrausFilter":
        return cls(np.eye(2))


@dataclass(frozen=True)
class GainConfig:
    g_a: float = 0.5
    g_b: float = 0.5

    def __post_init__(self):
        for name in ("g_a", "g_b"):
            g = getattr(self, name)
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"{name}={g!r} outside [0, 1]")


@dataclass(frozen=True)
class HeraldedState:
    state: np.ndarray
    p_succ: float


class Parties(str, enum.Enum):
    ALICE_ONLY = "alice"
    BOTH = "both"


def scissor_filter(g: float) -> KrausFilter:
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"g={g!r} outside [0, 1]")
    return KrausFilter(np.diag([np.sqrt(g), np.sqrt(1.0 - g)]) / np.sqrt(2))


def apply_local_filters(
    rho: np.ndarray, m_a: KrausFilter, m_b: KrausFilter, herald_multiplicity: int = 1
) -> HeraldedState:
    """Condition a two-qubit state on both local filters succeeding.

    ``p_succ`` is ``herald_multiplicity * Tr[K rho K^dag]`` with ``K = M_A x M_B``;
    the multiplicity counts equivalent herald patterns (2 for the scissor).
    """
    k = np.kron(m_a.m, m_b.m)
    out = k @ np.asarray(rho, dtype=complex) @ k.conj().T
    tr = float(np.trace(out).real)
    if tr < ZERO_PROB:
        raise ZeroProbabilityBranch("filters annihilate the state")
    return HeraldedState(out / tr, herald_multiplicity * tr)


def _filter_weights(gains: GainConfig, parties: Parties) -> tuple[np.ndarray, np.ndarray]:
    wa = np.array([gains.g_a, 1.0 - gains.g_a]) / 2
    if parties is Parties.BOTH:
        wb = np.array([gains.g_b, 1.0 - gains.g_b]) / 2
    else:
        wb = np.ones(2)
    return wa, wb


def nla_na_unnormalized(
    family: BellFamily | str, p: float, loss: LossParams, gains: GainConfig, parties: Parties | str = Parties.BOTH
) -> np.ndarray:
    """Closed-form unnormalized state after the scissor filters.

    Entry ``|ij><kl|`` of the lossy state is weighted by
    ``sqrt(wA_i wB_j wA_k wB_l)`` with ``wX = (g_X, 1 - g_X) / 2`` (unit weights
    for Bob when only Alice filters).
    """
    parties = Parties(parties)
    rho = lossy_shared_state(family, p, loss)
    wa, wb = _filter_weights(gains, parties)
    w = np.sqrt(np.kron(wa, wb))
    return rho * np.outer(w, w)


def nla_na_shared_state(
    family: BellFamily | str, p: float, loss: LossParams, gains: GainConfig, parties: Parties | str = Parties.BOTH
) -> HeraldedState:
    """Normalized scissor-filtered state with ``p_succ = 2 Tr[rho~]``."""
    un = nla_na_unnormalized(family, p, loss, gains, parties)
    tr = float(np.trace(un).real)
    if tr < ZERO_PROB:
        raise ZeroProbabilityBranch("scissor filters annihilate the state")
    return HeraldedState(un / tr, SCISSOR_MULTIPLICITY * tr)


def op_norm2(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 matrix in closed form."""
    a = m.conj().T @ m
    tr = a[0, 0].real + a[1, 1].real
    det = (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]).real
    return float(np.sqrt(0.5 * (tr + np.sqrt(max(tr * tr - 4.0 * det, 0.0)))))


def filter_matrix(theta: np.ndarray) -> np.ndarray:
    """Unvalidated matrix behind :func:`povm_from_params`, for inner loops."""
    m = (theta[:4] + 1j * theta[4:8]).reshape(2, 2)
    return m / max(1.0, op_norm2(m))


def povm_from_params(theta: np.ndarray) -> KrausFilter:
    """Build a filter from 8 reals (real parts then imaginary parts, row-major).

    Matrices with operator norm above 1 are rescaled onto the unit ball so the
    success element never exceeds the identity.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (8,):
        raise ValueError("expected 8 parameters")
    return KrausFilter(filter_matrix(theta))


def params_from_matrix(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex).reshape(4)
    return np.concatenate([m.real, m.imag])


# --- truncated-Fock model of the scissor circuit -------------------------------

FOCK_CUTOFF = 3
_HERALD_PATTERNS = ((1, 0), (0, 1))


def scissor_fock_kraus(g: float, cutoff: int = FOCK_CUTOFF) -> list[np.ndarray]:
    """Per-pattern Kraus maps (input qubit -> output qubit) of the scissor circuit.

    Modes are (input, ancilla arm, output). The ancilla photon is split by a
    beamsplitter of transmissivity ``g`` between the ancilla arm and the output
    mode, the input meets the ancilla arm on a 50:50 beamsplitter, and the two
    detectors behind it must register exactly one photon in total. The pattern
    that picks up a relative sign is fed forward with a ``Z`` correction.
    """
    c = cutoff
    eye = np.eye(c)
    split = np.kron(eye, bs_unitary(g, c))
    mix = np.kron(bs_unitary(0.5, c), eye)
    u = (mix @ split).reshape([c] * 6)
    emb = qubit_embedding(c)
    # input qubit in mode 0, one photon in the ancilla arm, vacuum at the output
    amp = u[:, :, :, :, 1, 0] @ emb  # (na, nb, nc, qubit_in)
    out = []
    for na, nb in _HERALD_PATTERNS:
        k = emb.conj().T @ amp[na, nb]
        if np.real(k[0, 0] * np.conj(k[1, 1])) < 0:
            k = np.diag([1.0, -1.0]) @ k
        out.append(k)
    return out


def simulate_scissor_fock(rho_in: np.ndarray, g: float, cutoff: int = FOCK_CUTOFF) -> HeraldedState:
    """Heralded output of the scissor circuit simulated in truncated Fock space."""
    rho_in = np.asarray(rho_in, dtype=complex)
    if rho_in.shape != (2, 2):
        raise ValueError("scissor input must be a single-rail qubit")
    out = sum(k @ rho_in @ k.conj().T for k in scissor_fock_kraus(g, cutoff))
    tr = float(np.trace(out).real)
    if tr < ZERO_PROB:
        raise ZeroProbabilityBranch("no single-click herald possible")
    return HeraldedState(out / tr, tr)
