"""Entangled resources, Pauli encodings and seeded Bloch-sphere samples."""
from __future__ import annotations

import enum

import numpy as np

DEFAULT_N_STATES = 300


class BellFamily(str, enum.Enum):
    PSI_PLUS = "psi-plus"
    PHI_PLUS = "phi-plus"

    @classmethod
    def parse(cls, value: "BellFamily | str") -> "BellFamily":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "-")
        aliases = {"psi": cls.PSI_PLUS, "psiplus": cls.PSI_PLUS, "phi": cls.PHI_PLUS, "phiplus": cls.PHI_PLUS}
        if key in aliases:
            return aliases[key]
        return cls(key)


def entangled_state(family: BellFamily | str, p: float) -> np.ndarray:
    """Partially entangled two-qubit resource.

    ``PSI_PLUS`` gives ``sqrt(p)|01> + sqrt(1-p)|10>`` and ``PHI_PLUS`` gives
    ``sqrt(p)|00> + sqrt(1-p)|11>``; ``p = 0.5`` is the Bell state.
    """
    family = BellFamily.parse(family)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p!r} outside [0, 1]")
    psi = np.zeros(4, dtype=complex)
    lo, hi = (1, 2) if family is BellFamily.PSI_PLUS else (0, 3)
    psi[lo] = np.sqrt(p)
    psi[hi] = np.sqrt(1.0 - p)
    return psi


def bell_state(family: BellFamily | str) -> np.ndarray:
    return entangled_state(family, 0.5)


_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (_I, _X, _Z, _Z @ _X)


def pauli(k: int) -> np.ndarray:
    """Encoding gate ``k`` from ``(I, X, Z, ZX)``."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"pauli index {k!r} not in 0..3")
    return PAULIS[k].copy()


def bloch_state(theta: float | np.ndarray, phi: float | np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def bloch_angles(r1: np.ndarray, r2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map uniforms to polar/azimuthal angles uniform on the sphere."""
    return np.arccos(2 * np.asarray(r1) - 1), 2 * np.pi * np.asarray(r2)


def sample_bloch(seed: int, n: int = DEFAULT_N_STATES) -> np.ndarray:
    """``n`` uniformly distributed pure qubit states, shape ``(n, 2)``.

    Uses numpy's PCG64 generator; sample ``k`` consumes uniforms ``2k-1`` and
    ``2k`` of the stream, so a longer draw extends a shorter one.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u = np.random.Generator(np.random.PCG64(seed)).random(2 * n)
    theta, phi = bloch_angles(u[0::2], u[1::2])
    return bloch_state(theta, phi)
