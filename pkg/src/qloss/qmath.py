"""Dense linear algebra and quantum-information primitives.

All states are plain complex ``numpy`` arrays. Tensor products put the left
factor on the slow index, so ``|01>`` is index 1 of a two-qubit vector.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

HERM_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-8


def kron(*mats: np.ndarray) -> np.ndarray:
    """Tensor product of any number of matrices (or vectors), left to right."""
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m))
    return out


def kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``np.kron`` for two square matrices via broadcasting; cheaper in inner loops."""
    n, m = a.shape[0], b.shape[0]
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(n * m, n * m)


def ket(*bits: int, dim: int = 2) -> np.ndarray:
    """Computational basis ket ``|b1 b2 ...>``."""
    vecs = []
    for b in bits:
        v = np.zeros(dim, dtype=complex)
        v[b] = 1.0
        vecs.append(v)
    return kron(*vecs)


def dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(h: np.ndarray, tol: float = HERM_TOL) -> bool:
    h = np.asarray(h)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and np.allclose(h, dag(h), atol=tol, rtol=0)


def eig_hermitian(h: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    Raises
    ------
    ValueError
        If ``h`` is not square or not Hermitian within ``1e-10``.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigvalsh(0.5 * (h + dag(h)))


def check_density(rho: np.ndarray, normalized: bool = True) -> np.ndarray:
    """Validate a density matrix and return its eigenvalues.

    Unnormalized states only need ``0 < Tr <= 1``.
    """
    w = eig_hermitian(rho)
    if w[0] < -PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    tr = float(np.trace(rho).real)
    if normalized and abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"trace {tr!r} deviates from 1")
    if not normalized and not (0.0 < tr <= 1.0 + TRACE_TOL):
        raise ValueError(f"trace {tr!r} outside (0, 1]")
    return w


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduce ``rho`` on subsystems ``dims`` to the subsystems in ``keep``.

    The kept subsystems stay in their original order.
    """
    rho = np.asarray(rho)
    dims = [int(d) for d in dims]
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"dims {dims} do not match matrix shape {rho.shape}")
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"invalid keep set {keep} for {n} subsystems")
    t = rho.reshape(dims + dims)
    # einsum labels: row indices 0..n-1, column indices n..2n-1
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out = [i for i in keep] + [i + n for i in keep]
    dk = int(np.prod([dims[i] for i in keep]))
    return np.einsum(t, row + col, out).reshape(dk, dk)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits of a normalized density matrix."""
    rho = np.asarray(rho, dtype=complex)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"trace {tr!r} deviates from 1")
    w = eig_hermitian(rho)
    if w[0] < -PSD_TOL:
        raise ValueError(f"negative eigenvalue {w[0]:.3e}")
    return _entropy_from_eigs(w)


def _entropy_from_eigs(w: np.ndarray) -> float:
    w = np.clip(np.asarray(w, dtype=float), 0.0, 1.0)
    w = w[w > 0]
    return float(-(w * np.log2(w)).sum())


def entropies(rhos: np.ndarray) -> np.ndarray:
    """Entropies of a stack of density matrices, shape ``(k, d, d)``.

    Unchecked batch variant used inside optimizer loops.
    """
    w = np.clip(np.linalg.eigvalsh(rhos), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * np.log2(np.where(w > 0, w, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def pure_fidelity(phi: np.ndarray, rho: np.ndarray) -> float:
    """Fidelity ``<phi|rho|phi>`` of a pure target with a density matrix."""
    phi = np.asarray(phi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (phi.size, phi.size):
        raise ValueError("dimension mismatch between state vector and density matrix")
    f = np.vdot(phi, rho @ phi)
    return float(np.clip(f.real, 0.0, 1.0))


def apply_local(rho: np.ndarray, dims: Sequence[int], target: int, kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Apply ``sum_k K rho K^dag`` with each ``K`` acting on subsystem ``target``.

    Kraus operators may change the dimension of the target factor.
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    if not 0 <= target < n:
        raise ValueError(f"target {target} out of range for {n} subsystems")
    rho = np.asarray(rho, dtype=complex)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"dims {dims} do not match matrix shape {rho.shape}")
    t = rho.reshape(dims + dims)
    out = None
    for k in kraus:
        k = np.asarray(k, dtype=complex)
        if k.shape[1] != dims[target]:
            raise ValueError("Kraus operator does not match target dimension")
        # act on the row index, then on the column index with the conjugate
        s = np.moveaxis(np.tensordot(k, t, axes=([1], [target])), 0, target)
        s = np.moveaxis(np.tensordot(k.conj(), s, axes=([1], [n + target])), 0, n + target)
        out = s if out is None else out + s
    new_dims = list(dims)
    new_dims[target] = np.asarray(kraus[0]).shape[0]
    d = int(np.prod(new_dims))
    return out.reshape(d, d)
