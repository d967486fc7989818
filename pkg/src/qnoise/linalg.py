"""Dense complex linear algebra primitives for few-qubit simulations.

All functions operate on plain ``numpy`` complex arrays in row-major
layout.  Target sizes are density matrices up to ~128x128 and vectorized
superoperators up to ~4096x4096, so everything is dense.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg


def _atol(a: np.ndarray, tol: float) -> float:
    scale = np.max(np.abs(a)) if a.size else 0.0
    return tol * max(1.0, scale)


def is_hermitian(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and np.max(np.abs(a - a.conj().T)) <= _atol(a, tol)


def is_anti_hermitian(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and np.max(np.abs(a + a.conj().T)) <= _atol(a, tol)


def is_unitary(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    if a.shape[0] != a.shape[1]:
        return False
    return np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product a (x) b."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def matexp(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Matrix exponential.

    Hermitian and anti-Hermitian inputs go through an eigendecomposition
    (the dominant case here: exponents of the stochastic gates are
    anti-Hermitian); everything else falls back to scipy's
    scaling-and-squaring Pade implementation.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matexp requires a square matrix, got shape {a.shape}")
    if is_anti_hermitian(a, tol):
        w, v = np.linalg.eigh(1j * a)
        return (v * np.exp(-1j * w)) @ v.conj().T
    if is_hermitian(a, tol):
        w, v = np.linalg.eigh(a)
        return (v * np.exp(w)) @ v.conj().T
    return scipy.linalg.expm(a)


def matexp_antihermitian(a: np.ndarray) -> np.ndarray:
    """Batched exponential of anti-Hermitian matrices.

    Accepts shape (..., d, d); no Hermiticity check is performed, the
    caller guarantees a = -a^dag.  Output is unitary to machine precision.
    """
    a = np.asarray(a, dtype=complex)
    w, v = np.linalg.eigh(1j * a)
    phases = np.exp(-1j * w)
    return np.einsum("...ij,...j,...kj->...ik", v, phases, v.conj())


def partial_trace_ancilla(rho_full: np.ndarray, system_dim: int) -> np.ndarray:
    """Trace out a 2-dimensional ancilla sitting in the last tensor slot."""
    rho_full = np.asarray(rho_full, dtype=complex)
    if rho_full.shape[-1] != 2 * system_dim or rho_full.shape[-2] != 2 * system_dim:
        raise ValueError(
            f"expected a {2 * system_dim}x{2 * system_dim} matrix, got {rho_full.shape}"
        )
    batch = rho_full.shape[:-2]
    r = rho_full.reshape(batch + (system_dim, 2, system_dim, 2))
    return np.einsum("...iaja->...ij", r)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of rho - sigma (assumes Hermitian inputs)."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    diff = rho - sigma
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(dim, dim, order="F")


def assert_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-10,
    trace_tol: float = 1e-9,
    eig_floor: float = -1e-8,
) -> None:
    """Raise ValueError unless rho is a physical density matrix.

    The eigenvalue floor is slightly negative on purpose: Monte-Carlo
    averages produce tiny negative eigenvalues.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm_dev = np.max(np.abs(rho - rho.conj().T))
    if herm_dev > _atol(rho, herm_tol):
        raise ValueError(f"not Hermitian: max deviation {herm_dev:.3e}")
    tr_dev = abs(np.trace(rho) - 1.0)
    if tr_dev > trace_tol:
        raise ValueError(f"trace deviates from 1 by {tr_dev:.3e}")
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    if min_eig < eig_floor:
        raise ValueError(f"minimum eigenvalue {min_eig:.3e} below floor {eig_floor:.1e}")


def is_density_matrix(rho: np.ndarray, **kwargs) -> bool:
    try:
        assert_density_matrix(rho, **kwargs)
    except ValueError:
        return False
    return True
