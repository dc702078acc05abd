"""Dense complex linear algebra on n-qubit operator spaces.

Qubit 0 is the most significant bit of a computational-basis index, so
``|10...0>`` on N qubits sits at index ``2**(N-1)``.  Every routine here is a
pure function of its arguments; arrays passed in are never modified.
"""

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

MAX_QUBITS = 10


@dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-9
    eig_tol: float = 1e-10
    psd_clamp_tol: float = 1e-8


DEFAULT_TOLS = Tolerances()


class CapacityError(ValueError):
    """Operation would exceed the configured qubit cap."""


class ContractViolation(ValueError):
    """Input breaks a numerical precondition (hermiticity, positivity)."""


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns


def num_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
    return n


def _check_square(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return num_qubits_of(m.shape[0])


def _normalize_subset(subset: Iterable[int], n: int) -> tuple:
    sub = tuple(sorted(set(int(q) for q in subset)))
    for q in sub:
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for {n} qubits")
    return sub


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product, left factor on the more significant bits."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > 1 << MAX_QUBITS:
        raise CapacityError(
            f"product of shape {(rows, cols)} exceeds the {MAX_QUBITS}-qubit cap")
    return np.kron(a, b)


def partial_trace(rho, traced: Iterable[int]) -> np.ndarray:
    """Trace out the qubits in ``traced``; remaining qubits keep their order."""
    rho = np.asarray(rho, dtype=complex)
    n = _check_square(rho)
    traced = tuple(int(q) for q in traced)
    if any(not 0 <= q < n for q in traced):
        raise ValueError(f"traced qubits {traced} are not a subset of 0..{n - 1}")
    traced = tuple(sorted(set(traced)))
    keep = [q for q in range(n) if q not in traced]
    t = rho.reshape((2,) * (2 * n))
    # bra axes of traced qubits are relabelled onto their ket axes
    ket = list(range(n))
    bra = [n + q if q in keep else q for q in range(n)]
    out = [q for q in keep] + [n + q for q in keep]
    res = np.einsum(t, ket + bra, out)
    d = 1 << len(keep)
    return np.asarray(res).reshape(d, d)


def partial_transpose(rho, subsystem: Iterable[int]) -> np.ndarray:
    """Transpose the indices of the qubits in ``subsystem`` only."""
    rho = np.asarray(rho, dtype=complex)
    n = _check_square(rho)
    sub = _normalize_subset(subsystem, n)
    if not sub:
        return rho.copy()
    t = rho.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for q in sub:
        axes[q], axes[n + q] = axes[n + q], axes[q]
    d = 1 << n
    return np.ascontiguousarray(t.transpose(axes)).reshape(d, d)


def hermiticity_error(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_eig(m, tols: Tolerances = DEFAULT_TOLS) -> HermitianEig:
    """Full spectrum (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    err = hermiticity_error(m)
    if err > tols.herm_tol:
        raise ContractViolation(
            f"matrix is not Hermitian: max |M - M^dag| = {err:.3e}")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return HermitianEig(w, v)


def trace_norm(m, tols: Tolerances = DEFAULT_TOLS) -> float:
    w, _ = hermitian_eig(m, tols)
    return float(np.sum(np.abs(w)))


def psd_sqrt(m, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Hermitian square root; eigenvalues down to ``-psd_clamp_tol`` are clamped to 0."""
    w, v = hermitian_eig(m, tols)
    if w.size and w[0] < -tols.psd_clamp_tol:
        raise ContractViolation(
            f"matrix is not positive semidefinite: min eigenvalue {w[0]:.3e}")
    s = np.sqrt(np.clip(w, 0.0, None))
    return (v * s) @ v.conj().T
