"""Pure states, density operators and generalized W-class states on qubits."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .linalg import (DEFAULT_TOLS, MAX_QUBITS, CapacityError, Tolerances,
                     hermitian_eig, hermiticity_error, num_qubits_of,
                     partial_trace)

NORM_TOL = 1e-10
TRACE_TOL = 1e-10
RANK_TOL = 1e-10


class StateParseError(ValueError):
    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class PureState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        if self.num_qubits > MAX_QUBITS:
            raise CapacityError(f"{self.num_qubits} qubits exceeds the cap of {MAX_QUBITS}")
        if amps.size != 1 << self.num_qubits:
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: squared norm {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, normalize: bool = False) -> "PureState":
        vec = np.asarray(vec, dtype=complex).ravel()
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(num_qubits_of(vec.size), vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityOperator":
        return DensityOperator(self.num_qubits, self.projector())


@dataclass(frozen=True, eq=False)
class DensityOperator:
    num_qubits: int
    matrix: np.ndarray
    tols: Tolerances = field(default=DEFAULT_TOLS, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = 1 << self.num_qubits
        if m.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got shape {m.shape}")
        err = hermiticity_error(m)
        if err > self.tols.herm_tol:
            raise ValueError(f"operator is not Hermitian (max deviation {err:.3e})")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"operator does not have unit trace: {tr!r}")
        w = np.linalg.eigvalsh(m)
        if w[0] < -self.tols.psd_clamp_tol:
            raise ValueError(f"operator has negative eigenvalue {w[0]:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, m) -> "DensityOperator":
        m = np.asarray(m, dtype=complex)
        return cls(num_qubits_of(m.shape[0]), m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eig(self):
        return hermitian_eig(self.matrix, self.tols)

    def rank(self, tol: float = RANK_TOL) -> int:
        return int(np.sum(np.linalg.eigvalsh(self.matrix) > tol))


@dataclass(frozen=True)
class Bipartition:
    side_a: tuple
    side_b: tuple

    def __post_init__(self):
        a, b = tuple(self.side_a), tuple(self.side_b)
        if not a:
            raise ValueError("side_a must be non-empty")
        if set(a) & set(b):
            raise ValueError(f"sides overlap: {sorted(set(a) & set(b))}")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    @classmethod
    def of(cls, num_qubits: int, side_a: Iterable[int]) -> "Bipartition":
        a = tuple(sorted(set(int(q) for q in side_a)))
        if any(not 0 <= q < num_qubits for q in a):
            raise ValueError(f"side_a {a} out of range for {num_qubits} qubits")
        b = tuple(q for q in range(num_qubits) if q not in a)
        return cls(a, b)

    @property
    def num_qubits(self) -> int:
        return len(self.side_a) + len(self.side_b)

    def check(self, num_qubits: int):
        if sorted(self.side_a + self.side_b) != list(range(num_qubits)):
            raise ValueError(
                f"bipartition {self.side_a}|{self.side_b} does not cover {num_qubits} qubits")


@dataclass(frozen=True, eq=False)
class WClassParams:
    """Coefficients of ``a|10..0> + b_1|01..0> + ... + b_{N-1}|00..1>``."""

    a: complex
    b: tuple

    def __post_init__(self):
        b = tuple(complex(v) for v in self.b)
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", b)
        if len(b) < 2:
            raise ValueError("a W-class state needs N >= 3 qubits")
        if len(b) + 1 > MAX_QUBITS:
            raise CapacityError(f"{len(b) + 1} qubits exceeds the cap of {MAX_QUBITS}")
        norm = abs(self.a) ** 2 + sum(abs(v) ** 2 for v in b)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"W-class coefficients are not normalized: {norm!r}")

    @property
    def num_qubits(self) -> int:
        return len(self.b) + 1

    def coefficients(self) -> np.ndarray:
        return np.array((self.a,) + self.b, dtype=complex)


def make_wclass(params: WClassParams) -> PureState:
    n = params.num_qubits
    amps = np.zeros(1 << n, dtype=complex)
    for q, c in enumerate(params.coefficients()):
        amps[1 << (n - 1 - q)] = c
    return PureState(n, amps)


def uniform_w(n: int) -> WClassParams:
    c = 1 / np.sqrt(n)
    return WClassParams(c, (c,) * (n - 1))


def wclass_from_state(state: PureState, tol: float = 1e-12) -> WClassParams:
    """Read back W-class coefficients; fails if weight outside Hamming-1 exceeds ``tol``."""
    n = state.num_qubits
    idx = [1 << (n - 1 - q) for q in range(n)]
    rest = np.delete(state.amplitudes, idx)
    if rest.size and np.max(np.abs(rest)) > tol:
        raise ValueError("state has support outside the single-excitation subspace")
    coeffs = state.amplitudes[idx]
    return WClassParams(coeffs[0], tuple(coeffs[1:]))


def sample_wclass(n_qubits: int, rng_seed: int) -> WClassParams:
    """Haar-random single-excitation state: complex Gaussian coefficients, normalized."""
    if n_qubits > MAX_QUBITS:
        raise CapacityError(f"{n_qubits} qubits exceeds the cap of {MAX_QUBITS}")
    if n_qubits < 4:
        raise ValueError("sampling needs n_qubits >= 4")
    rng = np.random.default_rng(rng_seed)
    z = rng.standard_normal(n_qubits) + 1j * rng.standard_normal(n_qubits)
    z /= np.linalg.norm(z)
    return WClassParams(z[0], tuple(z[1:]))


def reduce(state: Union[PureState, DensityOperator], keep: Iterable[int]) -> DensityOperator:
    n = state.num_qubits
    keep = tuple(sorted(set(int(q) for q in keep)))
    if not keep:
        raise ValueError("keep set must be non-empty")
    if any(not 0 <= q < n for q in keep):
        raise ValueError(f"keep {keep} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    if isinstance(state, PureState):
        psi = state.amplitudes.reshape((2,) * n).transpose(list(keep) + traced)
        m = psi.reshape(1 << len(keep), -1)
        rho = m @ m.conj().T
    else:
        rho = partial_trace(state.matrix, traced)
    # renormalize away round-off so the trace check sees exactly 1
    rho = rho / np.trace(rho).real
    return DensityOperator(len(keep), rho)


def save_state(state: PureState, path) -> None:
    lines = [f"qubits {state.num_qubits}"]
    for i, amp in enumerate(state.amplitudes):
        lines.append(f"{i} {amp.real:.17g} {amp.imag:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_state(text: str) -> PureState:
    n = None
    amps = []
    expected = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "qubits":
                raise StateParseError("expected header 'qubits <n>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise StateParseError(f"bad qubit count {parts[1]!r}", lineno) from None
            if not 1 <= n <= MAX_QUBITS:
                raise StateParseError(f"qubit count {n} outside 1..{MAX_QUBITS}", lineno)
            continue
        if len(parts) != 3:
            raise StateParseError("expected '<basis-index> <re> <im>'", lineno)
        try:
            idx = int(parts[0])
            re, im = float(parts[1]), float(parts[2])
        except ValueError:
            raise StateParseError(f"malformed amplitude line {line!r}", lineno) from None
        if idx != expected:
            raise StateParseError(
                f"basis index {idx} out of order (expected {expected})", lineno)
        if expected >= 1 << n:
            raise StateParseError(
                f"too many amplitudes for {n} qubits (expected {1 << n})", lineno)
        if not (np.isfinite(re) and np.isfinite(im)):
            raise StateParseError("amplitude is not finite", lineno)
        amps.append(complex(re, im))
        expected += 1
    if n is None:
        raise StateParseError("missing 'qubits <n>' header")
    if len(amps) != 1 << n:
        raise StateParseError(
            f"expected {1 << n} amplitudes for {n} qubits, found {len(amps)}")
    vec = np.array(amps, dtype=complex)
    norm = float(np.sum(np.abs(vec) ** 2))
    if abs(norm - 1.0) > NORM_TOL:
        raise StateParseError(f"state is not normalized: squared norm {norm!r}")
    return PureState(n, vec)


def load_state(path) -> PureState:
    return parse_state(Path(path).read_text(encoding="utf-8"))


def purify(rho: DensityOperator, tol: float = RANK_TOL) -> PureState:
    """Purification on ancilla qubits appended after the system (least significant)."""
    w, v = hermitian_eig(rho.matrix, rho.tols)
    keep = w > tol
    w, v = np.clip(w[keep], 0, None), v[:, keep]
    r = w.size
    n_anc = max(1, int(np.ceil(np.log2(r)))) if r > 1 else 0
    if rho.num_qubits + n_anc > MAX_QUBITS:
        raise CapacityError("purification exceeds the qubit cap")
    psi = np.zeros((rho.dim, 1 << n_anc), dtype=complex)
    psi[:, :r] = v * np.sqrt(w)
    psi = psi.ravel()
    return PureState.from_vector(psi, normalize=True)
