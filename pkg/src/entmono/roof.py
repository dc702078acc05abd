"""Convex-roof extremization over pure-state decompositions.

A size-K decomposition of a rank-r operator ``rho = sum_k lam_k |e_k><e_k|`` is
``|x_i> = sum_k U_ik sqrt(lam_k) |e_k>`` for a K x r isometry ``U``; the weight
of member i is ``<x_i|x_i>``.  Both kernels used here are homogeneous of degree
two in the unnormalized vector, so the weighted sum ``sum_i p_i f(psi_i)`` is a
sum of per-vector terms and never needs the normalized members.

All restarts are advanced together as one batch.  Local refinement rotates
pairs of members by a 2x2 unitary chosen by a coarse-to-fine grid search, which
leaves ``sum_i |x_i><x_i|`` unchanged.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .states import RANK_TOL, Bipartition, DensityOperator, PureState

KERNELS = ("concurrence", "negativity")
SENSES = ("min", "max")


@dataclass(frozen=True)
class RoofConfig:
    restarts: int = 200
    max_iters: int = 2000
    step_tol: float = 1e-8
    value_tol: float = 1e-9
    ensemble_size: Optional[int] = None  # None -> max(4, rank)
    rng_seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True, eq=False)
class DecompositionEnsemble:
    weights: np.ndarray
    members: np.ndarray  # (K, dim), each row normalized

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.asarray(self.members, dtype=complex)
        if m.ndim != 2 or m.shape[0] != w.size:
            raise ValueError("weights and members disagree in length")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise ValueError("weights must be non-negative and sum to 1")
        norms = np.linalg.norm(m, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise ValueError("ensemble members must be normalized")

    def density(self) -> np.ndarray:
        m = np.asarray(self.members)
        return (m.T * self.weights) @ m.conj()

    def reconstruction_error(self, rho) -> float:
        rho = getattr(rho, "matrix", rho)
        return float(np.max(np.abs(self.density() - rho)))

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True, eq=False)
class MeasureValue:
    value: float
    method: str  # "closed_form" | "roof_opt"
    ensemble: Optional[DecompositionEnsemble] = None
    converged: bool = True

    def __post_init__(self):
        if self.value < -1e-10:
            raise ValueError(f"measure value {self.value} is negative")
        object.__setattr__(self, "value", max(float(self.value), 0.0))

    def __float__(self):
        return self.value


def _split_permutation(split: Bipartition, n: int) -> np.ndarray:
    """Basis permutation that moves side_a qubits to the most significant bits."""
    order = list(split.side_a) + list(split.side_b)
    idx = np.arange(1 << n).reshape((2,) * n).transpose(order)
    return idx.ravel()


def weighted_kernel(x: np.ndarray, d_a: int, kernel: str) -> np.ndarray:
    """``p * f(x / sqrt(p))`` with ``p = <x|x>`` for a batch of vectors ``x[..., dim]``.

    ``x`` must already be ordered with the side_a qubits most significant.
    """
    d_b = x.shape[-1] // d_a
    m = x.reshape(x.shape[:-1] + (d_a, d_b))
    if d_a > d_b:
        m = np.swapaxes(m, -1, -2)
        d_a, d_b = d_b, d_a
    if d_a == 1:
        return np.zeros(x.shape[:-1])
    if d_a == 2:
        # both kernels equal 2 sqrt(det rho_A) for a qubit side
        n0 = np.sum(np.abs(m[..., 0, :]) ** 2, axis=-1)
        n1 = np.sum(np.abs(m[..., 1, :]) ** 2, axis=-1)
        ov = np.sum(m[..., 0, :].conj() * m[..., 1, :], axis=-1)
        det = np.clip(n0 * n1 - np.abs(ov) ** 2, 0.0, None)
        return 2.0 * np.sqrt(det)
    g = m @ np.swapaxes(m.conj(), -1, -2)
    mu = np.clip(np.linalg.eigvalsh(g), 0.0, None)
    p = mu.sum(axis=-1)
    if kernel == "concurrence":
        return np.sqrt(np.clip(2.0 * (p ** 2 - np.sum(mu ** 2, axis=-1)), 0.0, None))
    return np.clip(np.sum(np.sqrt(mu), axis=-1) ** 2 - p, 0.0, None)


def _random_isometries(seed: int, restarts: int, k: int, r: int) -> np.ndarray:
    out = np.empty((restarts, k, r), dtype=complex)
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(restarts)):
        rng = np.random.default_rng(child)
        z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        q, rr = np.linalg.qr(z)
        q = q * (np.diag(rr) / np.abs(np.diag(rr)))
        out[i] = q[:, :r]
    return out


# coarse grid, then zoom levels that halve the window around the incumbent
_COARSE = 8
_FINE = 3
_LEVELS = 26  # final window ~1e-9 rad; kinks of the kernel at zero need it


def _qubit_rows(x, d_a):
    """The two rows of the coefficient matrix along its two-dimensional side."""
    d_b = x.shape[-1] // d_a
    m = x.reshape(x.shape[:-1] + (d_a, d_b))
    if d_a == 2:
        return m[..., 0, :], m[..., 1, :]
    return m[..., :, 0], m[..., :, 1]


def _pair_evaluator(xi, xj, d_a, kernel):
    """Return ``f(alpha, beta)`` giving the weighted kernel of ``alpha xi + beta xj``.

    With a two-dimensional side the kernel is ``2 sqrt(det)`` of a 2x2 Gram
    matrix, so only inner products of the pair's rows are needed.
    """
    d_b = xi.shape[-1] // d_a
    if 2 not in (d_a, d_b):
        def generic(alpha, beta):
            v = alpha[..., None] * xi[:, None, :] + beta[..., None] * xj[:, None, :]
            return weighted_kernel(v, d_a, kernel)
        return generic

    i0, i1 = _qubit_rows(xi, d_a)
    j0, j1 = _qubit_rows(xj, d_a)

    def dot(u, v):
        return np.sum(u.conj() * v, axis=-1)[:, None]

    g0 = (dot(i0, i0).real, dot(j0, j0).real, dot(i0, j0))
    g1 = (dot(i1, i1).real, dot(j1, j1).real, dot(i1, j1))
    cross = (dot(i0, i1), dot(i0, j1), dot(j0, i1), dot(j0, j1))

    def qubit(alpha, beta):
        aa, bb = np.abs(alpha) ** 2, np.abs(beta) ** 2
        ab = alpha.conj() * beta
        n0 = aa * g0[0] + bb * g0[1] + 2.0 * np.real(ab * g0[2])
        n1 = aa * g1[0] + bb * g1[1] + 2.0 * np.real(ab * g1[2])
        ov = (aa * cross[0] + ab * cross[1]
              + beta.conj() * alpha * cross[2] + bb * cross[3])
        return 2.0 * np.sqrt(np.clip(n0 * n1 - np.abs(ov) ** 2, 0.0, None))
    return qubit


def _best_rotation(xi, xj, d_a, kernel, sign):
    """Grid-search a pair rotation for every restart in the batch.

    Returns the rotated pair and the chosen angle magnitudes.
    """
    nb = xi.shape[0]
    cur = sign * (weighted_kernel(xi, d_a, kernel) + weighted_kernel(xj, d_a, kernel))
    best_t = np.zeros(nb)
    best_f = np.zeros(nb)
    best_v = cur
    f_i = _pair_evaluator(xi, xj, d_a, kernel)
    f_j = _pair_evaluator(xj, xi, d_a, kernel)

    def evaluate(theta, phi):
        c, s = np.cos(theta), np.sin(theta)
        e = np.exp(1j * phi)
        # new i = c xi + s e xj ; new j = c xj - s e* xi
        return sign * (f_i(c + 0j, s * e) + f_j(c + 0j, -s * e.conj()))

    step = np.pi / _COARSE
    g = np.arange(_COARSE) * step
    th, ph = np.meshgrid(g, g, indexing="ij")
    th = np.broadcast_to(th.ravel(), (nb, th.size))
    ph = np.broadcast_to(ph.ravel(), (nb, ph.size))
    rows = np.arange(nb)
    for level in range(_LEVELS + 1):
        vals = evaluate(th, ph)
        arg = np.argmax(vals, axis=1)
        better = vals[rows, arg] > best_v
        best_v = np.where(better, vals[rows, arg], best_v)
        best_t = np.where(better, th[rows, arg], best_t)
        best_f = np.where(better, ph[rows, arg], best_f)
        if level == _LEVELS:
            break
        off = np.linspace(-step, step, _FINE)
        ot, of = np.meshgrid(off, off, indexing="ij")
        th = best_t[:, None] + ot.ravel()[None, :]
        ph = best_f[:, None] + of.ravel()[None, :]
        step /= 2.0
    c, s = np.cos(best_t), np.sin(best_t)
    e = np.exp(1j * best_f)
    ni = c[:, None] * xi + (s * e)[:, None] * xj
    nj = -(s * e.conj())[:, None] * xi + c[:, None] * xj
    # theta in [0, pi) and pi is the identity up to sign
    moved = np.minimum(np.abs(best_t), np.abs(np.pi - best_t))
    return ni, nj, moved


def roof_extremize(rho, split: Bipartition, kernel: str, sense: str,
                   cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    """Extremal average pure-state kernel value over decompositions of ``rho``."""
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if sense not in SENSES:
        raise ValueError(f"unknown sense {sense!r}")
    if isinstance(rho, PureState):
        rho = rho.density()
    n = rho.num_qubits
    split.check(n)
    w, v = rho.eig()
    support = w > RANK_TOL
    w, v = w[support], v[:, support]
    r = w.size
    k = cfg.ensemble_size if cfg.ensemble_size is not None else max(4, r)
    if k < r:
        raise ValueError(f"ensemble_size {k} is smaller than the rank {r}")

    perm = _split_permutation(split, n)
    d_a = 1 << len(split.side_a)
    phi = (v * np.sqrt(w))[perm, :]  # columns sqrt(lam) e_k in split-ordered basis
    sign = 1.0 if sense == "max" else -1.0

    if r == 1:
        x = phi[:, 0][None, :]
        val = float(weighted_kernel(x, d_a, kernel)[0] / np.vdot(x[0], x[0]).real)
        member = v[:, 0] / np.linalg.norm(v[:, 0])
        ens = DecompositionEnsemble(np.array([1.0]), member[None, :])
        return MeasureValue(val, "roof_opt", ens, True)

    u = _random_isometries(cfg.rng_seed, cfg.restarts, k, r)
    x = u @ phi.T  # (R, K, dim)
    f = sign * weighted_kernel(x, d_a, kernel).sum(axis=1)
    active = np.ones(cfg.restarts, dtype=bool)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    for _ in range(cfg.max_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[idx]
        moved = np.zeros(idx.size)
        for i, j in pairs:
            xa[:, i], xa[:, j], mv = _best_rotation(xa[:, i], xa[:, j], d_a, kernel, sign)
            moved = np.maximum(moved, mv)
        x[idx] = xa
        fa = sign * weighted_kernel(xa, d_a, kernel).sum(axis=1)
        gain = fa - f[idx]
        f[idx] = fa
        active[idx] = (gain >= cfg.value_tol) & (moved >= cfg.step_tol)

    best = int(np.argmax(f))
    xb = x[best]
    p = np.sum(np.abs(xb) ** 2, axis=1)
    keep = p > 1e-14
    members = np.empty((int(keep.sum()), xb.shape[1]), dtype=complex)
    members[:, perm] = xb[keep] / np.sqrt(p[keep])[:, None]
    weights = p[keep] / p[keep].sum()
    ens = DecompositionEnsemble(weights, members)
    return MeasureValue(sign * f[best], "roof_opt", ens, not active.any())
