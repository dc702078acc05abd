"""Concurrence, negativity and their convex-roof / assisted variants.

Negativity uses the doubled convention ``||rho^{T_A}||_1 - 1`` throughout;
:func:`halved_negativity` converts to the ``(||rho^{T_A}||_1 - 1) / 2`` form.
"""

from typing import Iterable, Union

import numpy as np

from .linalg import partial_transpose, trace_norm
from .roof import (DecompositionEnsemble, MeasureValue, RoofConfig,
                   roof_extremize)
from .states import (Bipartition, DensityOperator, PureState, WClassParams,
                     reduce)

__all__ = [
    "DecompositionEnsemble", "MeasureValue", "RoofConfig", "roof_extremize",
    "concurrence_pure", "squared_concurrence_pure", "concurrence_two_qubit", "concurrence",
    "negativity", "negativity_pure", "halved_negativity",
    "concurrence_assist", "cren", "crenoa",
    "wclass_pair_value", "wclass_one_vs_rest",
]

# eigenvalues below this fraction of the largest are treated as round-off
_SUPPORT_TOL = 1e-14

_PAULI_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def _reduced_side(psi: PureState, split: Bipartition) -> np.ndarray:
    split.check(psi.num_qubits)
    return reduce(psi, split.side_a).matrix


def squared_concurrence_pure(psi: PureState, split: Bipartition) -> float:
    """``2 (1 - Tr rho_A^2)``; raising this to ``x/2`` avoids a square-root round trip."""
    rho_a = _reduced_side(psi, split)
    purity = float(np.real(np.vdot(rho_a, rho_a)))
    return max(2.0 * (1.0 - purity), 0.0)


def concurrence_pure(psi: PureState, split: Bipartition) -> MeasureValue:
    return MeasureValue(np.sqrt(squared_concurrence_pure(psi, split)), "closed_form")


def concurrence_two_qubit(rho: DensityOperator) -> MeasureValue:
    """Wootters' closed form ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the decreasing square roots of the spectrum of
    ``rho (Y x Y) rho* (Y x Y)``.  They are taken as the singular values of
    ``Phi^T (Y x Y) Phi`` with ``Phi = V sqrt(Lambda)`` restricted to the
    numerical support, which avoids square roots of round-off eigenvalues.
    """
    if rho.num_qubits != 2:
        raise ValueError(f"expected a two-qubit operator, got {rho.num_qubits} qubits")
    w, v = rho.eig()
    support = w > _SUPPORT_TOL * max(w[-1], 1.0)
    phi = v[:, support] * np.sqrt(w[support])
    lam = np.zeros(4)
    sv = np.linalg.svd(phi.T @ _PAULI_YY @ phi, compute_uv=False)
    lam[:sv.size] = sv
    return MeasureValue(max(0.0, lam[0] - lam[1:].sum()), "closed_form")


def negativity(rho: Union[DensityOperator, PureState], split: Bipartition) -> MeasureValue:
    if isinstance(rho, PureState):
        rho = rho.density()
    split.check(rho.num_qubits)
    pt = partial_transpose(rho.matrix, split.side_a)
    return MeasureValue(max(trace_norm(pt, rho.tols) - 1.0, 0.0), "closed_form")


def negativity_pure(psi: PureState, split: Bipartition) -> MeasureValue:
    """``2 sum_{i<j} sqrt(l_i l_j)`` over the spectrum ``l`` of the reduced state.

    ``sqrt(l_i)`` are the Schmidt coefficients, read off as singular values of
    the amplitude matrix so that zero eigenvalues stay exactly zero.
    """
    split.check(psi.num_qubits)
    n = psi.num_qubits
    order = list(split.side_a) + list(split.side_b)
    m = psi.amplitudes.reshape((2,) * n).transpose(order).reshape(1 << len(split.side_a), -1)
    r = np.linalg.svd(m, compute_uv=False)
    pairwise = (r.sum() ** 2 - np.sum(r ** 2)) / 2.0
    return MeasureValue(2.0 * pairwise, "closed_form")


def halved_negativity(value: float) -> float:
    return 0.5 * float(value)


def concurrence(state, split: Bipartition = None, cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    """Concurrence by the cheapest exact route: pure formula, Wootters, else roof minimum."""
    if split is None:
        split = Bipartition.of(state.num_qubits, [0])
    if isinstance(state, PureState):
        return concurrence_pure(state, split)
    if state.rank() == 1:
        w, v = state.eig()
        return concurrence_pure(PureState.from_vector(v[:, -1], normalize=True), split)
    if state.num_qubits == 2:
        split.check(2)
        return concurrence_two_qubit(state)
    return roof_extremize(state, split, "concurrence", "min", cfg)


def concurrence_assist(rho, split: Bipartition, cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    if isinstance(rho, PureState):
        return concurrence_pure(rho, split)
    return roof_extremize(rho, split, "concurrence", "max", cfg)


def cren(rho, split: Bipartition, cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    if isinstance(rho, PureState):
        return negativity_pure(rho, split)
    return roof_extremize(rho, split, "negativity", "min", cfg)


def crenoa(rho, split: Bipartition, cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    if isinstance(rho, PureState):
        return negativity_pure(rho, split)
    return roof_extremize(rho, split, "negativity", "max", cfg)


def wclass_pair_value(params: WClassParams, i: int, kernel: str = "concurrence") -> float:
    """Pairwise value between A and B_i (1-based) of a W-class state: ``2|a||b_i|``.

    Concurrence, its assisted form, CREN and CRENOA all coincide on these
    rank-2 two-qubit reductions.
    """
    if kernel not in ("concurrence", "negativity"):
        raise ValueError(f"unknown kernel {kernel!r}")
    if not 1 <= i <= len(params.b):
        raise IndexError(f"pair index {i} outside 1..{len(params.b)}")
    return 2.0 * abs(params.a) * abs(params.b[i - 1])


def wclass_one_vs_rest(params: WClassParams, subset: Iterable[int],
                       kernel: str = "concurrence") -> float:
    """Value across A | B_S on the reduction of a W-class state to A and B_S.

    Every decomposition of that rank-2 reduction gives the same average, so
    the roof minimum and maximum both equal ``2|a| sqrt(sum_S |b_l|^2)``; with a
    single qubit on side A the doubled negativity kernel coincides with
    concurrence, so the same value serves both kernels.
    """
    if kernel not in ("concurrence", "negativity"):
        raise ValueError(f"unknown kernel {kernel!r}")
    subset = list(subset)
    if not subset:
        raise ValueError("subset must be non-empty")
    for l in subset:
        if not 1 <= l <= len(params.b):
            raise IndexError(f"pair index {l} outside 1..{len(params.b)}")
    weight = sum(abs(params.b[l - 1]) ** 2 for l in set(subset))
    return 2.0 * abs(params.a) * np.sqrt(weight)
