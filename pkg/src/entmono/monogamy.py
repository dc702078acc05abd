"""Weighted monogamy bounds for W-class states and their verification.

Every bound has the form ``E(A | B_j1 ... B_j(m-1))^x >= sum_k w_k E(A B_jk)^x``
with one of three weight laws:

* flat: all weights 1;
* x/2-law and h-law: ``(1, q, ..., q^(t-1), q^(t+1), ..., q^(t+1), q^t)`` with
  ``q = x/2`` or ``q = 2^(x/2) - 1``.

``t`` is the ordering profile of the instance: pairs 1..t dominate the
remainder they are compared with, pairs t+1..m-2 are dominated by it.
"""

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .measures import (RoofConfig, concurrence_pure, negativity_pure,
                       roof_extremize, wclass_one_vs_rest, wclass_pair_value)
from .states import Bipartition, WClassParams, make_wclass, reduce

TIE_TOL = 1e-12
MARGIN_TOL = 1e-8


class DomainError(ValueError):
    """Exponent outside the range ``x >= 2`` where the bounds hold."""


class BoundKind(enum.Enum):
    # value: (kernel, weight law, assisted LHS, hypothesis)
    FLAT_C = ("concurrence", "flat", True, "none")
    XHALF_C = ("concurrence", "xhalf", True, "profile")
    H_C_T1 = ("concurrence", "h", True, "profile")
    H_C_T2 = ("concurrence", "h", True, "all_ge")
    XHALF_N = ("negativity", "xhalf", True, "profile")
    H_N_T3 = ("negativity", "h", True, "profile")
    H_N_T4 = ("negativity", "h", True, "all_ge")
    XHALF_CONC = ("concurrence", "xhalf", False, "profile")
    H_CONC = ("concurrence", "h", False, "profile")
    XHALF_NC = ("negativity", "xhalf", False, "profile")
    H_NC = ("negativity", "h", False, "profile")

    @property
    def kernel(self) -> str:
        return self.value[0]

    @property
    def law(self) -> str:
        return self.value[1]

    @property
    def assisted(self) -> bool:
        return self.value[2]

    @property
    def hypothesis(self) -> str:
        return self.value[3]


THEOREM_KINDS = {
    "concurrence": (BoundKind.H_C_T1, BoundKind.H_C_T2),
    "negativity": (BoundKind.H_N_T3, BoundKind.H_N_T4),
}


def h_coeff(x: float) -> float:
    if x < 2:
        raise DomainError(f"bounds hold for x >= 2, got x = {x}")
    return 2.0 ** (x / 2.0) - 1.0


def _ratio(law: str, x: float) -> float:
    if law == "h":
        return h_coeff(x)
    if x < 2:
        raise DomainError(f"bounds hold for x >= 2, got x = {x}")
    return x / 2.0 if law == "xhalf" else 1.0


def weight_vector(kind: BoundKind, m: int, t: int, x: float) -> np.ndarray:
    """Weights on the m-1 pair terms, in subset order."""
    if m < 3:
        raise ValueError(f"need m >= 3, got {m}")
    if not 0 <= t <= m - 2:
        raise ValueError(f"t = {t} outside 0..{m - 2}")
    q = _ratio(kind.law, x)
    if kind.law == "flat":
        return np.ones(m - 1)
    powers = np.empty(m - 1)
    powers[:t] = np.arange(t)
    powers[t:m - 2] = t + 1
    powers[m - 2] = t
    return q ** powers


def bound_rhs(kind: BoundKind, pair_values: Sequence[float], x: float, t: int = 0) -> float:
    pv = np.asarray(pair_values, dtype=float)
    if np.any(pv < 0):
        raise ValueError("pair values must be non-negative")
    w = weight_vector(kind, pv.size + 1, t if kind.law != "flat" else 0, x)
    return float(np.dot(w, pv ** x))


@dataclass
class Comparison:
    pair_value: float
    rest_value: float
    ge: bool
    le: bool


@dataclass
class OrderingProfile:
    t: Optional[int]  # smallest valid split index, None when invalid
    comparisons: List[Comparison]
    valid_ts: List[int] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.t is not None

    @property
    def m(self) -> int:
        return len(self.comparisons) + 2

    @property
    def all_ge(self) -> bool:
        return all(c.ge for c in self.comparisons)

    def regime(self) -> str:
        if self.t is None:
            return "invalid"
        if self.t == 0:
            return "t0-extension"
        if self.t == self.m - 2:
            return "all-ge"
        return "theorem-range"


def classify_ordering(params: WClassParams, subset: Sequence[int],
                      kernel: str = "concurrence") -> OrderingProfile:
    """Compare each pair value with the one-vs-rest value of the pairs after it."""
    subset = list(subset)
    m = len(subset) + 1
    if m < 3:
        raise ValueError("subset must hold at least two pair indices")
    comps = []
    for k in range(m - 2):
        pv = wclass_pair_value(params, subset[k], kernel)
        rv = wclass_one_vs_rest(params, subset[k + 1:], kernel)
        comps.append(Comparison(pv, rv, pv >= rv - TIE_TOL, pv <= rv + TIE_TOL))
    valid = [t for t in range(m - 1)
             if all(c.ge for c in comps[:t]) and all(c.le for c in comps[t:])]
    return OrderingProfile(valid[0] if valid else None, comps, valid)


def hypothesis_status(kind: BoundKind, profile: OrderingProfile) -> str:
    if kind.hypothesis == "none":
        return "satisfied"
    if profile.m < 4:
        return "unsatisfied"
    if kind.hypothesis == "all_ge":
        return "satisfied" if profile.all_ge else "unsatisfied"
    return "satisfied" if profile.valid else "unsatisfied"


def _profile_t(kind: BoundKind, profile: OrderingProfile) -> int:
    if kind.law == "flat":
        return 0
    if kind.hypothesis == "all_ge":
        return profile.m - 2
    return profile.t


@dataclass
class MonogamyReport:
    x_grid: np.ndarray
    lhs: np.ndarray
    lhs_method: str
    rhs: Dict[BoundKind, np.ndarray]
    margin: Dict[BoundKind, Optional[np.ndarray]]
    hypothesis_status: Dict[BoundKind, str]
    profile: OrderingProfile
    converged: bool = True
    notes: List[str] = field(default_factory=list)

    def min_margin(self) -> float:
        vals = [np.min(m) for m in self.margin.values() if m is not None]
        return float(min(vals)) if vals else float("nan")

    def violations(self, tol: float = MARGIN_TOL):
        out = []
        for kind, m in self.margin.items():
            if m is None:
                continue
            for x, v in zip(self.x_grid, m):
                if v < -tol:
                    out.append((kind, float(x), float(v)))
        return out


def _lhs_base(params, subset, kernel, assisted, mode, cfg):
    """One-vs-rest value (before the x power) and whether the roof converged."""
    n_b = len(params.b)
    full = sorted(set(subset)) == list(range(1, n_b + 1))
    if mode == "chain" or (mode == "analytic" and not full):
        # unassisted value; for assisted kinds this is a certified lower proxy
        return wclass_one_vs_rest(params, subset, kernel), True
    if mode == "analytic":
        psi = make_wclass(params)
        split = Bipartition.of(psi.num_qubits, [0])
        f = concurrence_pure if kernel == "concurrence" else negativity_pure
        return f(psi, split).value, True
    if mode == "oracle":
        keep = [0] + sorted(set(subset))
        rho = reduce(make_wclass(params), keep)
        split = Bipartition.of(len(keep), [0])
        res = roof_extremize(rho, split, kernel, "max" if assisted else "min", cfg)
        return res.value, res.converged
    raise ValueError(f"unknown lhs mode {mode!r}")


def verify_theorem(params: WClassParams, subset: Sequence[int], kinds, x_grid,
                   cfg: RoofConfig = RoofConfig(), lhs_mode: str = "chain") -> MonogamyReport:
    """Evaluate LHS and every requested bound over ``x_grid``.

    ``kinds`` is one :class:`BoundKind` or a sequence of kinds sharing a kernel
    and an assisted/unassisted LHS.
    """
    if isinstance(kinds, BoundKind):
        kinds = [kinds]
    kinds = list(kinds)
    if len({(k.kernel, k.assisted) for k in kinds}) != 1:
        raise ValueError("all kinds in one report must share their left-hand side")
    kernel, assisted = kinds[0].kernel, kinds[0].assisted
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(x_grid < 2):
        raise DomainError("bounds hold for x >= 2 only")
    subset = list(subset)
    profile = classify_ordering(params, subset, kernel)
    base, converged = _lhs_base(params, subset, kernel, assisted, lhs_mode, cfg)
    lhs = base ** x_grid
    pairs = np.array([wclass_pair_value(params, j, kernel) for j in subset])

    rhs, margin, status = {}, {}, {}
    notes = [f"ordering regime: {profile.regime()}"]
    if lhs_mode == "chain" and assisted:
        notes.append("lhs is the unassisted value, a lower proxy for the assisted one")
    if not converged:
        notes.append("roof optimization hit max_iters before converging")
    for kind in kinds:
        status[kind] = hypothesis_status(kind, profile)
        if status[kind] != "satisfied":
            rhs[kind] = np.full(x_grid.shape, np.nan)
            margin[kind] = None
            continue
        t = _profile_t(kind, profile)
        rhs[kind] = np.array([bound_rhs(kind, pairs, x, t) for x in x_grid])
        margin[kind] = lhs - rhs[kind]
    return MonogamyReport(x_grid, lhs, lhs_mode, rhs, margin, status, profile,
                          converged, notes)


DOMINANCE_CHAINS = (
    (BoundKind.H_C_T1, BoundKind.XHALF_C, BoundKind.FLAT_C),
    (BoundKind.H_N_T3, BoundKind.XHALF_N),
    (BoundKind.H_CONC, BoundKind.XHALF_CONC),
    (BoundKind.H_NC, BoundKind.XHALF_NC),
)


def compare_bounds(params: WClassParams, subset: Sequence[int], kinds, x_grid,
                   t: Optional[int] = None) -> Dict[str, np.ndarray]:
    """Right-hand sides of several bounds on one instance, keyed by kind name.

    Uses the instance's ordering profile unless ``t`` is given.  The returned
    table also carries ``"x"`` and the boolean column ``"dominance_ok"``.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    subset = list(subset)
    table = {"x": x_grid}
    for kind in kinds:
        kt = t
        if kt is None:
            profile = classify_ordering(params, subset, kind.kernel)
            if hypothesis_status(kind, profile) != "satisfied":
                raise ValueError(f"instance does not satisfy the hypothesis of {kind.name}")
            kt = _profile_t(kind, profile)
        pairs = [wclass_pair_value(params, j, kind.kernel) for j in subset]
        table[kind.name] = np.array([bound_rhs(kind, pairs, x, kt) for x in x_grid])
    ok = np.ones(x_grid.shape, dtype=bool)
    for chain in DOMINANCE_CHAINS:
        present = [k.name for k in chain if k.name in table]
        for hi, lo in zip(present, present[1:]):
            ok &= table[hi] >= table[lo] - 1e-15 * np.maximum(1.0, np.abs(table[lo]))
    table["dominance_ok"] = ok
    return table
