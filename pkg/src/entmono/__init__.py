"""Qubit entanglement measures and weighted monogamy bounds for W-class states."""

__version__ = "0.1.0"

from .linalg import (CapacityError, ContractViolation, HermitianEig, Tolerances,
                     hermitian_eig, partial_trace, partial_transpose, psd_sqrt,
                     tensor_product, trace_norm)
from .states import (Bipartition, DensityOperator, PureState, StateParseError,
                     WClassParams, load_state, make_wclass, reduce,
                     sample_wclass, save_state, uniform_w)
from .measures import (DecompositionEnsemble, MeasureValue, RoofConfig,
                       concurrence, concurrence_assist, concurrence_pure,
                       concurrence_two_qubit, cren, crenoa, halved_negativity,
                       negativity, negativity_pure, roof_extremize,
                       wclass_one_vs_rest, wclass_pair_value)
from .monogamy import (BoundKind, DomainError, MonogamyReport, OrderingProfile,
                       bound_rhs, classify_ordering, compare_bounds, h_coeff,
                       verify_theorem, weight_vector)
