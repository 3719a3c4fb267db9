"""Monte Carlo survey of entanglement changes produced by two-qubit gates.

The main entry points are re-exported here; see the submodules for the
full API.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DomainError,
    EntangleError,
    InvalidState,
    InvariantViolation,
    RejectionBudgetExceeded,
)
from .gates import Gate, apply, cnot, delta_e, identity, parse_gate, u_theta
from .measures import (
    concurrence,
    entanglement_of_formation,
    eof_from_concurrence,
    is_ppt_separable,
    participation_ratio,
    q_moment,
    von_neumann_entropy,
)
from .sampling import RngStream, haar_unitary, sample_mixed, sample_pure
from .states import DensityMatrix, PureState, density_from_pure

__all__ = [
    "ConfigError",
    "DensityMatrix",
    "DomainError",
    "EntangleError",
    "Gate",
    "InvalidState",
    "InvariantViolation",
    "PureState",
    "RejectionBudgetExceeded",
    "RngStream",
    "apply",
    "cnot",
    "concurrence",
    "delta_e",
    "density_from_pure",
    "entanglement_of_formation",
    "eof_from_concurrence",
    "haar_unitary",
    "identity",
    "is_ppt_separable",
    "parse_gate",
    "participation_ratio",
    "q_moment",
    "sample_mixed",
    "sample_pure",
    "u_theta",
    "von_neumann_entropy",
]
