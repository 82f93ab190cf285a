"""Exact simulation of entanglement purification by free spin-chain dynamics."""
from .exceptions import (
    CapacityError,
    ContractViolation,
    ConvergenceError,
    DegenerateInputError,
    DivergenceError,
    SpinPurifyError,
)
from .hamiltonians import ChainLayout, CouplingSpec, HamiltonianSpec
from .numerics import QuantumState
from .protocols import ProtocolOutcome, PureFilterSpec
from .spin_system import BellLabel

__version__ = "0.1.0"
