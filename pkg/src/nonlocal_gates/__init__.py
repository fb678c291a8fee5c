"""Local implementation of non-local quantum gates in a distributed quantum computer.

Submodules:

* :mod:`.qstate` -- labelled pure states, gates, measurement branching
* :mod:`.runtime` -- node ownership, ebits, classical bits, branch executor
* :mod:`.protocols` -- non-local CNOT / control-U / Toffoli / swap protocols
* :mod:`.analysis` -- swap-symmetry checks for two-qubit gates
"""

from . import analysis, protocols, qstate, runtime
from .errors import *  # noqa: F401,F403
from .qstate import (
    CNOT,
    SWAP,
    TOFFOLI,
    TOL_NORM,
    TOL_PRUNE,
    TOL_STATE,
    TOL_UNITARY,
    PureState,
    apply_unitary,
    control_u,
    fidelity_up_to_phase,
    measure_branches,
    schmidt_decompose,
    standard_gates,
    tensor,
)
from .runtime import Program, QubitRef, ResourceLedger, run_protocol

__version__ = "0.1.0"
