"""State-vector simulation of one-way qudit relay chains.

A single unknown qudit is forwarded hop by hop through three-qudit relay
nodes. Each hop teleports the state using one classical dit and a
phase-only (Z power) correction, which may be applied locally at every
node or once, deferred to the end of the chain. A Z-type channel models
dephasing noise between hops.
"""

from .chain import (
    BranchOutcome,
    ChainConfig,
    ChainResult,
    FullRegisterResult,
    HistoryEntry,
    NoiseSpec,
    ResourceLimitError,
    TransmissionHistory,
    apply_phase_noise,
    deferred_exponent,
    enumerate_branches,
    full_register_chain,
    run_chain,
    trial_seed,
)
from .core import (
    DensityMatrix,
    PureState,
    ValidationError,
    basis_digits,
    basis_state,
    fidelity,
    flat_index,
    inner_product,
    make_state,
    mod_add,
    phase_exponent,
    random_state,
    reduced_density,
    root_of_unity,
    tensor_product,
)
from .gates import (
    GateMatrix,
    apply_1q,
    apply_2q,
    cnot,
    cnot_dagger,
    gate_power,
    hadamard,
    hadamard_inverse,
    identity,
    is_unitary,
    pauli_x,
    pauli_z,
    pauli_z_power,
)
from .teleport import (
    CorrectionMode,
    HopOutcome,
    ImpossibleOutcomeError,
    MeasurementResult,
    apply_correction,
    entanglement_entropy,
    hop_circuit,
    hop_expansion,
    measure_standard,
    prepare_hop,
    teleport_hop,
)

__version__ = "0.1.0"

__all__ = [
    "BranchOutcome",
    "ChainConfig",
    "ChainResult",
    "CorrectionMode",
    "DensityMatrix",
    "FullRegisterResult",
    "GateMatrix",
    "HistoryEntry",
    "HopOutcome",
    "ImpossibleOutcomeError",
    "MeasurementResult",
    "NoiseSpec",
    "PureState",
    "ResourceLimitError",
    "TransmissionHistory",
    "ValidationError",
    "apply_1q",
    "apply_2q",
    "apply_correction",
    "apply_phase_noise",
    "basis_digits",
    "basis_state",
    "cnot",
    "cnot_dagger",
    "deferred_exponent",
    "entanglement_entropy",
    "enumerate_branches",
    "fidelity",
    "flat_index",
    "full_register_chain",
    "gate_power",
    "hadamard",
    "hadamard_inverse",
    "hop_circuit",
    "hop_expansion",
    "identity",
    "inner_product",
    "is_unitary",
    "make_state",
    "measure_standard",
    "mod_add",
    "pauli_x",
    "pauli_z",
    "pauli_z_power",
    "phase_exponent",
    "prepare_hop",
    "random_state",
    "reduced_density",
    "root_of_unity",
    "run_chain",
    "teleport_hop",
    "tensor_product",
    "trial_seed",
    "__version__",
]
