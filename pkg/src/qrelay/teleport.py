"""Single-dit teleportation hop with phase-only correction.

One hop moves an unknown qudit |psi> through a three-qudit register
(carrier, sender ancilla A, receiver B). After the entangling circuit both
the carrier and A are measured in the standard basis; the carrier outcome
`a` is the single classical dit a hop emits, and Z^a on B restores |psi>
exactly. The ancilla outcome `b` is recorded but never used, which the
closed-form expansion below makes provable rather than assumed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import gates
from .core import (
    PureState,
    basis_state,
    phase_exponent,
    reduced_density,
    root_of_unity,
    tensor_product,
)

# eigenvalues below this contribute nothing to entropy
ENTROPY_EIGENVALUE_FLOOR = 1e-14
# forcing an outcome whose Born probability is below this is a contradiction
FORCED_OUTCOME_MIN_PROB = 1e-15

CIRCUIT_VARIANTS = ("canonical", "alternate")


class ImpossibleOutcomeError(ValueError):
    """A forced measurement outcome has (numerically) zero probability."""


class CorrectionMode(enum.Enum):
    """When the accumulated Z corrections are applied."""

    LOCAL_EACH_HOP = "local"
    DEFERRED_FINAL = "deferred"


class MeasurementResult(NamedTuple):
    outcome: int
    prob: float
    state: PureState


@dataclass(frozen=True, eq=False)
class HopOutcome:
    """Record of one teleportation hop.

    `a` is the carrier measurement result and the correction exponent;
    `b` the ancilla result (unused by the protocol); `prob` the joint Born
    probability of (a, b). `bob_post` equals `bob_pre` with Z^a applied in
    LOCAL_EACH_HOP mode and is bob_pre unchanged in DEFERRED_FINAL mode.
    """

    a: int
    b: int
    prob: float
    bob_pre: PureState
    bob_post: PureState
    pre_measure_entropy: float | None = None


def prepare_hop(psi: PureState) -> PureState:
    """Assemble the three-qudit hop register |psi, 0, 0>."""
    if psi.num_qudits != 1:
        raise ValueError(f"hop input must be a single qudit, got {psi.num_qudits}")
    return tensor_product(psi, basis_state(psi.d, 2, (0, 0)))


def _check_hop_register(register: PureState) -> None:
    if register.num_qudits != 3:
        raise ValueError(f"hop register must hold 3 qudits, got {register.num_qudits}")
    tensor = register.tensor()
    carried = float(np.sum(np.abs(tensor[:, 0, 0]) ** 2))
    if abs(carried - 1.0) > 1e-12:
        raise ValueError("hop register must be of the form |psi, 0, 0>")


def hop_circuit(register: PureState, variant: str = "canonical") -> PureState:
    """Run the entangling circuit, returning the pre-measurement state.

    Canonical sequence: CNOT with control 0 and target 2, inverse Fourier
    on qudit 0, Fourier on qudit 1. This realizes amplitudes
    (1/d) * w^((d - a*j) mod d) * alpha_j on |a, b, j>, so the carrier
    outcome a alone determines the correction.

    "alternate" swaps in CNOT-dagger on (0, 2) and the forward Fourier on
    qudit 0; it is kept for comparison and does not reproduce the expansion
    for d > 2 (see hop_expansion, which arbitrates).
    """
    if variant not in CIRCUIT_VARIANTS:
        raise ValueError(f"variant must be one of {CIRCUIT_VARIANTS}, got {variant!r}")
    _check_hop_register(register)
    d = register.d
    if variant == "canonical":
        state = gates.apply_2q(register, gates.cnot(d), 0, 2)
        state = gates.apply_1q(state, gates.hadamard_inverse(d), 0)
    else:
        state = gates.apply_2q(register, gates.cnot_dagger(d), 0, 2)
        state = gates.apply_1q(state, gates.hadamard(d), 0)
    return gates.apply_1q(state, gates.hadamard(d), 1)


def hop_expansion(psi: PureState) -> PureState:
    """Closed-form pre-measurement state, built without simulating gates.

    Independent oracle for hop_circuit: amplitude of |a, b, j> is
    (1/d) * w^((d - a*j) mod d) * alpha_j for every a, b, j.
    """
    if psi.num_qudits != 1:
        raise ValueError(f"hop input must be a single qudit, got {psi.num_qudits}")
    d = psi.d
    amps = np.zeros(d**3, dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            base = (a * d + b) * d
            for j in range(d):
                phase = root_of_unity(d, phase_exponent(a, j, d))
                amps[base + j] = phase * psi.amps[j] / d
    return PureState(d, 3, amps)


def measure_standard(
    state: PureState,
    target: int,
    rng: np.random.Generator | None = None,
    forced: int | None = None,
) -> MeasurementResult:
    """Standard-basis measurement of one qudit with projective collapse.

    The outcome is Born-sampled from `rng` unless `forced` pins it. Forcing
    an outcome with probability below FORCED_OUTCOME_MIN_PROB raises
    ImpossibleOutcomeError. The collapsed state is renormalized.
    """
    n = state.num_qudits
    if not 0 <= target < n:
        raise ValueError(f"target {target} out of range [0, {n})")
    d = state.d
    block = state.amps.reshape(d**target, d, d ** (n - target - 1))
    probs = np.sum(np.abs(block) ** 2, axis=(0, 2))
    if forced is not None:
        if not 0 <= forced < d:
            raise ValueError(f"forced outcome must be in [0, {d}), got {forced}")
        outcome = int(forced)
        if probs[outcome] < FORCED_OUTCOME_MIN_PROB:
            raise ImpossibleOutcomeError(
                f"outcome {outcome} on qudit {target} has probability {probs[outcome]:.3e}"
            )
    else:
        if rng is None:
            raise ValueError("measurement needs either an rng or a forced outcome")
        outcome = int(rng.choice(d, p=probs / probs.sum()))
    prob = float(probs[outcome])
    collapsed = np.zeros_like(block)
    collapsed[:, outcome, :] = block[:, outcome, :] / math.sqrt(prob)
    return MeasurementResult(outcome, prob, PureState(d, n, collapsed.reshape(-1)))


def apply_correction(bob: PureState, r: int) -> PureState:
    """Apply the phase correction Z^r to the received qudit."""
    if bob.num_qudits != 1:
        raise ValueError(f"correction target must be a single qudit, got {bob.num_qudits}")
    if not 0 <= r < bob.d:
        raise ValueError(f"correction exponent must be in [0, {bob.d}), got {r}")
    return gates.apply_1q(bob, gates.pauli_z_power(bob.d, r), 0)


def teleport_hop(
    psi: PureState,
    mode: CorrectionMode,
    rng: np.random.Generator | None = None,
    forced: tuple[int, int] | None = None,
    variant: str = "canonical",
    record_entropy: bool = False,
) -> HopOutcome:
    """Teleport one qudit through a single hop.

    Measurements consume `rng` in a fixed order (carrier, then ancilla)
    unless `forced` supplies the pair (a, b). With `record_entropy` the
    receiver qudit's entanglement with the rest of the register is
    evaluated just before measurement and stored on the outcome.
    """
    if forced is None and rng is None:
        raise ValueError("teleport_hop needs either an rng or forced outcomes")
    pre = hop_circuit(prepare_hop(psi), variant=variant)
    entropy = entanglement_entropy(pre, 2) if record_entropy else None
    forced_a, forced_b = forced if forced is not None else (None, None)
    a, prob_a, state = measure_standard(pre, 0, rng=rng, forced=forced_a)
    b, prob_b, state = measure_standard(state, 1, rng=rng, forced=forced_b)
    bob_pre = PureState(psi.d, 1, state.tensor()[a, b, :])
    if mode is CorrectionMode.LOCAL_EACH_HOP:
        bob_post = apply_correction(bob_pre, a)
    else:
        bob_post = bob_pre
    return HopOutcome(
        a=a,
        b=b,
        prob=prob_a * prob_b,
        bob_pre=bob_pre,
        bob_post=bob_post,
        pre_measure_entropy=entropy,
    )


def entanglement_entropy(state: PureState, target: int | tuple[int, ...]) -> float:
    """Von Neumann entropy of the kept qudit(s), in base-d units.

    Returns 0 for product states and 1.0 for a maximally entangled pair,
    independent of d. Eigenvalues below ENTROPY_EIGENVALUE_FLOOR are
    treated as exact zeros.
    """
    rho = reduced_density(state, target)
    eigenvalues = np.linalg.eigvalsh(rho.mat)
    total = 0.0
    for value in eigenvalues:
        if value > ENTROPY_EIGENVALUE_FLOOR:
            total -= float(value) * math.log(float(value))
    return total / math.log(state.d)
