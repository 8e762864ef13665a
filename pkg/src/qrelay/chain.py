"""One-way transmission chains built from teleportation hops.

A chain run is strictly sequential: hop i+1 consumes hop i's output qudit.
Randomness comes from one seeded generator per run, consumed in a fixed
order per hop (carrier outcome, ancilla outcome, noise exponent), so runs
are bit-reproducible. Parallelism only ever exists across independent
trials, each with its own derived seed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import gates
from .core import PureState, ValidationError, basis_state, check_dim, fidelity, tensor_product
from .teleport import (
    CorrectionMode,
    apply_correction,
    entanglement_entropy,
    measure_standard,
    teleport_hop,
)

PROBABILITY_TOL = 1e-12
# joint-register runs are capped at this many amplitudes
FULL_REGISTER_AMPLITUDE_LIMIT = 2**24
DEFAULT_PATH_BUDGET = 4096


class ResourceLimitError(RuntimeError):
    """An exhaustive mode was asked to exceed its stated budget."""


@dataclass(frozen=True)
class NoiseSpec:
    """Phase-noise channel: apply Z^k with probability probs[k] between hops."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(p) for p in self.probs)
        if len(probs) < 2:
            raise ValidationError("noise.probs: need one probability per dit value")
        if any(p < 0.0 for p in probs):
            raise ValidationError(f"noise.probs: probabilities must be >= 0, got {probs}")
        if abs(sum(probs) - 1.0) > PROBABILITY_TOL:
            raise ValidationError(f"noise.probs: must sum to 1, got sum {sum(probs)!r}")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def noiseless(cls, d: int) -> "NoiseSpec":
        check_dim(d)
        return cls((1.0,) + (0.0,) * (d - 1))

    def deterministic_exponent(self) -> int | None:
        """The fixed exponent this channel always applies, or None if random."""
        for k, p in enumerate(self.probs):
            if abs(p - 1.0) <= PROBABILITY_TOL:
                return k
        return None


@dataclass(frozen=True)
class ChainConfig:
    """Static parameters of one transmission chain."""

    d: int
    n: int
    mode: CorrectionMode
    noise: NoiseSpec
    seed: int

    def __post_init__(self) -> None:
        check_dim(self.d)
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n: hop count must be a positive integer, got {self.n!r}")
        if not isinstance(self.mode, CorrectionMode):
            raise ValidationError(f"mode: expected CorrectionMode, got {self.mode!r}")
        if len(self.noise.probs) != self.d:
            raise ValidationError(
                f"noise.probs: expected {self.d} probabilities, got {len(self.noise.probs)}"
            )
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed: must be a 64-bit unsigned integer, got {self.seed!r}")


class HistoryEntry(NamedTuple):
    state: PureState
    r: int


@dataclass(frozen=True, eq=False)
class TransmissionHistory:
    """Ordered (snapshot, r) log: the initial state plus one entry per hop.

    Snapshots are recorded after channel noise but before any correction,
    so the applied correction is reconstructible from r.
    """

    entries: tuple[HistoryEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, eq=False)
class ChainResult:
    """Outcome of one chain run, after all corrections."""

    final: PureState
    results: tuple[int, ...]
    history: TransmissionHistory
    fidelity_vs_initial: float
    deferred_exponent: int | None
    noise_exponents: tuple[int, ...]
    hop_entropies: tuple[float, ...] | None = None


@dataclass(frozen=True, eq=False)
class BranchOutcome:
    path: tuple[int, ...]
    probability: float
    final: PureState
    fidelity: float


@dataclass(frozen=True, eq=False)
class FullRegisterResult:
    """Joint-register run: received state plus per-handoff block entropies."""

    final: PureState
    boundary_entropies: tuple[float, ...]


def deferred_exponent(results: Sequence[int], d: int) -> int:
    """Single end-of-chain correction exponent, (sum of results) mod d."""
    check_dim(d)
    total = 0
    for i, r in enumerate(results):
        if not isinstance(r, (int, np.integer)) or not 0 <= r < d:
            raise ValueError(f"results[{i}] must be in [0, {d}), got {r!r}")
        total += int(r)
    return total % d


def apply_phase_noise(
    state: PureState,
    noise: NoiseSpec,
    rng: np.random.Generator | None = None,
    forced: int | None = None,
) -> tuple[PureState, int]:
    """Sample one Z^k error and apply it; returns (state, k).

    Trajectory semantics: one exponent is drawn per call, the state stays
    pure. `forced` pins the exponent for exhaustive or replay runs.
    """
    d = state.d
    if len(noise.probs) != d:
        raise ValueError(f"noise has {len(noise.probs)} probabilities but state has d={d}")
    if forced is not None:
        if not 0 <= forced < d:
            raise ValueError(f"forced noise exponent must be in [0, {d}), got {forced}")
        k = int(forced)
    else:
        if rng is None:
            raise ValueError("apply_phase_noise needs either an rng or a forced exponent")
        probs = np.asarray(noise.probs)
        k = int(rng.choice(d, p=probs / probs.sum()))
    if k == 0:
        return state, 0
    return gates.apply_1q(state, gates.pauli_z_power(d, k), 0), k


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Derived per-trial seed: master XOR trial index (pure, order-free)."""
    return (master_seed ^ trial_index) & (2**64 - 1)


def run_chain(
    config: ChainConfig,
    psi0: PureState,
    forced_outcomes: Sequence[tuple[int, int]] | None = None,
    forced_noise: Sequence[int] | None = None,
    record_entropy: bool = False,
) -> ChainResult:
    """Send psi0 through n hops and report the corrected received state.

    Per hop: teleport, apply channel noise to the in-flight qudit, append
    (state, r) to the history, then in LOCAL_EACH_HOP mode apply Z^r
    immediately. In DEFERRED_FINAL mode the results are only collected and
    a single Z^f with f = (sum r_i) mod d closes the run. The history has
    n + 1 entries; entry 0 is (psi0, 0).
    """
    if psi0.num_qudits != 1:
        raise ValueError(f"chain input must be a single qudit, got {psi0.num_qudits}")
    if psi0.d != config.d:
        raise ValueError(f"state dimension {psi0.d} does not match config d={config.d}")
    if forced_outcomes is not None and len(forced_outcomes) != config.n:
        raise ValueError(f"forced_outcomes must list {config.n} (a, b) pairs")
    if forced_noise is not None and len(forced_noise) != config.n:
        raise ValueError(f"forced_noise must list {config.n} exponents")

    rng = np.random.default_rng(config.seed)
    local = config.mode is CorrectionMode.LOCAL_EACH_HOP
    history = [HistoryEntry(psi0, 0)]
    results: list[int] = []
    noise_applied: list[int] = []
    entropies: list[float] = []
    state = psi0
    for i in range(config.n):
        outcome = teleport_hop(
            state,
            config.mode,
            rng=rng,
            forced=None if forced_outcomes is None else tuple(forced_outcomes[i]),
            record_entropy=record_entropy,
        )
        if record_entropy:
            entropies.append(outcome.pre_measure_entropy)
        state, k = apply_phase_noise(
            outcome.bob_pre,
            config.noise,
            rng=rng,
            forced=None if forced_noise is None else forced_noise[i],
        )
        history.append(HistoryEntry(state, outcome.a))
        results.append(outcome.a)
        noise_applied.append(k)
        if local:
            state = apply_correction(state, outcome.a)

    exponent: int | None = None
    if not local:
        exponent = deferred_exponent(results, config.d)
        state = apply_correction(state, exponent)
    return ChainResult(
        final=state,
        results=tuple(results),
        history=TransmissionHistory(tuple(history)),
        fidelity_vs_initial=fidelity(psi0, state),
        deferred_exponent=exponent,
        noise_exponents=tuple(noise_applied),
        hop_entropies=tuple(entropies) if record_entropy else None,
    )


def enumerate_branches(
    config: ChainConfig,
    psi0: PureState,
    max_paths: int = DEFAULT_PATH_BUDGET,
) -> list[BranchOutcome]:
    """Exhaustively walk every carrier-outcome path of a chain.

    Only the carrier outcome matters per hop (the ancilla outcome provably
    never changes the received state), so d^n paths cover the run exactly,
    each with probability d^-n. Requires a deterministic noise channel;
    stochastic noise has no exact per-path probability and belongs in
    Monte Carlo runs.
    """
    forced_k = config.noise.deterministic_exponent()
    if forced_k is None:
        raise ValidationError(
            "noise.probs: enumeration requires a deterministic channel; "
            "use Monte Carlo runs for stochastic noise"
        )
    total = config.d**config.n
    if total > max_paths:
        raise ResourceLimitError(
            f"{config.d}^{config.n} = {total} paths exceed the budget of {max_paths}; "
            "use Monte Carlo runs instead"
        )
    probability = 1.0 / total
    branches = []
    for path in itertools.product(range(config.d), repeat=config.n):
        result = run_chain(
            config,
            psi0,
            forced_outcomes=[(a, 0) for a in path],
            forced_noise=(forced_k,) * config.n,
        )
        branches.append(
            BranchOutcome(
                path=path,
                probability=probability,
                final=result.final,
                fidelity=result.fidelity_vs_initial,
            )
        )
    return branches


def full_register_chain(
    d: int,
    n: int,
    psi0: PureState,
    forced_path: Sequence[tuple[int, int]],
    mode: CorrectionMode = CorrectionMode.LOCAL_EACH_HOP,
) -> FullRegisterResult:
    """Run the whole chain on one joint 3n-qudit register.

    Brute-force cross-check of the factorized per-hop simulation: every
    repeater block (carrier, ancilla, receiver) lives in the same state
    vector, the received qudit is handed to the next block's carrier with
    a CNOT / CNOT-dagger pair, and measurements are forced along the given
    path. boundary_entropies[i] is block i's entanglement with the rest of
    the register right after its handoff; the protocol keeps it at zero.
    """
    check_dim(d)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if psi0.num_qudits != 1 or psi0.d != d:
        raise ValueError("psi0 must be a single qudit of dimension d")
    if len(forced_path) != n:
        raise ValueError(f"forced_path must list {n} (a, b) pairs")
    if d ** (3 * n) > FULL_REGISTER_AMPLITUDE_LIMIT:
        raise ResourceLimitError(
            f"{d}^{3 * n} amplitudes exceed the joint-register limit of "
            f"{FULL_REGISTER_AMPLITUDE_LIMIT}"
        )

    local = mode is CorrectionMode.LOCAL_EACH_HOP
    state = tensor_product(psi0, basis_state(d, 3 * n - 1, (0,) * (3 * n - 1)))
    cnot = gates.cnot(d)
    cnot_dag = gates.cnot_dagger(d)
    fourier_inv = gates.hadamard_inverse(d)
    fourier = gates.hadamard(d)
    boundary: list[float] = []
    results: list[int] = []
    for i in range(n):
        carrier, ancilla, receiver = 3 * i, 3 * i + 1, 3 * i + 2
        if i > 0:
            # hand the previous receiver's state to this block's fresh carrier
            state = gates.apply_2q(state, cnot, carrier - 1, carrier)
            state = gates.apply_2q(state, cnot_dag, carrier, carrier - 1)
            boundary.append(entanglement_entropy(state, (carrier - 3, carrier - 2, carrier - 1)))
        state = gates.apply_2q(state, cnot, carrier, receiver)
        state = gates.apply_1q(state, fourier_inv, carrier)
        state = gates.apply_1q(state, fourier, ancilla)
        a, b = forced_path[i]
        _, _, state = measure_standard(state, carrier, forced=a)
        _, _, state = measure_standard(state, ancilla, forced=b)
        results.append(int(a))
        if local:
            state = gates.apply_1q(state, gates.pauli_z_power(d, int(a)), receiver)

    # every qudit except the last receiver is collapsed; slice it out exactly
    slicer: list[int] = []
    for i in range(n):
        a, b = forced_path[i]
        slicer.extend((int(a), int(b)))
        if i < n - 1:
            slicer.append(0)
    final = PureState(d, 1, state.tensor()[tuple(slicer)])
    if not local:
        final = apply_correction(final, deferred_exponent(results, d))
    return FullRegisterResult(final=final, boundary_entropies=tuple(boundary))
