"""Embedded correctness checks, runnable from the CLI without pytest.

Each check is independent of the code path it validates: the golden
matrices are hard-coded, the expansion oracle is a formula rather than a
circuit, and permutations are rebuilt from basis arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import gates
from .chain import ChainConfig, NoiseSpec, run_chain
from .core import flat_index, random_state, root_of_unity
from .teleport import CorrectionMode, hop_circuit, hop_expansion, prepare_hop, teleport_hop

TOL = 1e-12

# qutrit CNOT |a,b> -> |a,(a+b) mod 3>, written out rather than derived
QUTRIT_CNOT_GOLDEN = np.array(
    [
        [1, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 1, 0, 0],
    ],
    dtype=np.complex128,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _result(name: str, passed: bool, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(passed), "" if passed else detail)


def check_qutrit_cnot_golden() -> CheckResult:
    deviation = float(np.max(np.abs(gates.cnot(3).mat - QUTRIT_CNOT_GOLDEN)))
    return _result("qutrit cnot golden matrix", deviation == 0.0, f"max deviation {deviation}")


def basis_permutation_cnot(d: int) -> np.ndarray:
    """Reference CNOT built column-by-column from |a,b> -> |a,(a+b) mod d>."""
    mat = np.zeros((d * d, d * d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            mat[flat_index(d, (a, (a + b) % d)), flat_index(d, (a, b))] = 1.0
    return mat


def check_direct_sum_permutation(dims: Iterable[int] = range(2, 17)) -> CheckResult:
    bad = [d for d in dims if not np.array_equal(gates.cnot(d).mat, basis_permutation_cnot(d))]
    return _result("cnot direct sum equals basis permutation", not bad, f"mismatch for d={bad}")


def check_circuit_matches_expansion(
    dims: Iterable[int] = (2, 3, 4, 5), states_per_dim: int = 20, seed: int = 7
) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in dims:
        for _ in range(states_per_dim):
            psi = random_state(d, 1, rng)
            circuit = hop_circuit(prepare_hop(psi)).amps
            expansion = hop_expansion(psi).amps
            worst = max(worst, float(np.max(np.abs(circuit - expansion))))
    return _result(
        "hop circuit matches closed-form expansion", worst <= TOL, f"max deviation {worst:.3e}"
    )


def check_exact_recovery(
    dims: Iterable[int] = (2, 3, 5), states_per_dim: int = 5, seed: int = 11
) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in dims:
        for _ in range(states_per_dim):
            psi = random_state(d, 1, rng)
            for a in range(d):
                for b in range(d):
                    hop = teleport_hop(psi, CorrectionMode.LOCAL_EACH_HOP, forced=(a, b))
                    worst = max(worst, float(np.max(np.abs(hop.bob_post.amps - psi.amps))))
    return _result(
        "corrected hop returns the input exactly", worst <= TOL, f"max deviation {worst:.3e}"
    )


def check_strategy_equivalence(
    cases: Iterable[tuple[int, int]] = ((2, 4), (3, 3), (5, 2)),
    states_per_case: int = 5,
    seed: int = 13,
) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d, n in cases:
        noise = NoiseSpec.noiseless(d)
        for _ in range(states_per_case):
            psi = random_state(d, 1, rng)
            path = [(int(rng.integers(d)), int(rng.integers(d))) for _ in range(n)]
            final = {}
            for mode in CorrectionMode:
                config = ChainConfig(d=d, n=n, mode=mode, noise=noise, seed=0)
                final[mode] = run_chain(config, psi, forced_outcomes=path).final.amps
            delta = np.abs(final[CorrectionMode.LOCAL_EACH_HOP] - final[CorrectionMode.DEFERRED_FINAL])
            worst = max(worst, float(np.max(delta)))
    return _result(
        "local and deferred corrections agree", worst <= TOL, f"max deviation {worst:.3e}"
    )


def check_unitarity_sweep(
    dims: Iterable[int] = range(2, 17),
    hadamard_factory: Callable[[int], gates.GateMatrix] = gates.hadamard,
) -> CheckResult:
    """Unitarity of every constructor plus the cyclic and commutation laws.

    `hadamard_factory` is an injection point so a deliberately corrupted
    gate can prove the sweep is able to fail.
    """
    failures = []
    for d in dims:
        z, x = gates.pauli_z(d), gates.pauli_x(d)
        constructors = {
            "pauli_z": z,
            "pauli_x": x,
            "hadamard": hadamard_factory(d),
            "hadamard_inverse": gates.hadamard_inverse(d),
            "cnot": gates.cnot(d),
            "cnot_dagger": gates.cnot_dagger(d),
            "pauli_z_power": gates.pauli_z_power(d, d - 1),
        }
        for name, gate in constructors.items():
            if not gates.is_unitary(gate):
                failures.append(f"{name}(d={d}) not unitary")
        eye = np.eye(d)
        if float(np.max(np.abs(gates.gate_power(z, d).mat - eye))) > TOL:
            failures.append(f"Z^{d} != I for d={d}")
        if float(np.max(np.abs(gates.gate_power(x, d).mat - eye))) > TOL:
            failures.append(f"X^{d} != I for d={d}")
        weyl = z.mat @ x.mat - root_of_unity(d, 1) * (x.mat @ z.mat)
        if float(np.max(np.abs(weyl))) > TOL:
            failures.append(f"ZX != wXZ for d={d}")
    return _result("gate unitarity and commutation sweep", not failures, "; ".join(failures))


def check_noiseless_transmission(seed: int = 17) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 1.0
    for d, n in ((2, 5), (3, 4)):
        psi = random_state(d, 1, rng)
        config = ChainConfig(
            d=d, n=n, mode=CorrectionMode.DEFERRED_FINAL, noise=NoiseSpec.noiseless(d), seed=seed
        )
        worst = min(worst, run_chain(config, psi).fidelity_vs_initial)
    return _result(
        "noiseless chain preserves fidelity", worst >= 1.0 - TOL, f"min fidelity {worst!r}"
    )


def run_all(
    hadamard_factory: Callable[[int], gates.GateMatrix] = gates.hadamard,
) -> list[CheckResult]:
    """Run every check; basis vector for cmd_selftest and the negative control."""
    return [
        check_qutrit_cnot_golden(),
        check_direct_sum_permutation(),
        check_circuit_matches_expansion(),
        check_exact_recovery(),
        check_strategy_equivalence(),
        check_unitarity_sweep(hadamard_factory=hadamard_factory),
        check_noiseless_transmission(),
    ]


def corrupted_hadamard(d: int) -> gates.GateMatrix:
    """Fourier gate without its normalization; exists to fail the sweep."""
    return gates.GateMatrix(d, 1, gates.hadamard(d).mat * np.sqrt(d))
