"""Command-line front-end: seeded runs, exact enumeration, self-test.

Reports are JSON with sorted keys so identical configurations produce
byte-identical output. Complex amplitudes travel as [re, im] pairs, both
in configuration files and in reports. Exit codes: 0 success, 1 validation
or I/O error, 2 resource budget exceeded, 3 self-test failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import selftest
from .chain import (
    ChainConfig,
    DEFAULT_PATH_BUDGET,
    NoiseSpec,
    ResourceLimitError,
    TransmissionHistory,
    enumerate_branches,
    run_chain,
    trial_seed,
)
from .core import PureState, ValidationError, basis_state, make_state, random_state
from .teleport import CorrectionMode

DEFAULT_D = 3
DEFAULT_N = 3
DEFAULT_MODE = CorrectionMode.DEFERRED_FINAL
DEFAULT_SEED = 0
DEFAULT_TRIALS = 1
DEFAULT_STATE = "uniform"

_CONFIG_KEYS = {"d", "n", "mode", "noise", "seed", "trials", "state", "out", "history"}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment parameters."""

    d: int
    n: int
    mode: CorrectionMode
    noise: NoiseSpec
    seed: int
    trials: int
    state: str | tuple[tuple[float, float], ...]
    out: str | None = None
    history: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValidationError(f"trials: must be a positive integer, got {self.trials!r}")
        # delegate the chain-level invariants (d, n, mode, noise length, seed)
        self.chain_config(self.seed)

    def chain_config(self, seed: int) -> ChainConfig:
        return ChainConfig(d=self.d, n=self.n, mode=self.mode, noise=self.noise, seed=seed)


def _parse_mode(value: str) -> CorrectionMode:
    try:
        return CorrectionMode(value)
    except ValueError:
        raise ValidationError(f"mode: expected 'local' or 'deferred', got {value!r}") from None


def _parse_noise(value: object, d: int) -> NoiseSpec:
    if isinstance(value, str):
        try:
            value = [float(part) for part in value.split(",")]
        except ValueError:
            raise ValidationError(f"noise.probs: expected comma-separated reals, got {value!r}") from None
    if not isinstance(value, (list, tuple)):
        raise ValidationError(f"noise.probs: expected a list of reals, got {value!r}")
    if len(value) != d:
        raise ValidationError(f"noise.probs: expected {d} probabilities for d={d}, got {len(value)}")
    return NoiseSpec(tuple(float(p) for p in value))


def _parse_state(value: object, d: int) -> str | tuple[tuple[float, float], ...]:
    """Normalize an initial-state spec to a tag string or (re, im) pairs."""
    if isinstance(value, str):
        tag = value.strip()
        if tag in ("uniform", "random"):
            return tag
        if tag.startswith("basis:"):
            try:
                j = int(tag.split(":", 1)[1])
            except ValueError:
                raise ValidationError(f"state: bad basis index in {value!r}") from None
            if not 0 <= j < d:
                raise ValidationError(f"state: basis index {j} out of range [0, {d})")
            return tag
        try:
            flat = [float(part) for part in tag.split(",")]
        except ValueError:
            raise ValidationError(
                f"state: expected 'basis:<j>', 'uniform', 'random' or an amplitude list, got {value!r}"
            ) from None
        if len(flat) != 2 * d:
            raise ValidationError(
                f"state: amplitude list needs {2 * d} reals (re, im per basis state), got {len(flat)}"
            )
        return tuple((flat[2 * i], flat[2 * i + 1]) for i in range(d))
    if isinstance(value, (list, tuple)):
        pairs = []
        for i, item in enumerate(value):
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise ValidationError(f"state: amplitude {i} must be an [re, im] pair, got {item!r}")
            pairs.append((float(item[0]), float(item[1])))
        if len(pairs) != d:
            raise ValidationError(f"state: expected {d} amplitude pairs, got {len(pairs)}")
        return tuple(pairs)
    raise ValidationError(f"state: unsupported value {value!r}")


def initial_state(config: ExperimentConfig) -> PureState:
    """Realize the configured one-qudit input state."""
    spec = config.state
    if spec == "uniform":
        return make_state(config.d, [1.0 / math.sqrt(config.d)] * config.d)
    if spec == "random":
        return random_state(config.d, 1, np.random.default_rng(config.seed))
    if isinstance(spec, str) and spec.startswith("basis:"):
        return basis_state(config.d, 1, (int(spec.split(":", 1)[1]),))
    amps = [complex(re, im) for re, im in spec]
    try:
        return make_state(config.d, amps)
    except ValidationError as exc:
        raise ValidationError(f"state: {exc}") from None


def _load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config: {path} is not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ValidationError(f"config: {path} must hold a JSON object")
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"config: unknown keys {unknown}; allowed keys are {sorted(_CONFIG_KEYS)}")
    return data


def parse_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge config-file values and command-line flags (flags win)."""
    raw = _load_config_file(args.config) if args.config else {}
    for key in ("d", "n", "mode", "noise", "seed", "trials", "state", "out", "history"):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value

    d = raw.get("d", DEFAULT_D)
    if not isinstance(d, int):
        raise ValidationError(f"d: must be an integer, got {d!r}")
    n = raw.get("n", DEFAULT_N)
    if not isinstance(n, int):
        raise ValidationError(f"n: must be an integer, got {n!r}")
    mode = raw.get("mode", DEFAULT_MODE)
    if isinstance(mode, str):
        mode = _parse_mode(mode)
    noise = raw.get("noise")
    noise_spec = NoiseSpec.noiseless(d) if noise is None else _parse_noise(noise, d)
    seed = raw.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int):
        raise ValidationError(f"seed: must be an integer, got {seed!r}")
    trials = raw.get("trials", DEFAULT_TRIALS)
    if not isinstance(trials, int):
        raise ValidationError(f"trials: must be an integer, got {trials!r}")
    state = _parse_state(raw.get("state", DEFAULT_STATE), d)
    return ExperimentConfig(
        d=d,
        n=n,
        mode=mode,
        noise=noise_spec,
        seed=seed,
        trials=trials,
        state=state,
        out=raw.get("out"),
        history=raw.get("history"),
    )


def _config_echo(config: ExperimentConfig) -> dict:
    state = config.state if isinstance(config.state, str) else [list(pair) for pair in config.state]
    return {
        "d": config.d,
        "n": config.n,
        "mode": config.mode.value,
        "noise": list(config.noise.probs),
        "seed": config.seed,
        "trials": config.trials,
        "state": state,
    }


def _amp_pairs(state: PureState) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in state.amps]


def write_history_csv(path: str, history: TransmissionHistory) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["hop", "r", "amplitude_index", "re", "im"])
        for hop, entry in enumerate(history.entries):
            for index, amp in enumerate(entry.state.amps):
                writer.writerow([hop, entry.r, index, repr(float(amp.real)), repr(float(amp.imag))])


def cmd_run(config: ExperimentConfig) -> dict:
    """Execute the configured number of seeded chain runs and aggregate."""
    psi0 = initial_state(config)
    histogram = [0] * config.d
    fidelities = []
    records = []
    first_history: TransmissionHistory | None = None
    for index in range(config.trials):
        result = run_chain(config.chain_config(trial_seed(config.seed, index)), psi0)
        if index == 0:
            first_history = result.history
        for r in result.results:
            histogram[r] += 1
        fidelities.append(result.fidelity_vs_initial)
        records.append(
            {
                "trial": index,
                "seed": trial_seed(config.seed, index),
                "results": list(result.results),
                "deferred_exponent": result.deferred_exponent,
                "noise_exponents": list(result.noise_exponents),
                "fidelity": result.fidelity_vs_initial,
            }
        )
    if config.history and first_history is not None:
        write_history_csv(config.history, first_history)
    return {
        "command": "run",
        "config": _config_echo(config),
        "trials": records,
        "aggregate": {
            "fidelity_mean": float(np.mean(fidelities)),
            "fidelity_min": float(np.min(fidelities)),
            "outcome_histogram": histogram,
        },
        "history_path": config.history,
    }


def cmd_enumerate(config: ExperimentConfig) -> dict:
    """Walk every carrier-outcome path exactly (noiseless or fixed noise)."""
    psi0 = initial_state(config)
    branches = enumerate_branches(config.chain_config(config.seed), psi0, DEFAULT_PATH_BUDGET)
    paths = [
        {
            "path": list(branch.path),
            "probability": branch.probability,
            "fidelity": branch.fidelity,
            "final_state": _amp_pairs(branch.final),
        }
        for branch in branches
    ]
    fidelities = [branch.fidelity for branch in branches]
    return {
        "command": "enumerate",
        "config": _config_echo(config),
        "paths": paths,
        "aggregate": {
            "path_count": len(branches),
            "probability_sum": float(sum(branch.probability for branch in branches)),
            "fidelity_mean": float(np.mean(fidelities)),
            "fidelity_min": float(np.min(fidelities)),
        },
    }


def cmd_selftest() -> int:
    """Run the embedded checks, print one line per check, 0 iff all pass."""
    results = selftest.run_all()
    for check in results:
        if check.passed:
            print(f"PASS {check.name}")
        else:
            print(f"FAIL {check.name}: {check.detail}")
    failed = [check.name for check in results if not check.passed]
    if failed:
        print(f"self-test failed: {', '.join(failed)}", file=sys.stderr)
        return 3
    return 0


def render_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrelay",
        description="State-vector simulator for one-way qudit relay chains "
        "with phase-only teleportation correction.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config file; flags override its values")
    shared.add_argument("--d", type=int, help="qudit dimension (2..16, default 3)")
    shared.add_argument("--n", type=int, help="number of hops (default 3)")
    shared.add_argument("--mode", choices=["local", "deferred"], help="correction strategy")
    shared.add_argument("--noise", help="comma-separated p0,p1,... for the Z^k channel")
    shared.add_argument("--seed", type=int, help="master seed (default 0)")
    shared.add_argument("--trials", type=int, help="Monte Carlo trials (default 1)")
    shared.add_argument(
        "--state",
        help="initial state: basis:<j> | uniform | random | re0,im0,re1,im1,...",
    )
    shared.add_argument("--out", help="write the JSON report here instead of stdout")
    shared.add_argument("--history", help="write the first trial's history CSV here")
    subparsers.add_parser("run", parents=[shared], help="seeded Monte Carlo transmission runs")
    subparsers.add_parser("enumerate", parents=[shared], help="exact outcome-path enumeration")
    subparsers.add_parser("selftest", help="run the embedded acceptance checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return cmd_selftest()
        config = parse_config(args)
        report = cmd_run(config) if args.command == "run" else cmd_enumerate(config)
        text = render_report(report)
        if config.out:
            Path(config.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
