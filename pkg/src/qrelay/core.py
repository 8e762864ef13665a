"""Core qudit numerics: roots of unity, basis encoding, pure states.

Register convention is big-endian: qudit 0 is the most significant base-d
digit of the flat amplitude index. All values are immutable once built and
safe to share between threads; amplitude arrays are marked read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MIN_DIM = 2
MAX_DIM = 16

# make_state silently renormalizes inside this deviation and rejects beyond it
INPUT_NORM_TOL = 1e-9
# constructed values must satisfy their invariants within this
INTERNAL_TOL = 1e-12


class ValidationError(ValueError):
    """User-supplied data violates a documented contract."""


def check_dim(d: int) -> int:
    if not isinstance(d, (int, np.integer)):
        raise ValidationError(f"d: qudit dimension must be an integer, got {type(d).__name__}")
    if not MIN_DIM <= d <= MAX_DIM:
        raise ValidationError(f"d: qudit dimension must be in [{MIN_DIM}, {MAX_DIM}], got {d}")
    return int(d)


def _check_dit(value: int, d: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or not 0 <= value < d:
        raise ValueError(f"{name} must be an integer in [0, {d}), got {value!r}")
    return int(value)


def root_of_unity(d: int, k: int) -> complex:
    """k-th power of the primitive d-th root of unity, exp(2*pi*i*k/d)."""
    check_dim(d)
    _check_dit(k, d, "k")
    # quadrant angles come out exact instead of carrying sin/cos rounding
    if k == 0:
        return complex(1.0, 0.0)
    if 2 * k == d:
        return complex(-1.0, 0.0)
    if 4 * k == d:
        return complex(0.0, 1.0)
    if 4 * k == 3 * d:
        return complex(0.0, -1.0)
    angle = 2.0 * math.pi * k / d
    return complex(math.cos(angle), math.sin(angle))


def mod_add(a: int, b: int, d: int) -> int:
    """Dit addition (a + b) mod d."""
    check_dim(d)
    _check_dit(a, d, "a")
    _check_dit(b, d, "b")
    return (a + b) % d


def phase_exponent(a: int, b: int, d: int) -> int:
    """Phase exponent (d - a*b) mod d carried by the post-hop expansion.

    Always lies in [0, d); equals the additive inverse of a*b mod d, so the
    matching correction exponent is a itself.
    """
    check_dim(d)
    _check_dit(a, d, "a")
    _check_dit(b, d, "b")
    return (d - a * b) % d


def flat_index(d: int, digits: Sequence[int]) -> int:
    """Big-endian base-d positional encoding of a digit string."""
    check_dim(d)
    index = 0
    for pos, digit in enumerate(digits):
        _check_dit(digit, d, f"digit[{pos}]")
        index = index * d + int(digit)
    return index


def basis_digits(d: int, num_qudits: int, index: int) -> tuple[int, ...]:
    """Inverse of flat_index: the big-endian digit string of a flat index."""
    check_dim(d)
    size = d**num_qudits
    if not 0 <= index < size:
        raise ValueError(f"index must be in [0, {size}), got {index}")
    out = [0] * num_qudits
    for pos in range(num_qudits - 1, -1, -1):
        index, out[pos] = divmod(index, d)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over a register of num_qudits qudits.

    Compared by identity; use np.allclose on .amps for value comparisons.
    """

    d: int
    num_qudits: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        check_dim(self.d)
        if not isinstance(self.num_qudits, (int, np.integer)) or self.num_qudits < 1:
            raise ValueError(f"num_qudits must be a positive integer, got {self.num_qudits!r}")
        amps = np.array(self.amps, dtype=np.complex128)
        expected = self.d**self.num_qudits
        if amps.shape != (expected,):
            raise ValueError(
                f"amplitude vector must have length {expected} (= {self.d}^{self.num_qudits}), "
                f"got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite (no NaN/Inf)")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > INTERNAL_TOL:
            raise ValueError(f"state norm must be 1 within {INTERNAL_TOL}, got {norm!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "num_qudits", int(self.num_qudits))
        object.__setattr__(self, "amps", amps)

    def probabilities(self) -> np.ndarray:
        """Born probabilities over the flat computational basis."""
        return np.abs(self.amps) ** 2

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qudit (read-only view)."""
        return self.amps.reshape((self.d,) * self.num_qudits)


def basis_state(d: int, num_qudits: int, digits: Sequence[int]) -> PureState:
    """Standard-basis state |digits> with big-endian digit order."""
    digits = tuple(digits)
    if len(digits) != num_qudits:
        raise ValueError(f"expected {num_qudits} digits, got {len(digits)}")
    amps = np.zeros(d**num_qudits, dtype=np.complex128)
    amps[flat_index(d, digits)] = 1.0
    return PureState(d, num_qudits, amps)


def make_state(d: int, amps: Sequence[complex]) -> PureState:
    """Build a state from raw amplitudes, renormalizing small input error.

    A norm deviation of at most INPUT_NORM_TOL is renormalized silently;
    anything larger (including the zero vector) raises ValidationError.
    Amplitude count must be an exact power of d.
    """
    check_dim(d)
    arr = np.asarray(amps, dtype=np.complex128)
    if arr.ndim != 1 or arr.size < d:
        raise ValidationError(f"amplitudes must be a flat sequence of length >= {d}")
    num_qudits = round(math.log(arr.size, d))
    if d**num_qudits != arr.size:
        raise ValidationError(f"amplitude count {arr.size} is not a power of d={d}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("amplitudes must be finite")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > INPUT_NORM_TOL:
        raise ValidationError(
            f"amplitudes must be normalized within {INPUT_NORM_TOL} (norm {norm!r})"
        )
    return PureState(d, num_qudits, arr / norm)


def random_state(d: int, num_qudits: int, rng: np.random.Generator) -> PureState:
    """Haar-like random pure state from complex normal amplitudes."""
    size = d**num_qudits
    amps = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return PureState(d, num_qudits, amps / np.linalg.norm(amps))


def _check_same_shape(x: PureState, y: PureState) -> None:
    if x.d != y.d or x.num_qudits != y.num_qudits:
        raise ValueError(
            f"shape mismatch: ({x.d}, {x.num_qudits} qudits) vs ({y.d}, {y.num_qudits} qudits)"
        )


def inner_product(x: PureState, y: PureState) -> complex:
    """Raw overlap <x|y> (conjugation on the first argument)."""
    _check_same_shape(x, y)
    return complex(np.vdot(x.amps, y.amps))


def fidelity(x: PureState, y: PureState) -> float:
    """Squared overlap |<x|y>|^2."""
    return abs(inner_product(x, y)) ** 2


def tensor_product(x: PureState, y: PureState) -> PureState:
    """Kronecker product x (x) y; x supplies the most significant digits."""
    if x.d != y.d:
        raise ValueError(f"dimension mismatch: {x.d} vs {y.d}")
    return PureState(x.d, x.num_qudits + y.num_qudits, np.kron(x.amps, y.amps))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix over kept qudits."""

    d: int
    mat: np.ndarray

    def __post_init__(self) -> None:
        check_dim(self.d)
        mat = np.array(self.mat, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        side = mat.shape[0]
        k = round(math.log(side, self.d))
        if self.d**k != side:
            raise ValueError(f"matrix side {side} is not a power of d={self.d}")
        if np.max(np.abs(mat - mat.conj().T)) > INTERNAL_TOL:
            raise ValueError("density matrix must be Hermitian")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > INTERNAL_TOL:
            raise ValueError(f"density matrix trace must be 1, got {trace!r}")
        if float(np.min(np.linalg.eigvalsh(mat))) < -INTERNAL_TOL:
            raise ValueError("density matrix must be positive semidefinite")
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)

    @property
    def num_qudits(self) -> int:
        return round(math.log(self.mat.shape[0], self.d))


def reduced_density(state: PureState, keep: int | Sequence[int]) -> DensityMatrix:
    """Partial trace keeping the given qudit (or qudits), tracing the rest."""
    keep_tuple = (keep,) if isinstance(keep, (int, np.integer)) else tuple(keep)
    if not keep_tuple:
        raise ValueError("must keep at least one qudit")
    if len(set(keep_tuple)) != len(keep_tuple):
        raise ValueError(f"kept qudit indices must be distinct, got {keep_tuple}")
    for q in keep_tuple:
        if not 0 <= q < state.num_qudits:
            raise ValueError(f"qudit index {q} out of range [0, {state.num_qudits})")
    others = [q for q in range(state.num_qudits) if q not in keep_tuple]
    tensor = np.moveaxis(state.tensor(), keep_tuple, range(len(keep_tuple)))
    block = tensor.reshape(state.d ** len(keep_tuple), state.d ** len(others))
    return DensityMatrix(state.d, block @ block.conj().T)
