"""
Exact arithmetic over d-th roots of unity.

A root of unity e^{2πik/d} is stored as the integer residue k mod d, so the
product constraint on timelines is an integer congruence. Conversion to
complex numbers only happens at evaluation boundaries.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, PreconditionError

ComplexValue = complex


@dataclass(frozen=True, order=True)
class PhaseExponent:
    """The root of unity e^{2πik/d}, canonicalized to 0 <= k < d"""
    k: int
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise PreconditionError(f"dimension must be a positive integer (got {self.d})")
        object.__setattr__(self, "k", self.k % self.d)

    def __mul__(self, other: "PhaseExponent") -> "PhaseExponent":
        if not isinstance(other, PhaseExponent):
            return NotImplemented
        return phase_mul(self, other)

    def inverse(self) -> "PhaseExponent":
        return PhaseExponent(-self.k, self.d)

    def __complex__(self) -> complex:
        return phase_to_complex(self)

    def __str__(self) -> str:
        return f"ε^{self.k} (d={self.d})"


def _check_same_dimension(a: PhaseExponent, b: PhaseExponent) -> None:
    if a.d != b.d:
        raise DimensionMismatchError(
            f"cannot combine phases of different dimensions: d={a.d} and d={b.d}"
        )


def phase_mul(a: PhaseExponent, b: PhaseExponent) -> PhaseExponent:
    """Multiply two roots of unity of the same dimension"""
    _check_same_dimension(a, b)
    return PhaseExponent(a.k + b.k, a.d)


def unit_root(k: int, d: int) -> complex:
    """
    e^{2πik/d} as a complex number.

    Quarter turns are returned exactly, so products of real-valued outcomes
    (d = 2) and of the d = 4 phases carry no spurious imaginary parts.
    """
    k %= d
    if (4 * k) % d == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[(4 * k) // d]
    # use the representative closest to zero for the best trig accuracy
    signed = k - d if 2 * k > d else k
    angle = 2.0 * math.pi * signed / d
    return complex(math.cos(angle), math.sin(angle))


def phase_to_complex(a: PhaseExponent) -> ComplexValue:
    """Embed a PhaseExponent into the complex unit circle"""
    return unit_root(a.k, a.d)


@lru_cache(maxsize=128)
def _roots_table(d: int) -> np.ndarray:
    table = np.array([unit_root(k, d) for k in range(d)], dtype=np.complex128)
    table.flags.writeable = False
    return table


def roots_of_unity(d: int) -> np.ndarray:
    """Read-only array whose k-th entry is e^{2πik/d}"""
    if d < 1:
        raise PreconditionError(f"dimension must be a positive integer (got {d})")
    return _roots_table(d)


def weighted_phase_sum(phases: Sequence[PhaseExponent], weights: Sequence[float]) -> ComplexValue:
    """
    Σ_j w_j · e^{2πik_j/d}: one inner sum of the classical temporal expectation.

    Args:
        phases: outcomes of one witness slot across the supported timelines
        weights: non-negative probabilities, one per phase

    Returns:
        The convex-combination point, with modulus at most Σ weights.
    """
    if len(phases) != len(weights):
        raise PreconditionError(
            f"phases and weights must have equal lengths ({len(phases)} != {len(weights)})"
        )
    if any(w < 0 for w in weights):
        raise PreconditionError("weights must be non-negative")
    if phases:
        first = phases[0]
        for phase in phases[1:]:
            _check_same_dimension(first, phase)

    total = 0j
    for phase, weight in zip(phases, weights):
        total += weight * phase_to_complex(phase)
    return total


def distance_to_nearest_root(value: complex, d: int) -> float:
    """Distance from a complex number to the closest d-th root of unity"""
    return float(np.min(np.abs(roots_of_unity(d) - value)))
