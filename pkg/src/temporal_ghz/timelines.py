"""
Classical timelines and probability distributions over them.

A timeline assigns one d-th root of unity to each of the n witnesses and
must satisfy the product constraint ∏_i Q_i = 1, i.e. Σ_i k_i ≡ 0 (mod d).
Distributions keep a sparse support: the extremal constructions and the
optimizer's solutions use at most a handful of timelines.
"""

import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import (
    DimensionMismatchError,
    EnumerationTooLargeError,
    InvalidTimelineError,
    PreconditionError,
)
from .phase_algebra import PhaseExponent

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 10**7
SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class Timeline:
    """One classical assignment of outcomes to all n witnesses"""
    outcomes: Tuple[PhaseExponent, ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))

    @classmethod
    def from_exponents(cls, exponents: Iterable[int], d: int) -> "Timeline":
        return cls(tuple(PhaseExponent(int(k), d) for k in exponents))

    @property
    def n(self) -> int:
        return len(self.outcomes)

    @property
    def d(self) -> int:
        if not self.outcomes:
            raise InvalidTimelineError("a timeline needs at least one outcome")
        return self.outcomes[0].d

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(o.k for o in self.outcomes)

    def shifted(self, offsets: Sequence[int]) -> "Timeline":
        """Slot-wise residue addition"""
        return Timeline.from_exponents((k + c for k, c in zip(self.exponents, offsets)), self.d)

    def __str__(self) -> str:
        return "(" + ",".join(str(k) for k in self.exponents) + f") d={self.d}"


def validate_timeline(t: Timeline) -> bool:
    """
    Check the product constraint ∏_i Q_i = 1.

    Returns True iff the exponents sum to 0 mod d. Mixed dimensions inside
    one timeline are rejected with DimensionMismatchError.
    """
    dims = {o.d for o in t.outcomes}
    if len(dims) > 1:
        raise DimensionMismatchError(
            f"timeline mixes dimensions {sorted(dims)}; all outcomes must share one d"
        )
    if t.n < 2:
        return False
    return sum(t.exponents) % t.d == 0


@dataclass(frozen=True)
class Distribution:
    """
    Probability vector over a sparse set of valid timelines.

    Equal timelines passed to the constructor are merged and their
    probabilities added, so the support is always pairwise distinct.
    """
    support: Tuple[Timeline, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        support = tuple(self.support)
        probs = tuple(float(p) for p in self.probs)
        if len(support) != len(probs):
            raise InvalidTimelineError(
                f"support and probs must have equal lengths ({len(support)} != {len(probs)})"
            )
        if not support:
            raise InvalidTimelineError("a distribution needs a non-empty support")

        n, d = support[0].n, support[0].d
        merged: Dict[Tuple[int, ...], float] = {}
        for timeline, p in zip(support, probs):
            if timeline.n != n or timeline.d != d:
                raise DimensionMismatchError(
                    f"support mixes shapes: (n={n}, d={d}) and (n={timeline.n}, d={timeline.d})"
                )
            if not validate_timeline(timeline):
                raise InvalidTimelineError(f"timeline {timeline} violates the product constraint")
            if not math.isfinite(p) or p < 0:
                raise InvalidTimelineError(f"probabilities must be finite and non-negative (got {p})")
            merged[timeline.exponents] = merged.get(timeline.exponents, 0.0) + p

        total = math.fsum(merged.values())
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise InvalidTimelineError(f"probabilities must sum to 1 (got {total!r})")

        object.__setattr__(self, "support", tuple(Timeline.from_exponents(ks, d) for ks in merged))
        object.__setattr__(self, "probs", tuple(merged.values()))

    @property
    def n(self) -> int:
        return self.support[0].n

    @property
    def d(self) -> int:
        return self.support[0].d

    def exponent_matrix(self) -> np.ndarray:
        """Integer array of shape (len(support), n)"""
        return np.array([t.exponents for t in self.support], dtype=np.int64)

    def prob_vector(self) -> np.ndarray:
        return np.array(self.probs, dtype=np.float64)

    def with_probs(self, probs: Sequence[float]) -> "Distribution":
        return Distribution(self.support, tuple(probs))

    def pruned(self) -> "Distribution":
        """Drop timelines carrying exactly zero probability"""
        kept = [(t, p) for t, p in zip(self.support, self.probs) if p > 0.0]
        return Distribution(tuple(t for t, _ in kept), tuple(p for _, p in kept))

    def support_key(self) -> str:
        """Serialized sorted support; the deterministic tie-break between equal minima"""
        return json.dumps(sorted(list(t.exponents) for t in self.support))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "d": self.d,
            "support": [list(t.exponents) for t in self.support],
            "probs": list(self.probs),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Distribution":
        try:
            n, d = int(data["n"]), int(data["d"])
            support = tuple(Timeline.from_exponents(ks, d) for ks in data["support"])
            probs = tuple(float(p) for p in data["probs"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidTimelineError(f"malformed distribution document: {e}") from e
        if any(t.n != n for t in support):
            raise DimensionMismatchError(f"support timelines must all have n={n}")
        return cls(support, probs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Distribution":
        return cls.from_dict(json.loads(text))


def _check_shape(n: int, d: int) -> None:
    if n < 2:
        raise PreconditionError(f"n must be at least 2 (got {n})")
    if d < 2:
        raise PreconditionError(f"d must be at least 2 (got {d})")


def timeline_count(n: int, d: int) -> int:
    return d ** (n - 1)


def timeline_exponents(n: int, d: int, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """
    All valid exponent tuples as an array of shape (d^{n-1}, n), lexicographic.

    The first n-1 outcomes run over every residue; the last one is the unique
    value completing the product constraint.
    """
    _check_shape(n, d)
    count = timeline_count(n, d)
    if count > cap:
        raise EnumerationTooLargeError(count, cap)

    free = np.indices((d,) * (n - 1)).reshape(n - 1, -1).T
    last = (-free.sum(axis=1)) % d
    return np.column_stack([free, last]).astype(np.int64)


def enumerate_timelines(n: int, d: int, cap: int = DEFAULT_ENUMERATION_CAP) -> List[Timeline]:
    """Every valid timeline for n witnesses in dimension d, in lexicographic order"""
    rows = timeline_exponents(n, d, cap)
    logger.debug(f"Enumerated {len(rows)} timelines for n={n}, d={d}")
    return [Timeline.from_exponents(row, d) for row in rows]


def appendix_b_distribution(n: int) -> Distribution:
    """
    The qubit extremal construction: the all-ones timeline plus the n-1
    timelines flipping witness 1 and witness i, each with probability 1/n.
    Evaluates to -((n-2)/n)^n.
    """
    if n < 4 or n % 2:
        raise PreconditionError(
            f"the qubit construction needs an even number of witnesses n >= 4 (got n={n})"
        )
    support = [Timeline.from_exponents([0] * n, 2)]
    for i in range(1, n):
        exps = [0] * n
        exps[0] = 1
        exps[i] = 1
        support.append(Timeline.from_exponents(exps, 2))
    return Distribution(tuple(support), tuple([1.0 / n] * n))


def appendix_c_distribution(n: int, d: int) -> Distribution:
    """
    The divisible-dimension extremal construction: the all-ones timeline and
    the timeline with every outcome e^{2πi/n}, each with probability 1/2.
    Evaluates to -(cos π/n)^n and needs n | d.
    """
    if d < 2 or n < 3:
        raise PreconditionError(f"the construction needs n >= 3 and d >= 2 (got n={n}, d={d})")
    if d % n:
        raise PreconditionError(f"the construction needs n to divide d (got n={n}, d={d})")
    step = d // n
    support = (
        Timeline.from_exponents([0] * n, d),
        Timeline.from_exponents([step] * n, d),
    )
    return Distribution(support, (0.5, 0.5))


def uniform_distribution(n: int, d: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Distribution:
    """Equal weight on every valid timeline (the maximally mixed case)"""
    timelines = enumerate_timelines(n, d, cap)
    weight = 1.0 / len(timelines)
    return Distribution(tuple(timelines), tuple([weight] * len(timelines)))


def point_distribution(timeline: Timeline) -> Distribution:
    return Distribution((timeline,), (1.0,))


def canonical_shift(dist: Distribution) -> Distribution:
    """
    Translate the support so that its first timeline becomes all zeros.

    The offset is itself a valid timeline, so the product constraint and
    every objective value are preserved.
    """
    offsets = [-k for k in dist.support[0].exponents]
    return Distribution(tuple(t.shifted(offsets) for t in dist.support), dist.probs)


def random_timeline_exponents(n: int, d: int, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Sample `size` valid exponent tuples uniformly, shape (size, n)"""
    _check_shape(n, d)
    free = rng.integers(0, d, size=(size, n - 1))
    last = (-free.sum(axis=1)) % d
    return np.column_stack([free, last]).astype(np.int64)


def random_timeline(n: int, d: int, rng: np.random.Generator) -> Timeline:
    """Uniform sample from the valid timelines without enumerating them"""
    return Timeline.from_exponents(random_timeline_exponents(n, d, rng)[0], d)
