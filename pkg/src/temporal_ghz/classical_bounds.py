"""
Classical temporal expectation E_t and its closed-form boundaries.

For a distribution p over timelines with outcome matrix Q (timeline j, witness i)
the classical expectation is

    E_t = ∏_i a_i,   a_i = Σ_j Q_ij p_j

The physical value is real; it is reported as Re(∏ a_i) together with the
magnitude of the imaginary part, which flags non-physical points.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import InvalidTimelineError, PreconditionError
from .phase_algebra import roots_of_unity
from .timelines import Distribution

logger = logging.getLogger(__name__)

DEFAULT_IMAG_TOL = 1e-9
QUANTUM_VALUE = -1.0
# single-photon measurement of the n=4 qubit witness product
MEASURED_REFERENCE = -0.656


class BoundMode(Enum):
    """Which closed-form boundary a measurement is compared against"""
    QUBIT = "qubit"
    CONTINUOUS = "continuous"


class Classification(Enum):
    QUANTUM_CERTIFIED = "quantum_certified"
    CLASSICALLY_EXPLAINABLE = "classically_explainable"


class Certification(Enum):
    """What backs a reported minimum for a given (n, d)"""
    CLOSED_FORM_QUBIT = "closed_form (qubit)"
    CLOSED_FORM_DIVISIBLE = "closed_form (d=kn)"
    UNCERTIFIED_ODD_N = "uncertified (odd n)"
    UNCERTIFIED_DIMENSION = "uncertified (n does not divide d)"

    @property
    def certified(self) -> bool:
        return self in (Certification.CLOSED_FORM_QUBIT, Certification.CLOSED_FORM_DIVISIBLE)


@dataclass(frozen=True)
class ObjectiveValue:
    """E_t as reported: the real part plus the size of the discarded imaginary part"""
    value: float
    imag_residual: float

    def is_physical(self, imag_tol: float = DEFAULT_IMAG_TOL) -> bool:
        return self.imag_residual <= imag_tol


# Vectorized kernels. Leading axes are batch axes: probs (..., J), phases (..., J, n).

def phase_matrix(exponents: np.ndarray, d: int) -> np.ndarray:
    """Complex outcomes Q_ij for an integer exponent array"""
    return roots_of_unity(d)[np.asarray(exponents) % d]


def slot_sums(probs: np.ndarray, phases: np.ndarray) -> np.ndarray:
    return np.einsum("...j,...jn->...n", probs.astype(np.complex128), phases)


def products_excluding(factors: np.ndarray) -> np.ndarray:
    """∏_{i' != i} a_{i'} for every i, via prefix and suffix products (no division)"""
    ones = np.ones(factors.shape[:-1] + (1,), dtype=factors.dtype)
    prefix = np.concatenate([ones, np.cumprod(factors[..., :-1], axis=-1)], axis=-1)
    suffix = np.concatenate([np.cumprod(factors[..., :0:-1], axis=-1)[..., ::-1], ones], axis=-1)
    return prefix * suffix


def raw_products(probs: np.ndarray, phases: np.ndarray) -> np.ndarray:
    return np.prod(slot_sums(probs, phases), axis=-1)


def raw_gradients(probs: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """∂ Re(∏ a_i) / ∂ p_j = Re(Σ_i (∏_{i'≠i} a_{i'}) Q_ij)"""
    excluded = products_excluding(slot_sums(probs, phases))
    return np.einsum("...n,...jn->...j", excluded, phases).real


def _arrays(dist: Distribution):
    if not isinstance(dist, Distribution):
        raise InvalidTimelineError(f"expected a Distribution, got {type(dist).__name__}")
    return dist.prob_vector(), phase_matrix(dist.exponent_matrix(), dist.d)


def factor_sums(dist: Distribution) -> np.ndarray:
    """The per-witness expectations a_i; each has modulus at most 1"""
    probs, phases = _arrays(dist)
    return slot_sums(probs, phases)


def evaluate(dist: Distribution) -> ObjectiveValue:
    """Classical temporal expectation of a timeline distribution"""
    probs, phases = _arrays(dist)
    product = complex(raw_products(probs, phases))
    return ObjectiveValue(value=product.real, imag_residual=abs(product.imag))


def gradient(dist: Distribution) -> np.ndarray:
    """Analytic gradient of Re E_t, one entry per supported timeline"""
    probs, phases = _arrays(dist)
    return raw_gradients(probs, phases)


def closed_form_qubit_min(n: int) -> float:
    """Minimum of E_t(n, 2) for even n: -((n-2)/n)^n"""
    if n < 4 or n % 2:
        raise PreconditionError(
            f"the qubit minimum is only proven for even n >= 4 (got n={n}); use minimize for odd n"
        )
    return -(((n - 2) / n) ** n)


def closed_form_continuous_min(n: int) -> float:
    """Minimum of E_t(n, ∞): -(cos π/n)^n, also reached for every d divisible by n"""
    if n < 2:
        raise PreconditionError(f"n must be at least 2 (got n={n})")
    return -(math.cos(math.pi / n) ** n)


def certification(n: int, d: int) -> Certification:
    if d == 2:
        return Certification.CLOSED_FORM_QUBIT if n >= 4 and n % 2 == 0 else Certification.UNCERTIFIED_ODD_N
    if n >= 3 and d % n == 0:
        return Certification.CLOSED_FORM_DIVISIBLE
    return Certification.UNCERTIFIED_DIMENSION


def certified_min(n: int, d: int) -> Optional[float]:
    """The proven minimum for (n, d), or None where nothing is proven"""
    cert = certification(n, d)
    if cert is Certification.CLOSED_FORM_QUBIT:
        return closed_form_qubit_min(n)
    if cert is Certification.CLOSED_FORM_DIVISIBLE:
        return closed_form_continuous_min(n)
    return None


def bound_for(n: int, mode: BoundMode) -> float:
    if mode is BoundMode.QUBIT:
        return closed_form_qubit_min(n)
    return closed_form_continuous_min(n)


def classify(measured: float, n: int, mode: BoundMode) -> Classification:
    """
    Decide whether a measured witness product certifies entangled histories.

    A value strictly below the classical minimum cannot come from any
    distribution over classical timelines.
    """
    if not -1.0 <= measured <= 1.0:
        raise PreconditionError(f"a witness product lies in [-1, 1] (got {measured})")
    mode = BoundMode(mode)
    bound = bound_for(n, mode)
    result = Classification.QUANTUM_CERTIFIED if measured < bound else Classification.CLASSICALLY_EXPLAINABLE
    logger.info(f"Measured {measured} vs {mode.value} bound {bound:.12g} for n={n}: {result.value}")
    return result


@dataclass(frozen=True)
class SeparationSummary:
    """Gap between the classical boundaries and the quantum value -1"""
    n: int
    quantum_value: float
    qubit_min: Optional[float]
    continuous_min: float
    qubit_gap: Optional[float]
    continuous_gap: float


def separation_summary(n: int) -> SeparationSummary:
    qubit = closed_form_qubit_min(n) if n >= 4 and n % 2 == 0 else None
    continuous = closed_form_continuous_min(n)
    return SeparationSummary(
        n=n,
        quantum_value=QUANTUM_VALUE,
        qubit_min=qubit,
        continuous_min=continuous,
        qubit_gap=None if qubit is None else qubit - QUANTUM_VALUE,
        continuous_gap=continuous - QUANTUM_VALUE,
    )
