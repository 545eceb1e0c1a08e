"""
Quantum side of the temporal GHZ test.

History states over m time nodes are handled as ordinary state vectors in
the tensor product of the per-node spaces: the probability of a history
outcome equals that of the same outcome on a normal state, so expectations
of temporal witnesses are plain inner products ⟨ψ|W|ψ⟩.

Operators follow the shift/phase definitions with basis indices 0..d-1:

    X|k⟩ = |k+1 mod d⟩      Z|k⟩ = ε^k |k⟩      Y|k⟩ = ε^k |k-1 mod d⟩

The Y written this way satisfies Y^d = (-1)^{d-1}, so for even d it is not
of order d (at d = 2 it is -i times the Pauli Y). The default "order_d"
convention multiplies it by e^{iπ(d-1)/d}, which restores Y^d = 1, gives the
usual Pauli Y at d = 2, and only rescales by a d-th root of unity for odd d.
The unnormalized matrices stay available as the "literal" convention.
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatchError, PreconditionError
from .phase_algebra import distance_to_nearest_root, roots_of_unity, unit_root

logger = logging.getLogger(__name__)

EIGEN_TOL = 1e-9
ROOT_TOL = 1e-8
NORM_TOL = 1e-12
MAX_DENSE_DIM = 10**4


class PauliKind(Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"


class PauliConvention(Enum):
    ORDER_D = "order_d"
    LITERAL = "literal"


@dataclass(frozen=True)
class GeneralizedPauli:
    """A d-dimensional shift/phase unitary; `phase` is the factor applied on top of the literal formula"""
    kind: PauliKind
    d: int
    matrix: np.ndarray = field(repr=False, compare=False)
    phase: complex = 1 + 0j

    def power(self, exponent: int) -> np.ndarray:
        return np.linalg.matrix_power(self.matrix, exponent)


def _literal_matrix(kind: PauliKind, d: int) -> np.ndarray:
    eps = roots_of_unity(d)
    matrix = np.zeros((d, d), dtype=np.complex128)
    for k in range(d):
        if kind is PauliKind.I:
            matrix[k, k] = 1.0
        elif kind is PauliKind.X:
            matrix[(k + 1) % d, k] = 1.0
        elif kind is PauliKind.Y:
            matrix[(k - 1) % d, k] = eps[k]
        else:
            matrix[k, k] = eps[k]
    return matrix


@functools.lru_cache(maxsize=256)
def _pauli(kind: PauliKind, d: int, convention: PauliConvention) -> GeneralizedPauli:
    if d < 2:
        raise PreconditionError(f"generalized Pauli operators need d >= 2 (got d={d})")
    matrix = _literal_matrix(kind, d)
    phase = 1 + 0j
    if kind is PauliKind.Y and convention is PauliConvention.ORDER_D:
        # e^{iπ(d-1)/d} = e^{2πi(d-1)/(2d)}
        phase = unit_root(d - 1, 2 * d)
        matrix = phase * matrix
    matrix.flags.writeable = False
    return GeneralizedPauli(kind=kind, d=d, matrix=matrix, phase=phase)


def generalized_pauli(
    kind: Union[PauliKind, str],
    d: int,
    convention: Union[PauliConvention, str] = PauliConvention.ORDER_D,
) -> GeneralizedPauli:
    """The X, Y, Z or I operator in dimension d"""
    return _pauli(PauliKind(kind), d, PauliConvention(convention))


def literal_pauli(kind: Union[PauliKind, str], d: int) -> GeneralizedPauli:
    """The operator exactly as the shift/phase formula writes it, without phase normalization"""
    return generalized_pauli(kind, d, PauliConvention.LITERAL)


@dataclass(frozen=True)
class WitnessWord:
    """One Pauli letter per time node"""
    letters: Tuple[PauliKind, ...]
    d: int = 2

    def __post_init__(self):
        letters = tuple(PauliKind(letter) for letter in self.letters)
        if len(letters) < 2:
            raise PreconditionError(f"a witness word needs at least 2 letters (got {len(letters)})")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str, d: int = 2) -> "WitnessWord":
        return cls(tuple(PauliKind(ch) for ch in text.strip().upper()), d)

    @property
    def m(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "".join(letter.value for letter in self.letters)


@dataclass(frozen=True)
class HistoryState:
    """Amplitudes over the d^m basis histories, first time node most significant"""
    m: int
    d: int
    amplitudes: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != (self.d ** self.m,):
            raise DimensionMismatchError(
                f"a history state over m={self.m} nodes in d={self.d} needs {self.d ** self.m} "
                f"amplitudes (got shape {amplitudes.shape})"
            )
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise PreconditionError(f"history states must have unit norm (got {norm!r})")
        amplitudes.flags.writeable = False
        object.__setattr__(self, "amplitudes", amplitudes)


def ghz_history_state(m: int) -> HistoryState:
    """(|0…0⟩ - |1…1⟩)/√2 over m qubit time nodes"""
    if m < 2:
        raise PreconditionError(f"a GHZ history needs at least 2 time nodes (got m={m})")
    amplitudes = np.zeros(2 ** m, dtype=np.complex128)
    amplitudes[0] = 1 / math.sqrt(2)
    amplitudes[-1] = -1 / math.sqrt(2)
    return HistoryState(m=m, d=2, amplitudes=amplitudes)


def _basis_index(state: HistoryState, outcomes: Sequence[int]) -> int:
    if len(outcomes) != state.m:
        raise DimensionMismatchError(f"expected {state.m} outcomes (got {len(outcomes)})")
    for k in outcomes:
        if not 0 <= k < state.d:
            raise PreconditionError(f"basis index {k} out of range [0, {state.d})")
    return int(np.ravel_multi_index(tuple(outcomes), (state.d,) * state.m))


def history_amplitude(state: HistoryState, basis_outcomes: Sequence[int]) -> complex:
    """⟨i_1 … i_m|ψ⟩; its squared modulus is the probability of that history"""
    return complex(state.amplitudes[_basis_index(state, basis_outcomes)])


def history_probabilities(state: HistoryState) -> Dict[Tuple[int, ...], float]:
    """Probability of every basis history with a non-zero amplitude"""
    probs = np.abs(state.amplitudes) ** 2
    return {
        tuple(int(k) for k in np.unravel_index(i, (state.d,) * state.m)): float(probs[i])
        for i in np.flatnonzero(probs > 0)
    }


def _check_word(state: HistoryState, word: WitnessWord) -> None:
    if word.d != state.d or word.m != state.m:
        raise DimensionMismatchError(
            f"word {word} (m={word.m}, d={word.d}) does not act on a state with m={state.m}, d={state.d}"
        )


def apply_word(
    state: HistoryState,
    word: WitnessWord,
    convention: PauliConvention = PauliConvention.ORDER_D,
) -> np.ndarray:
    """W|ψ⟩, applying one letter per time node on the reshaped amplitude tensor"""
    _check_word(state, word)
    tensor = state.amplitudes.reshape((state.d,) * state.m)
    for slot, letter in enumerate(word.letters):
        if letter is PauliKind.I:
            continue
        matrix = generalized_pauli(letter, state.d, convention).matrix
        tensor = np.moveaxis(np.tensordot(matrix, tensor, axes=([1], [slot])), 0, slot)
    return tensor.reshape(-1)


def word_matrix(word: WitnessWord, convention: PauliConvention = PauliConvention.ORDER_D) -> np.ndarray:
    """Dense Kronecker product of the word's letters"""
    if word.d ** word.m > MAX_DENSE_DIM:
        raise PreconditionError(f"dense operators are limited to dimension {MAX_DENSE_DIM}")
    matrices = [generalized_pauli(letter, word.d, convention).matrix for letter in word.letters]
    return functools.reduce(np.kron, matrices)


def witness_expectation(
    state: HistoryState,
    w: WitnessWord,
    convention: PauliConvention = PauliConvention.ORDER_D,
) -> complex:
    """⟨ψ|W|ψ⟩"""
    return complex(np.vdot(state.amplitudes, apply_word(state, w, convention)))


def temporal_witness_family(m: int) -> List[WitnessWord]:
    """
    n = m + 1 qubit witnesses for m time nodes: all-X, then for each node i
    the word with Y on nodes i and i+1 (cyclically) and X elsewhere.

    Every node sees Y twice and X m-1 times, so the classical outcome product
    is forced to 1 exactly when m is odd. For m = 3 this is the set
    {XXX, YYX, XYY, YXY}.
    """
    if m < 3 or m % 2 == 0:
        raise PreconditionError(
            f"the witness family is only certified for odd m >= 3 (got m={m}); "
            "even m gives an odd X count per node"
        )
    words = [WitnessWord((PauliKind.X,) * m)]
    for i in range(m):
        letters = [PauliKind.X] * m
        letters[i] = PauliKind.Y
        letters[(i + 1) % m] = PauliKind.Y
        words.append(WitnessWord(tuple(letters)))
    return words


def classical_constraint_holds(words: Sequence[WitnessWord]) -> bool:
    """
    True when, on every node, each letter occurs a multiple of d times.

    Treating each letter's classical value as a fixed d-th root of unity, the
    product over all words is then 1 whatever the values are.
    """
    if not words:
        return False
    d, m = words[0].d, words[0].m
    for slot in range(m):
        counts: Dict[PauliKind, int] = {}
        for word in words:
            letter = word.letters[slot]
            if letter is not PauliKind.I:
                counts[letter] = counts.get(letter, 0) + 1
        if any(count % d for count in counts.values()):
            return False
    return True


def _complex_pair(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


@dataclass
class ParadoxReport:
    is_common_eigenvector: bool
    eigenvalues: List[complex]
    quantum_product: complex
    classical_product_constraint_holds: bool
    is_paradox: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_common_eigenvector": self.is_common_eigenvector,
            "eigenvalues": [_complex_pair(z) for z in self.eigenvalues],
            "quantum_product": _complex_pair(self.quantum_product),
            "classical_product_constraint_holds": self.classical_product_constraint_holds,
            "is_paradox": self.is_paradox,
        }


def verify_ghz_paradox(
    state: HistoryState,
    words: Sequence[WitnessWord],
    convention: PauliConvention = PauliConvention.ORDER_D,
) -> ParadoxReport:
    """
    Check that the state is a common eigenvector of every witness, that the
    eigenvalue product is -1, and that the classical outcome product is forced to 1.
    """
    if not words:
        raise PreconditionError("a paradox check needs at least one witness word")
    for word in words:
        _check_word(state, word)

    eigenvalues = []
    common = True
    for word in words:
        image = apply_word(state, word, convention)
        eigenvalue = complex(np.vdot(state.amplitudes, image))
        residual = float(np.linalg.norm(image - eigenvalue * state.amplitudes))
        if residual >= EIGEN_TOL:
            logger.debug(f"State is not an eigenvector of {word} (residual {residual:.3g})")
            common = False
        eigenvalues.append(eigenvalue)

    product = complex(np.prod(eigenvalues))
    constraint = classical_constraint_holds(words)
    paradox = common and constraint and abs(product + 1) < EIGEN_TOL
    logger.info(
        f"Paradox check over {len(words)} words: product {product.real:+.12g}{product.imag:+.3g}j, "
        f"common eigenvector={common}, classical constraint={constraint}"
    )
    return ParadoxReport(
        is_common_eigenvector=common,
        eigenvalues=eigenvalues,
        quantum_product=product,
        classical_product_constraint_holds=constraint,
        is_paradox=paradox,
    )


@dataclass
class NoGoReport:
    all_eigenvalues_in_S: bool
    minus_one_found: bool
    d: int = 0
    m: int = 0
    words_checked: int = 0
    max_root_distance: float = 0.0
    min_distance_to_minus_one: float = math.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "all_eigenvalues_in_S": self.all_eigenvalues_in_S,
            "minus_one_found": self.minus_one_found,
            "d": self.d,
            "m": self.m,
            "words_checked": self.words_checked,
            "max_root_distance": self.max_root_distance,
            "min_distance_to_minus_one": self.min_distance_to_minus_one,
        }


def _nogo_operators(d: int, m: int, max_word_pool: int, seed: int) -> Iterable[np.ndarray]:
    letters = [generalized_pauli(kind, d).matrix for kind in PauliKind]
    # every word with a single letter per node
    for choice in np.ndindex(*(len(letters),) * m):
        yield functools.reduce(np.kron, [letters[c] for c in choice])

    # random products of letters on every node
    rng = np.random.default_rng(seed)
    for _ in range(max_word_pool):
        factors = []
        for _ in range(m):
            node = np.eye(d, dtype=np.complex128)
            for c in rng.integers(1, len(letters), size=int(rng.integers(1, 5))):
                node = node @ letters[c]
            factors.append(node)
        yield functools.reduce(np.kron, factors)


def odd_dimension_nogo_check(d: int, m: int, max_word_pool: int, seed: int = 0) -> NoGoReport:
    """
    Numerically confirm that words of generalized Pauli operators in odd
    dimension only have eigenvalues among the d-th roots of unity, and hence
    never -1.
    """
    if d < 3 or d % 2 == 0:
        raise PreconditionError(f"the no-go check is about odd d >= 3 (got d={d})")
    if m < 1:
        raise PreconditionError(f"m must be positive (got m={m})")
    if d ** m > MAX_DENSE_DIM:
        raise PreconditionError(f"d^m = {d ** m} exceeds the dense eigensolver limit {MAX_DENSE_DIM}")
    if max_word_pool < 0:
        raise PreconditionError(f"max_word_pool must be non-negative (got {max_word_pool})")

    report = NoGoReport(all_eigenvalues_in_S=True, minus_one_found=False, d=d, m=m)
    for operator in _nogo_operators(d, m, max_word_pool, seed):
        eigenvalues = np.linalg.eigvals(operator)
        root_distance = max(distance_to_nearest_root(z, d) for z in eigenvalues)
        minus_one_distance = float(np.min(np.abs(eigenvalues + 1)))
        report.words_checked += 1
        report.max_root_distance = max(report.max_root_distance, root_distance)
        report.min_distance_to_minus_one = min(report.min_distance_to_minus_one, minus_one_distance)
        if root_distance >= ROOT_TOL:
            report.all_eigenvalues_in_S = False
        if minus_one_distance < ROOT_TOL:
            report.minus_one_found = True
    logger.info(
        f"No-go check d={d}, m={m}: {report.words_checked} words, max root distance "
        f"{report.max_root_distance:.3g}, minus one found={report.minus_one_found}"
    )
    return report
