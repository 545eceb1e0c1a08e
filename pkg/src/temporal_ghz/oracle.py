"""
Brute-force oracle for the classical minimum of E_t(n, d).

Deliberately shares no code with the optimizer or the objective kernels:
timelines are enumerated with itertools, phases come straight from
numpy.exp, and probabilities walk an exhaustive grid. The result is an upper
bound on the true minimum that tightens as the grid is refined.
"""

import itertools
import logging
import math

import numpy as np

from .errors import PreconditionError

logger = logging.getLogger(__name__)

MAX_TIMELINES = 10**4
MIN_GRID_STEPS = 10
# slot permutations are folded into the support classes only up to this many
MAX_SLOT_PERMUTATIONS = 720
# complex entries per vectorized block
_BLOCK_BUDGET = 8_000_000


def _valid_exponent_rows(n: int, d: int) -> np.ndarray:
    rows = [ks for ks in itertools.product(range(d), repeat=n) if sum(ks) % d == 0]
    return np.array(rows, dtype=np.int64)


def _grid_points(grid_steps: int, size: int) -> np.ndarray:
    """Every way to split grid_steps into `size` positive parts, scaled to sum to 1"""
    combos = list(itertools.combinations(range(1, grid_steps), size - 1))
    cuts = np.array(combos, dtype=np.int64).reshape(len(combos), size - 1)
    edges = np.column_stack([np.zeros(len(cuts), dtype=np.int64), cuts, np.full(len(cuts), grid_steps)])
    return np.diff(edges, axis=1) / grid_steps


def _support_classes(supports: np.ndarray, d: int) -> np.ndarray:
    """
    One representative support per class of supports with equal grid values.

    Translating by a member, permuting the slots and negating every exponent
    all map the grid values of a support onto those of another (negation only
    conjugates the product). Each support of shape (size, n) is reduced to the
    smallest sorted tuple of row codes over these moves; the classes are
    decoded back to exponent arrays.
    """
    count, size, n = supports.shape
    place = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    if math.factorial(n) <= MAX_SLOT_PERMUTATIONS:
        orders = [list(order) for order in itertools.permutations(range(n))]
    else:
        orders = [list(range(n))]

    rows = np.arange(count)
    best = None
    for order in orders:
        for sign in (1, -1):
            moved = (sign * supports[:, :, order]) % d
            for member in range(size):
                codes = np.sort(((moved - moved[:, member:member + 1]) % d) @ place, axis=1)
                if best is None:
                    best = codes
                    continue
                differs = codes != best
                first = np.argmax(differs, axis=1)
                smaller = differs.any(axis=1) & (codes[rows, first] < best[rows, first])
                best[smaller] = codes[smaller]
    classes = np.unique(best, axis=0)
    return (classes[:, :, None] // place) % d


def brute_force_min(
    n: int,
    d: int,
    grid_steps: int,
    max_support: int = 4,
    imag_tol: float = 1e-9,
) -> float:
    """
    Minimum of E_t over every grid distribution on supports of size <= max_support.

    Only one support per symmetry class is walked (see _support_classes); every
    class contains a support with the all-zeros timeline. Points whose product
    has an imaginary part above imag_tol are not physical expectations and are
    skipped.
    """
    if n < 2 or d < 2:
        raise PreconditionError(f"the oracle needs n >= 2 and d >= 2 (got n={n}, d={d})")
    if d ** (n - 1) > MAX_TIMELINES:
        raise PreconditionError(
            f"the oracle is limited to {MAX_TIMELINES} timelines (d^(n-1) = {d ** (n - 1)})"
        )
    if grid_steps < MIN_GRID_STEPS:
        raise PreconditionError(f"grid_steps must be at least {MIN_GRID_STEPS} (got {grid_steps})")
    if max_support < 1:
        raise PreconditionError(f"max_support must be positive (got {max_support})")

    rows = _valid_exponent_rows(n, d)
    zero = int(np.flatnonzero(~rows.any(axis=1))[0])
    others = [j for j in range(len(rows)) if j != zero]

    best = math.inf
    for size in range(1, min(max_support, len(rows), grid_steps) + 1):
        grid = _grid_points(grid_steps, size).astype(np.complex128)
        combos = list(itertools.combinations(others, size - 1))
        index = np.column_stack([
            np.full(len(combos), zero),
            np.array(combos, dtype=np.int64).reshape(len(combos), size - 1),
        ])
        classes = _support_classes(rows[index], d)
        block = max(1, _BLOCK_BUDGET // (len(grid) * n))
        for start in range(0, len(classes), block):
            chosen = np.exp(2j * np.pi * classes[start:start + block] / d)  # (S, size, n)
            products = np.prod(np.matmul(grid, chosen), axis=-1)             # (S, G)
            physical = np.abs(products.imag) <= imag_tol
            if physical.any():
                best = min(best, float(products.real[physical].min()))
        logger.debug(
            f"Oracle n={n}, d={d}: {len(classes)} support classes of size {size} "
            f"(from {len(index)}), best so far {best:.12g}"
        )

    logger.info(f"Oracle minimum for n={n}, d={d}, grid={grid_steps}: {best:.12g}")
    return best
