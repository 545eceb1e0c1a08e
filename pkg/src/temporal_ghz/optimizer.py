"""
Numerical minimization of the classical temporal expectation E_t(n, d).

The search combines three strategies and keeps the lowest physical value:

1. the extremal constructions, whenever their preconditions hold;
2. an exact search over small supports drawn from the enumerated timelines;
3. random-restart projected gradient descent on random sparse supports.

Every candidate is polished by projected gradient descent on its fixed
support. The descent is batched: many supports of the same size advance in
lockstep as rows of one numpy array, each row with its own step size.
"""

import dataclasses
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .classical_bounds import evaluate, phase_matrix, raw_gradients, raw_products
from .errors import EnumerationTooLargeError, OptimizationError, PreconditionError
from .timelines import (
    DEFAULT_ENUMERATION_CAP,
    Distribution,
    Timeline,
    appendix_b_distribution,
    appendix_c_distribution,
    random_timeline_exponents,
    timeline_exponents,
)

logger = logging.getLogger(__name__)

MAX_HALVINGS = 30
EXACT_SEARCH_MAX_SUPPORT = 4
# stationarity reachable once line-search gains drop below float resolution
STALL_TOLERANCE = 100 * math.sqrt(np.finfo(np.float64).eps)


class Termination(Enum):
    GRADIENT_NORM = "gradient_norm"
    MAX_ITERS = "max_iters"
    SUPPORT_EXHAUSTED = "support_exhausted"


_TERMINATIONS = list(Termination)
_GRADIENT_NORM = _TERMINATIONS.index(Termination.GRADIENT_NORM)
_MAX_ITERS = _TERMINATIONS.index(Termination.MAX_ITERS)
_SUPPORT_EXHAUSTED = _TERMINATIONS.index(Termination.SUPPORT_EXHAUSTED)


@dataclass(frozen=True)
class BoundsConfig:
    """Optimizer settings; support_cap=None means 2n, support_search_cap=None means no cap"""
    restarts: int = 64
    max_iters: int = 2000
    step_init: float = 0.1
    grad_tol: float = 1e-10
    imag_tol: float = 1e-9
    support_cap: Optional[int] = None
    seed: int = 0
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    support_search_cap: Optional[int] = 10**5
    workers: int = 1
    tie_tol: float = 1e-12

    def validate(self) -> "BoundsConfig":
        for name in ("restarts", "max_iters", "enumeration_cap", "workers"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise PreconditionError(f"{name} must be a positive integer (got {value!r})")
        for name in ("step_init", "grad_tol", "imag_tol", "tie_tol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise PreconditionError(f"{name} must be a positive number (got {value!r})")
        if self.support_cap is not None and (not isinstance(self.support_cap, int) or self.support_cap < 1):
            raise PreconditionError(f"support_cap must be a positive integer (got {self.support_cap!r})")
        if self.support_search_cap is not None and (
            not isinstance(self.support_search_cap, int) or self.support_search_cap < 1
        ):
            raise PreconditionError(f"support_search_cap must be a positive integer (got {self.support_search_cap!r})")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise PreconditionError(f"seed must be a non-negative integer (got {self.seed!r})")
        return self

    def support_cap_for(self, n: int) -> int:
        return self.support_cap if self.support_cap is not None else 2 * n

    def replace(self, **changes: Any) -> "BoundsConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoundsConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            logger.warning(f"Ignoring unknown optimizer settings: {', '.join(unknown)}")
        return cls(**{k: v for k, v in data.items() if k in known}).validate()

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass
class OptResult:
    """Best physical minimum found by minimize"""
    best_value: float
    best_distribution: Distribution
    restarts_run: int
    converged_restarts: int
    seed: int
    termination: Termination
    imag_residual: float = 0.0
    strategy: str = ""
    rejected_candidates: int = 0
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best_value": self.best_value,
            "best_distribution": self.best_distribution.to_dict(),
            "restarts_run": self.restarts_run,
            "converged_restarts": self.converged_restarts,
            "seed": self.seed,
            "termination": self.termination.value,
            "imag_residual": self.imag_residual,
            "strategy": self.strategy,
            "rejected_candidates": self.rejected_candidates,
            "warnings": list(self.warnings),
        }


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """
    Euclidean projection of every row of v onto the probability simplex.

    Sort-and-threshold: with u sorted descending, rho is the last index where
    u_j - (Σ_{i<=j} u_i - 1)/j > 0 and the threshold is (Σ_{i<=rho} u_i - 1)/rho.
    """
    v = np.asarray(v, dtype=np.float64)
    k = v.shape[-1]
    u = np.sort(v, axis=-1)[..., ::-1]
    css = np.cumsum(u, axis=-1) - 1.0
    ranks = np.arange(1, k + 1, dtype=np.float64)
    positive = u - css / ranks > 0
    rho = k - np.argmax(positive[..., ::-1], axis=-1)
    theta = np.take_along_axis(css, (rho - 1)[..., None], axis=-1) / rho[..., None]
    return np.maximum(v - theta, 0.0)


@dataclass
class _Batch:
    """Candidates sharing one support size; rows advance together"""
    origin: str
    exponents: np.ndarray  # (B, k, n) int
    probs: np.ndarray      # (B, k)


@dataclass
class _Outcome:
    origin: str
    exponents: np.ndarray
    probs: np.ndarray
    values: np.ndarray
    residuals: np.ndarray
    terminations: np.ndarray  # indices into _TERMINATIONS


def _stalled_status(p: np.ndarray, grad: np.ndarray, stationarity: np.ndarray) -> np.ndarray:
    """
    Termination of rows whose line search found no decrease within MAX_HALVINGS.

    A row counts as converged when its stationarity is below STALL_TOLERANCE
    scaled by the gradient size. Otherwise a row left on a single timeline has
    nothing more to redistribute, and any other row ran out of step budget.
    """
    floor = STALL_TOLERANCE * (1.0 + np.abs(grad).max(axis=-1))
    collapsed = np.count_nonzero(p > 0, axis=-1) <= 1
    return np.where(stationarity <= floor, _GRADIENT_NORM, np.where(collapsed, _SUPPORT_EXHAUSTED, _MAX_ITERS))


def _descend(batch: _Batch, d: int, cfg: BoundsConfig) -> _Outcome:
    """Projected gradient descent with per-row backtracking on each fixed support"""
    phases = phase_matrix(batch.exponents, d)
    p = project_to_simplex(batch.probs)
    values = raw_products(p, phases).real
    status = np.full(len(p), -1)

    for _ in range(cfg.max_iters):
        rows = np.flatnonzero(status < 0)
        if rows.size == 0:
            break
        grad = raw_gradients(p[rows], phases[rows])
        stationarity = np.linalg.norm(p[rows] - project_to_simplex(p[rows] - grad), axis=-1)
        done = stationarity < cfg.grad_tol
        status[rows[done]] = _GRADIENT_NORM
        rows, grad, stationarity = rows[~done], grad[~done], stationarity[~done]

        step = np.full(rows.size, cfg.step_init)
        pending = np.ones(rows.size, dtype=bool)
        for _ in range(MAX_HALVINGS + 1):
            if not pending.any():
                break
            local = np.flatnonzero(pending)
            trial = project_to_simplex(p[rows[local]] - step[local, None] * grad[local])
            trial_values = raw_products(trial, phases[rows[local]]).real
            better = trial_values < values[rows[local]]
            accepted = local[better]
            p[rows[accepted]] = trial[better]
            values[rows[accepted]] = trial_values[better]
            pending[accepted] = False
            step[pending] *= 0.5
        if pending.any():
            status[rows[pending]] = _stalled_status(p[rows[pending]], grad[pending], stationarity[pending])

    status[status < 0] = _MAX_ITERS
    residuals = np.abs(raw_products(p, phases).imag)
    return _Outcome(batch.origin, batch.exponents, p, values, residuals, status)


def _lifted_qubit_construction(n: int, d: int) -> Distribution:
    """The qubit construction embedded in an even dimension via -1 = ε^{d/2}"""
    base = appendix_b_distribution(n)
    half = d // 2
    support = tuple(Timeline.from_exponents([k * half for k in t.exponents], d) for t in base.support)
    return Distribution(support, base.probs)


def _construction_batches(n: int, d: int) -> List[_Batch]:
    constructions = []
    if d % 2 == 0 and n >= 4 and n % 2 == 0:
        constructions.append(_lifted_qubit_construction(n, d))
    if n >= 3 and d % n == 0:
        constructions.append(appendix_c_distribution(n, d))
    return [
        _Batch("construction", dist.exponent_matrix()[None], dist.prob_vector()[None])
        for dist in constructions
    ]


def _support_search_batches(n: int, d: int, cfg: BoundsConfig, warnings: List[str]) -> List[_Batch]:
    """
    Uniform starting points on every support of size <= 4 that contains the
    all-zeros timeline. Translating a distribution by one of its own timelines
    preserves E_t, so these supports represent every support up to symmetry.
    """
    try:
        timelines = timeline_exponents(n, d, cfg.enumeration_cap)
    except EnumerationTooLargeError as e:
        warnings.append(f"support search skipped, using constructions and random restarts only: {e}")
        logger.warning(f"Support search skipped for n={n}, d={d}: {e}")
        return []

    batches = []
    visited = 0
    others = len(timelines) - 1
    for size in range(1, min(cfg.support_cap_for(n), EXACT_SEARCH_MAX_SUPPORT) + 1):
        count = math.comb(others, size - 1)
        if count == 0:
            break
        take = count if cfg.support_search_cap is None else min(count, cfg.support_search_cap - visited)
        if take <= 0:
            break
        combos = itertools.islice(itertools.combinations(range(1, len(timelines)), size - 1), take)
        index = np.column_stack([
            np.zeros(take, dtype=np.int64),
            np.array(list(combos), dtype=np.int64).reshape(take, size - 1),
        ])
        batches.append(_Batch("support_search", timelines[index], np.full((take, size), 1.0 / size)))
        visited += take
        if take < count:
            warnings.append(
                f"support search covered {take} of {count} supports of size {size}: "
                f"support_search_cap={cfg.support_search_cap}"
            )
            logger.warning(f"Support search for n={n}, d={d} is partial at size {size} ({take}/{count})")
            break
    logger.info(f"Support search for n={n}, d={d} covers {visited} canonical supports")
    return batches


def _restart_batches(n: int, d: int, cfg: BoundsConfig) -> List[_Batch]:
    """One row per restart, each from its own child seed of cfg.seed"""
    size = cfg.support_cap_for(n)
    exponents = np.empty((cfg.restarts, size, n), dtype=np.int64)
    probs = np.empty((cfg.restarts, size))
    for r, child in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)):
        rng = np.random.default_rng(child)
        exponents[r] = random_timeline_exponents(n, d, rng, size)
        probs[r] = rng.dirichlet(np.ones(size))
    chunks = np.array_split(np.arange(cfg.restarts), min(cfg.workers, cfg.restarts))
    return [_Batch("restart", exponents[c], probs[c]) for c in chunks if c.size]


def _to_distribution(exponents: np.ndarray, probs: np.ndarray, d: int) -> Distribution:
    support = tuple(Timeline.from_exponents(row, d) for row in exponents)
    return Distribution(support, tuple(float(p) for p in probs)).pruned()


def minimize(n: int, d: int, cfg: Optional[BoundsConfig] = None) -> OptResult:
    """
    Search for the minimum of E_t(n, d) over distributions of valid timelines.

    Candidates whose product keeps an imaginary part above cfg.imag_tol are
    not physical expectations and are rejected. The result is deterministic
    given cfg; ties within cfg.tie_tol go to the lexicographically smallest
    serialized support.
    """
    cfg = (cfg or BoundsConfig()).validate()
    if n < 3 or d < 2:
        raise PreconditionError(f"minimize needs n >= 3 and d >= 2 (got n={n}, d={d})")

    warnings: List[str] = []
    logger.info(f"Minimizing E_t(n={n}, d={d}) with {cfg.restarts} restarts, seed={cfg.seed}")
    batches = (
        _construction_batches(n, d)
        + _support_search_batches(n, d, cfg, warnings)
        + _restart_batches(n, d, cfg)
    )

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(lambda b: _descend(b, d, cfg), batches))
    else:
        outcomes = [_descend(b, d, cfg) for b in batches]

    converged = sum(
        int(np.count_nonzero(o.terminations == _GRADIENT_NORM))
        for o in outcomes if o.origin == "restart"
    )

    accepted: List[Tuple[float, _Outcome, int]] = []
    rejected = 0
    for outcome in outcomes:
        physical = (outcome.residuals <= cfg.imag_tol) & np.isfinite(outcome.values)
        rejected += int(np.count_nonzero(~physical))
        accepted.extend((float(outcome.values[i]), outcome, int(i)) for i in np.flatnonzero(physical))
    if rejected:
        logger.info(f"Rejected {rejected} candidates with imaginary residual above {cfg.imag_tol}")
    if not accepted:
        raise OptimizationError(
            f"no physical candidate for n={n}, d={d}: all {rejected} candidates kept an imaginary part"
        )

    lowest = min(value for value, _, _ in accepted)
    ties = []
    for value, outcome, i in accepted:
        if value <= lowest + cfg.tie_tol:
            dist = _to_distribution(outcome.exponents[i], outcome.probs[i], d)
            ties.append((dist.support_key(), dist, outcome, i))
    key, best, outcome, i = min(ties, key=lambda t: t[0])

    objective = evaluate(best)
    result = OptResult(
        best_value=objective.value,
        best_distribution=best,
        restarts_run=cfg.restarts,
        converged_restarts=converged,
        seed=cfg.seed,
        termination=_TERMINATIONS[int(outcome.terminations[i])],
        imag_residual=objective.imag_residual,
        strategy=outcome.origin,
        rejected_candidates=rejected,
        warnings=warnings,
    )
    logger.info(
        f"E_t(n={n}, d={d}) minimum {result.best_value:.12g} from {result.strategy} "
        f"({len(accepted)} accepted, {rejected} rejected, {converged}/{cfg.restarts} restarts converged)"
    )
    return result
