"""
Boundary tables: sweeps over the number of witnesses and scans over the
dimension, with CSV / JSON / markdown rendering.
"""

import json
import logging
import math
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional

import pandas as pd

from .classical_bounds import (
    certification,
    closed_form_continuous_min,
    closed_form_qubit_min,
)
from .errors import PreconditionError
from .optimizer import BoundsConfig, minimize

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["n", "mode", "min_value", "certified"]
SCAN_COLUMNS = ["n", "d", "min_value", "continuous_min", "gap", "divisible", "certified"]
SIGNIFICANT_DIGITS = 12
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"

_NUMERIC_MODE = re.compile(r"^numeric\((\d+)\)$")


@dataclass(frozen=True, order=True)
class SweepMode:
    """qubit, continuous, or numeric(d)"""
    kind: str
    d: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "SweepMode":
        text = text.strip().lower()
        if text in ("qubit", "continuous"):
            return cls(text)
        match = _NUMERIC_MODE.match(text)
        if match:
            d = int(match.group(1))
            if d < 2:
                raise PreconditionError(f"numeric mode needs d >= 2 (got {text})")
            return cls("numeric", d)
        raise PreconditionError(f"unknown mode {text!r}; expected qubit, continuous or numeric(d)")

    @property
    def label(self) -> str:
        return f"numeric({self.d})" if self.kind == "numeric" else self.kind


def sweep(
    n_min: int,
    n_max: int,
    modes: Iterable[SweepMode],
    cfg: Optional[BoundsConfig] = None,
) -> pd.DataFrame:
    """
    Classical boundary for every n in [n_min, n_max] and every mode.

    Qubit rows only exist for even n; rows are sorted by n, then mode label.
    """
    if not 3 <= n_min <= n_max:
        raise PreconditionError(f"sweep needs 3 <= n_min <= n_max (got {n_min}..{n_max})")
    modes = sorted(set(modes), key=lambda m: m.label)
    if not modes:
        raise PreconditionError("sweep needs at least one mode")

    rows = []
    for n in range(n_min, n_max + 1):
        for mode in modes:
            if mode.kind == "qubit":
                if n % 2:
                    continue
                rows.append((n, mode.label, closed_form_qubit_min(n), "closed_form"))
            elif mode.kind == "continuous":
                rows.append((n, mode.label, closed_form_continuous_min(n), "closed_form"))
            else:
                rows.append((n, mode.label, minimize(n, mode.d, cfg).best_value, "numeric"))
    logger.info(f"Sweep {n_min}..{n_max} over {[m.label for m in modes]}: {len(rows)} rows")
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def dimension_scan(n: int, d_min: int, d_max: int, cfg: Optional[BoundsConfig] = None) -> pd.DataFrame:
    """
    Numeric minima of E_t(n, d) for d in [d_min, d_max] against the continuous bound.

    Dimensions divisible by n reach the bound; the others stay above it.
    """
    if n < 3 or not 2 <= d_min <= d_max:
        raise PreconditionError(f"scan needs n >= 3 and 2 <= d_min <= d_max (got n={n}, d={d_min}..{d_max})")
    bound = closed_form_continuous_min(n)
    rows = []
    for d in range(d_min, d_max + 1):
        value = minimize(n, d, cfg).best_value
        rows.append((n, d, value, bound, value - bound, d % n == 0, certification(n, d).value))
    return pd.DataFrame(rows, columns=SCAN_COLUMNS)


def _rounded(value):
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and math.isfinite(value):
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    return value


def to_records(table: pd.DataFrame) -> List[dict]:
    return [
        {column: _rounded(value) for column, value in zip(table.columns, row)}
        for row in table.astype(object).itertuples(index=False, name=None)
    ]


def render_csv(table: pd.DataFrame) -> str:
    return table.to_csv(index=False, lineterminator="\n", float_format=FLOAT_FORMAT)


def render_json(table: pd.DataFrame) -> str:
    return json.dumps(to_records(table), indent=2) + "\n"


def render_markdown(table: pd.DataFrame) -> str:
    return table.to_markdown(index=False, floatfmt=f".{SIGNIFICANT_DIGITS}g")


def render(table: pd.DataFrame, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(table)
    if fmt == "json":
        return render_json(table)
    raise PreconditionError(f"unknown output format {fmt!r}; expected csv or json")


def write_table(table: pd.DataFrame, path: str, fmt: str) -> None:
    text = render(table, fmt)
    with open(path, "w", newline="\n") as f:
        f.write(text)
    logger.info(f"Wrote {len(table)} rows to {path} ({fmt})")
