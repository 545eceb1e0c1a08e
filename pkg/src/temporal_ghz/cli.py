"""
Command-line surface: classical boundaries, sweeps and scans, the quantum
witness check, the odd-dimension no-go check, classification of measured
values, and a desk-scale self verification.

Exit status is 0 on success, 1 on a runtime failure and 2 on a usage or
precondition error. Reports go to stdout as markdown; logs go to stderr.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import pandas as pd

from .classical_bounds import (
    BoundMode,
    bound_for,
    certification,
    certified_min,
    classify,
    closed_form_continuous_min,
    closed_form_qubit_min,
    evaluate,
    separation_summary,
)
from .errors import PreconditionError, TemporalGHZError
from .optimizer import BoundsConfig, minimize
from .oracle import brute_force_min
from .quantum_histories import (
    PauliConvention,
    ghz_history_state,
    odd_dimension_nogo_check,
    temporal_witness_family,
    verify_ghz_paradox,
    witness_expectation,
)
from .settings import load_settings
from .tables import SweepMode, dimension_scan, render_markdown, sweep, write_table
from .timelines import appendix_b_distribution, appendix_c_distribution

logger = logging.getLogger("TemporalGHZ")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
NOGO_WORD_POOL = 20
VERIFY_GRID_STEPS = 20
VERIFY_TOL = 2e-3


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.12g}"


def _complex_text(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.3g}i" if abs(z.imag) > 1e-12 else f"{z.real:.12g}"


def _report(title: str, rows: Sequence[Sequence], columns: Sequence[str]) -> str:
    return f"# {title}\n\n" + pd.DataFrame(list(rows), columns=list(columns)).to_markdown(index=False) + "\n"


def _qubit_fraction(n: int) -> str:
    return f"-{Fraction(n - 2, n) ** n}"


def cmd_bound(args: argparse.Namespace, cfg: BoundsConfig) -> int:
    result = minimize(args.n, args.d, cfg)
    cert = certification(args.n, args.d)
    closed = certified_min(args.n, args.d)
    rows = [
        ("numeric minimum", _fmt(result.best_value)),
        ("closed form", _fmt(closed)),
        ("certification", cert.value),
        ("strategy", result.strategy),
        ("termination", result.termination.value),
        ("support size", len(result.best_distribution.support)),
        ("restarts converged", f"{result.converged_restarts}/{result.restarts_run}"),
        ("rejected candidates", result.rejected_candidates),
        ("seed", result.seed),
    ]
    if closed is not None and args.d == 2:
        rows.insert(2, ("closed form (exact)", _qubit_fraction(args.n)))
    if closed is not None:
        rows.insert(2, ("gap to closed form", f"{result.best_value - closed:.3g}"))
    print(_report(f"Classical boundary for n={args.n}, d={args.d}", rows, ["quantity", "value"]))
    for warning in result.warnings:
        logger.warning(warning)

    if args.out:
        with open(args.out, "w", newline="\n") as f:
            f.write(json.dumps(result.to_dict(), indent=2) + "\n")
        logger.info(f"Wrote optimizer result to {args.out}")
    if result.converged_restarts == 0:
        logger.error(
            f"None of the {result.restarts_run} restarts converged (best termination: {result.termination.value})"
        )
        return 1
    return 0


def _parse_modes(text: str) -> List[SweepMode]:
    return [SweepMode.parse(part) for part in text.split(",") if part.strip()]


def cmd_sweep(args: argparse.Namespace, cfg: BoundsConfig) -> int:
    table = sweep(args.n_min, args.n_max, _parse_modes(args.mode), cfg)
    if args.out:
        write_table(table, args.out, args.format)
    print(f"# Classical boundaries for n={args.n_min}..{args.n_max}\n\n{render_markdown(table)}\n")
    return 0


def cmd_scan(args: argparse.Namespace, cfg: BoundsConfig) -> int:
    table = dimension_scan(args.n, args.d_min, args.d_max, cfg)
    if args.out:
        write_table(table, args.out, args.format)
    print(f"# Dimension scan for n={args.n}\n\n{render_markdown(table)}\n")
    return 0


def _family_rows(m: int, convention: PauliConvention):
    state = ghz_history_state(m)
    words = temporal_witness_family(m)
    report = verify_ghz_paradox(state, words, convention)
    rows = [(str(w), _complex_text(e)) for w, e in zip(words, report.eigenvalues)]
    return words, report, rows


def cmd_quantum(args: argparse.Namespace, cfg: BoundsConfig) -> int:
    words, report, rows = _family_rows(args.m, PauliConvention.ORDER_D)
    _, literal, _ = _family_rows(args.m, PauliConvention.LITERAL)
    if abs(literal.quantum_product - report.quantum_product) > 1e-9:
        logger.warning(
            f"The unnormalized Y changes the witness product from {_complex_text(report.quantum_product)} "
            f"to {_complex_text(literal.quantum_product)} (is_paradox={literal.is_paradox})"
        )
    summary = [
        ("witnesses", len(words)),
        ("product", _complex_text(report.quantum_product)),
        ("common eigenvector", report.is_common_eigenvector),
        ("classical product forced to 1", report.classical_product_constraint_holds),
        ("is_paradox", report.is_paradox),
    ]
    print(_report(f"GHZ history witnesses for m={args.m}", rows, ["word", "expectation"]))
    print(_report("Paradox check", summary, ["quantity", "value"]))
    if args.out:
        with open(args.out, "w", newline="\n") as f:
            f.write(json.dumps(report.to_dict(), indent=2) + "\n")
    return 0


def cmd_nogo(args: argparse.Namespace, cfg: BoundsConfig) -> int:
    report = odd_dimension_nogo_check(args.d, args.m, NOGO_WORD_POOL, args.seed if args.seed is not None else cfg.seed)
    rows = [(key, value) for key, value in report.to_dict().items()]
    print(_report(f"Odd-dimension no-go check for d={args.d}, m={args.m}", rows, ["quantity", "value"]))
    if args.out:
        with open(args.out, "w", newline="\n") as f:
            f.write(json.dumps(report.to_dict(), indent=2) + "\n")
    if report.minus_one_found:
        logger.error(f"Found an eigenvalue -1 in odd dimension d={args.d}")
        return 1
    return 0


def cmd_classify(args: argparse.Namespace, cfg: BoundsConfig) -> int:
    mode = BoundMode(args.mode)
    result = classify(args.value, args.n, mode)
    bound = bound_for(args.n, mode)
    rows = [
        ("measured", _fmt(args.value)),
        (f"{mode.value} bound", _fmt(bound)),
        ("quantum value", _fmt(separation_summary(args.n).quantum_value)),
        ("classification", result.value),
    ]
    print(_report(f"Classification for n={args.n}", rows, ["quantity", "value"]))
    return 0


def _verify_checks(seed: int) -> List[tuple]:
    checks = []

    def check(name: str, value: float, expected: float, tol: float):
        checks.append((name, _fmt(value), _fmt(expected), abs(value - expected) <= tol))

    for n in (4, 6, 8):
        check(f"qubit construction n={n}", evaluate(appendix_b_distribution(n)).value, closed_form_qubit_min(n), 1e-12)
    for n, d in ((3, 3), (4, 4), (4, 8), (5, 5)):
        check(
            f"continuous construction n={n}, d={d}",
            evaluate(appendix_c_distribution(n, d)).value,
            closed_form_continuous_min(n),
            1e-12,
        )
    check("oracle n=4, d=2", brute_force_min(4, 2, VERIFY_GRID_STEPS), closed_form_qubit_min(4), VERIFY_TOL)
    check("oracle n=4, d=4", brute_force_min(4, 4, VERIFY_GRID_STEPS), closed_form_continuous_min(4), VERIFY_TOL)

    state = ghz_history_state(3)
    for word, expected in zip(temporal_witness_family(3), (-1.0, 1.0, 1.0, 1.0)):
        value = witness_expectation(state, word)
        checks.append((f"expectation {word}", _complex_text(value), _fmt(expected), abs(value - expected) <= 1e-10))
    for m in (3, 5, 7):
        report = verify_ghz_paradox(ghz_history_state(m), temporal_witness_family(m))
        checks.append((f"paradox m={m}", _complex_text(report.quantum_product), "-1", report.is_paradox))
    for d in (3, 5):
        report = odd_dimension_nogo_check(d, 2, NOGO_WORD_POOL, seed)
        passed = report.all_eigenvalues_in_S and not report.minus_one_found
        checks.append((f"no-go d={d}", f"{report.words_checked} words", "no -1", passed))
    return checks


def cmd_verify(args: argparse.Namespace, cfg: BoundsConfig) -> int:
    checks = _verify_checks(args.seed if args.seed is not None else cfg.seed)
    print(_report("Self verification", checks, ["check", "value", "expected", "passed"]))
    failed = [name for name, _, _, passed in checks if not passed]
    if failed:
        logger.error(f"{len(failed)} checks failed: {', '.join(failed)}")
        return 1
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, BoundsConfig], int]] = {
    "bound": cmd_bound,
    "sweep": cmd_sweep,
    "scan": cmd_scan,
    "quantum": cmd_quantum,
    "nogo": cmd_nogo,
    "classify": cmd_classify,
    "verify": cmd_verify,
}


def _output_options(parser: argparse.ArgumentParser, formats: bool = True) -> None:
    parser.add_argument("--out", help="Write the result to this file")
    if formats:
        parser.add_argument("--format", choices=["csv", "json"], default="csv", help="Output file format")


def _optimizer_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="Seed for random restarts (overrides the settings file)")
    parser.add_argument("--restarts", type=int, help="Number of random restarts (overrides the settings file)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="temporal-ghz",
        description="Classical and quantum predictions for temporal GHZ tests on entangled histories",
    )
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--config", help="Optimizer settings JSON (default ~/.temporal_ghz/config.json)")
    commands = parser.add_subparsers(dest="command", required=True)

    bound = commands.add_parser("bound", help="Minimize E_t(n, d) and compare with the closed forms")
    bound.add_argument("--n", type=int, required=True)
    bound.add_argument("--d", type=int, required=True)
    _optimizer_options(bound)
    _output_options(bound, formats=False)

    sweep_cmd = commands.add_parser("sweep", help="Boundary table over a range of n")
    sweep_cmd.add_argument("--n-min", type=int, required=True)
    sweep_cmd.add_argument("--n-max", type=int, required=True)
    sweep_cmd.add_argument("--mode", default="qubit,continuous", help="Comma list of qubit, continuous, numeric(d)")
    _optimizer_options(sweep_cmd)
    _output_options(sweep_cmd)

    scan = commands.add_parser("scan", help="Numeric minima of E_t(n, d) over a range of d")
    scan.add_argument("--n", type=int, required=True)
    scan.add_argument("--d-min", type=int, required=True)
    scan.add_argument("--d-max", type=int, required=True)
    _optimizer_options(scan)
    _output_options(scan)

    quantum = commands.add_parser("quantum", help="Check the GHZ history witness family for m time nodes")
    quantum.add_argument("--m", type=int, required=True)
    _output_options(quantum, formats=False)

    nogo = commands.add_parser("nogo", help="Check that odd dimensions never produce the eigenvalue -1")
    nogo.add_argument("--d", type=int, required=True)
    nogo.add_argument("--m", type=int, required=True)
    nogo.add_argument("--seed", type=int)
    _output_options(nogo, formats=False)

    classify_cmd = commands.add_parser("classify", help="Compare a measured witness product with a classical bound")
    classify_cmd.add_argument("--value", type=float, required=True)
    classify_cmd.add_argument("--n", type=int, required=True)
    classify_cmd.add_argument("--mode", choices=[m.value for m in BoundMode], required=True)

    verify = commands.add_parser("verify", help="Re-check the closed forms, oracle, witnesses and no-go at desk scale")
    verify.add_argument("--seed", type=int)
    return parser


def _config_for(args: argparse.Namespace) -> BoundsConfig:
    cfg = load_settings(args.config)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "restarts", None) is not None:
        overrides["restarts"] = args.restarts
    return cfg.replace(**overrides).validate() if overrides else cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr)

    try:
        cfg = _config_for(args)
        return COMMANDS[args.command](args, cfg)
    except PreconditionError as e:
        logger.error(f"{args.command}: {e}")
        parser.print_usage(sys.stderr)
        return 2
    except (TemporalGHZError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
