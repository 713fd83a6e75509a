#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Photon-budget numerics from the command line: capacities under an energy
budget, the logarithmic capacity staircase, the discrimination error bound,
spectra of symmetric coherent-state mixtures, information-spectrum property
sweeps and a PPM simulator.

ENV (.env):
  # Optional; command-line flags win over these, these win over .env
  PHOTON_BUDGET_THREADS=8        # hard cap on worker threads
  PHOTON_BUDGET_SEED=0           # default --seed
  PHOTON_BUDGET_FORMAT=table     # table | csv | json
  PHOTON_BUDGET_OUTPUT=          # output file; empty writes to stdout
  PHOTON_BUDGET_TOL=1e-12        # spectral truncation tolerance

Notes:
- Results go to stdout (or --output). Diagnostics go to stderr as [WARN],
  [DEBUG] (with --debug) and [FAIL] lines, closed by a "Done." line.
- All information quantities are in nats; --bits rescales them by 1/ln 2.
  Inputs (such as --R) are always nats.
- CSV files start with '#' provenance lines, then a header row. Floats are
  written with repr so they parse back to the same double.
- spectrum thresholds c must not be integers; an integer c is moved to
  c + 1e-9 with a [WARN] line.

CLI:
  python photon_budget.py capacity --E 1 --K 100 --format json
  python photon_budget.py capacity --E 1 --sweep K=1:1000000:7:log --format csv --output cap.csv
  python photon_budget.py loglaw --epsilon 0.95 --E 1
  python photon_budget.py loglaw --epsilon 0.05 --m 1
  python photon_budget.py bound --E 1 --M 2 --oracle
  python photon_budget.py bound --E 30 --R 10
  python photon_budget.py spectrum --E 1 --c 1.5 --N 1000000
  python photon_budget.py spectrum --E 2 --atoms 1.0:0.5,1.4:0.5 --N 100 --blocks
  python photon_budget.py infospec-test --instances 500 --seed 7 --dump bad.json
  python photon_budget.py ppm --E 1 --N 16 --trials 1000000 --seed 3

Exit codes: 0 success, 1 usage or domain error, 2 a property or oracle check failed.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from dotenv import load_dotenv
from tqdm import tqdm

from capacity import PeriodConfig, capacity_row
from discrimination import (
    EXPLICIT_MAX_M,
    SymmetricEnsemble,
    asymptotic_error,
    classify_regime,
    covariant_measurement_check,
    covariant_success,
    error_lower_bound,
    explicit_povm_check,
    srm_success_oracle,
)
from infospec import DEFAULT_DIMS, DEFAULT_RATIOS, PROPERTIES, run_sweep
from loglaw import log_capacity, min_energy, poisson_cdf
from numerics import DomainError, EigenSolverError
from ppm import PpmCode, consistency_with_bound, log_rate, simulate
from spectrum import (
    RadialMixture,
    block_table,
    eigenvalue_sandwich_check,
    lower_bound_check,
    upper_bound_check,
)

ENV_THREADS = "PHOTON_BUDGET_THREADS"
ENV_SEED = "PHOTON_BUDGET_SEED"
ENV_FORMAT = "PHOTON_BUDGET_FORMAT"
ENV_OUTPUT = "PHOTON_BUDGET_OUTPUT"
ENV_TOL = "PHOTON_BUDGET_TOL"

FORMATS = ("table", "csv", "json")
DEFAULT_DUMP = "infospec_counterexamples.json"
DEFAULT_SHARDS = 8
ORACLE_ATOL = 1e-10
PPM_MAX_SIGMA = 4.0
MAX_FAIL_LINES = 20
INTEGER_NUDGE = 1e-9

INTEGER_VARIABLES = ("K", "M", "N")

# columns measured in nats; --bits rescales these and nothing else
INFO_COLUMNS = {
    "holevo_per_pulse",
    "period_capacity",
    "period_expansion",
    "gaussian_period_capacity",
    "gaussian_expansion",
    "gaussian_ceiling",
    "R",
}

DESCRIPTIONS = {
    "capacity": "coherent-state capacity K*C(E/K) vs Gaussian K/2 ln(1+E/(KV)) under a shared budget E",
    "loglaw": "logarithmic-order capacity: largest m with Poisson(E) cdf(m) <= epsilon",
    "bound": "covariant-measurement error lower bound for M codewords at energy E",
    "spectrum": "spectral cdf of a unitarily invariant coherent-state mixture over N modes",
    "infospec-test": "information-spectrum inequalities on seeded random instances",
    "ppm": "pulse-position modulation with an on-off decoder, exact and Monte-Carlo",
}

Row = Dict[str, Any]


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """argparse with usage errors raised instead of exiting with status 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.format_usage().rstrip()}\n{self.prog}: error: {message}")


# ------------------------ configuration ------------------------


def env_value(name: str, cast: Callable[[str], Any], default: Any) -> Any:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return cast(raw.strip())
    except ValueError:
        raise UsageError(f"{name}={raw!r} is not a valid {cast.__name__}")


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


@dataclass
class RunConfig:
    fmt: str
    output: Optional[Path]
    bits: bool
    workers: int
    seed: Optional[int]
    tol: float
    debug: bool
    progress: bool


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cap = env_value(ENV_THREADS, int, None)
    if cap is not None and cap < 1:
        raise UsageError(f"{ENV_THREADS} must be a positive integer, got {cap}")
    workers = args.threads or min(8, os.cpu_count() or 1)
    if cap is not None:
        workers = min(workers, cap)

    fmt = args.format or env_value(ENV_FORMAT, str, "table")
    if fmt not in FORMATS:
        raise UsageError(f"{ENV_FORMAT} must be one of {', '.join(FORMATS)}, got {fmt!r}")

    output = args.output or env_value(ENV_OUTPUT, str, None)
    tol = env_value(ENV_TOL, float, 1e-12)
    if not (0 < tol < 1):
        raise UsageError(f"{ENV_TOL} must lie in (0, 1), got {tol}")

    return RunConfig(
        fmt=fmt,
        output=Path(output) if output else None,
        bits=args.bits,
        workers=workers,
        seed=args.seed if args.seed is not None else env_value(ENV_SEED, int, 0),
        tol=tol,
        debug=args.debug,
        progress=not args.no_progress,
    )


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable: VAR=START:STOP:STEPS[:log] or VAR=v1,v2,..."""

    variable: str
    values: Tuple[Any, ...]

    @classmethod
    def parse(cls, text: str, allowed: Sequence[str]) -> "SweepSpec":
        name, sep, body = text.partition("=")
        name = name.strip()
        if not sep or not body.strip():
            raise UsageError(f"--sweep expects VAR=START:STOP:STEPS[:log] or VAR=v1,v2,..., got {text!r}")
        if name not in allowed:
            raise UsageError(f"--sweep variable {name!r} is not one of {', '.join(allowed)} for this command")
        try:
            if ":" in body:
                parts = body.split(":")
                if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
                    raise ValueError(body)
                start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
                if steps < 1:
                    raise ValueError(body)
                if len(parts) == 4:
                    if start <= 0 or stop <= 0:
                        raise UsageError("a log sweep needs positive endpoints")
                    grid = np.geomspace(start, stop, steps)
                else:
                    grid = np.linspace(start, stop, steps)
                values = [float(v) for v in grid]
            else:
                values = [float(v) for v in body.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"--sweep range {body!r} is not valid")
        if not values:
            raise UsageError("--sweep range is empty")
        if name in INTEGER_VARIABLES:
            values = [int(round(v)) for v in values]
        return cls(variable=name, values=tuple(values))


# ------------------------ output ------------------------


@dataclass
class Outcome:
    params: Dict[str, Any]
    rows: List[Row]
    failures: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    return value


def to_bits(rows: List[Row]) -> List[Row]:
    scale = 1.0 / math.log(2.0)
    return [{k: (v * scale if k in INFO_COLUMNS and isinstance(v, float) else v) for k, v in r.items()} for r in rows]


def columns_of(rows: List[Row]) -> List[str]:
    cols: List[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def _cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_table(rows: List[Row]) -> str:
    cols = columns_of(rows)
    if not cols:
        return "(no rows)\n"

    def fmt(v: Any) -> str:
        v = _plain(v)
        if isinstance(v, float):
            return f"{v:.10g}"
        return "" if v is None else str(v)

    cells = [[fmt(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells)
    return "\n".join(lines) + "\n"


def render_csv(rows: List[Row], provenance: List[str]) -> str:
    buf = io.StringIO()
    for line in provenance:
        buf.write(f"# {line}\n")
    writer = csv.DictWriter(buf, fieldnames=columns_of(rows), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def render_json(params: Dict[str, Any], rows: List[Row], provenance: List[str]) -> str:
    data = {"params": params, "rows": rows, "provenance": provenance}
    return json.dumps(data, indent=2, sort_keys=True, default=_plain) + "\n"


def write_output(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = output.with_suffix(output.suffix + ".tmp")
    with tmp_path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    tmp_path.replace(output)


def provenance_lines(command: str, params: Dict[str, Any], cfg: RunConfig) -> List[str]:
    return [
        f"operation: {command}",
        f"quantity: {DESCRIPTIONS[command]}",
        f"params: {json.dumps(params, sort_keys=True, default=_plain)}",
        f"units: {'bits' if cfg.bits else 'nats'}",
    ]


# ------------------------ sweeps ------------------------


def sweep_rows(
    args: argparse.Namespace,
    cfg: RunConfig,
    params: Dict[str, Any],
    row_fn: Callable[[Dict[str, Any]], Tuple[List[Row], List[str]]],
) -> Tuple[List[Row], List[str]]:
    points = [params]
    if args.sweep:
        spec = SweepSpec.parse(args.sweep, args.sweep_vars)
        points = [dict(params, **{spec.variable: v}) for v in spec.values]
        if cfg.debug:
            print(f"[DEBUG] sweep {spec.variable} over {len(points)} point(s)", file=sys.stderr)

    rows: List[Row] = []
    failures: List[str] = []
    pbar = tqdm(points, unit="point", desc=args.command, disable=not cfg.progress or len(points) < 2)
    for point in pbar:
        r, f = row_fn(point)
        rows.extend(r)
        failures.extend(f)
    pbar.close()
    return rows, failures


# ------------------------ subcommands ------------------------


def cmd_capacity(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    params = {"E": args.E, "K": args.K, "V": args.V}

    def row(p: Dict[str, Any]) -> Tuple[List[Row], List[str]]:
        return [capacity_row(PeriodConfig(E=p["E"], K=p["K"], V=p["V"]))], []

    rows, failures = sweep_rows(args, cfg, params, row)
    return Outcome(params, rows, failures)


def cmd_loglaw(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    params = {"epsilon": args.epsilon, "E": args.E, "m": args.m}

    def row(p: Dict[str, Any]) -> Tuple[List[Row], List[str]]:
        if p["m"] is not None:
            E_min = min_energy(p["m"], p["epsilon"])
            return [{"m": p["m"], "epsilon": p["epsilon"], "min_energy": E_min,
                     "cdf_at_min_energy": poisson_cdf(E_min, p["m"])}], []
        res = log_capacity(p["epsilon"], p["E"])
        m_star = res.m_star if res.has_rate else str(res.m_star)
        return [{"epsilon": p["epsilon"], "E": p["E"], "m_star": m_star,
                 "cdf_at_m": res.cdf_at_m, "cdf_at_m_plus_1": res.cdf_at_m_plus_1}], []

    rows, failures = sweep_rows(args, cfg, params, row)
    return Outcome(params, rows, failures)


def cmd_bound(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    if args.M is not None and args.R is not None:
        raise UsageError("give either --M or --R, not both")
    if args.R is not None:
        if not (math.isfinite(args.R) and args.R >= 0):
            raise DomainError(f"R must be finite and >= 0, got {args.R}")
        try:
            M_base = int(math.ceil(math.exp(args.R)))
        except OverflowError:
            raise DomainError(f"R = {args.R} is too large: e^R overflows a double")
    else:
        M_base = args.M if args.M is not None else 2
    params = {"E": args.E, "M": M_base, "R": args.R, "oracle": args.oracle}

    def row(p: Dict[str, Any]) -> Tuple[List[Row], List[str]]:
        E, M = p["E"], p["M"]
        # a given R only describes the unswept M = ceil(e^R)
        R = p["R"] if p["R"] is not None and M == M_base else math.log(M)
        tag = classify_regime(E, R)
        out: Row = {
            "E": E,
            "M": M,
            "R": R,
            "bound": error_lower_bound(E, M),
            "regime": tag.regime.value,
            "A": tag.A,
            "asymptotic": asymptotic_error(E, R, tag),
        }
        failures: List[str] = []
        if p["oracle"]:
            ens = SymmetricEnsemble.from_energy(E, M)
            expected = covariant_success(ens)
            oracle = srm_success_oracle(ens)
            out["covariant_success"] = expected
            out["oracle_success"] = oracle
            out["oracle_gap"] = abs(oracle - expected)
            if out["oracle_gap"] > ORACLE_ATOL:
                failures.append(f"SRM oracle disagrees at E={E}, M={M}: gap {out['oracle_gap']:.3e}")
            cov = covariant_measurement_check(ens)
            out["covariant_povm_holds"] = cov.holds
            if not cov.holds:
                failures.append(f"covariant POVM check failed at E={E}, M={M}: {cov}")
            if M <= EXPLICIT_MAX_M:
                povm = explicit_povm_check(ens)
                out["completeness_residual"] = povm.completeness_residual
                out["explicit_povm_holds"] = povm.holds
                if not povm.holds:
                    failures.append(f"explicit SRM check failed at E={E}, M={M}: {povm}")
        return [out], failures

    rows, failures = sweep_rows(args, cfg, params, row)
    return Outcome(params, rows, failures)


def parse_atoms(text: str) -> List[Tuple[float, float]]:
    pairs: List[Tuple[float, float]] = []
    for item in text.split(","):
        r, sep, q = item.partition(":")
        if not sep:
            raise UsageError(f"--atoms expects r:q pairs, got {item!r}")
        try:
            pairs.append((float(r), float(q)))
        except ValueError:
            raise UsageError(f"--atoms expects numbers, got {item!r}")
    return pairs


def nudge_threshold(c: float) -> float:
    """Integer thresholds sit on a block boundary; move them just above it."""
    if math.isfinite(c) and c > 0 and c == math.floor(c):
        nudged = c + INTEGER_NUDGE
        warnings.warn(f"c = {c:g} is an integer; using c = {nudged!r}", RuntimeWarning, stacklevel=2)
        return nudged
    return c


def cmd_spectrum(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    atoms = parse_atoms(args.atoms) if args.atoms else None
    tol = args.tol if args.tol is not None else cfg.tol
    params = {"E": args.E, "N": args.N, "c": args.c, "atoms": args.atoms, "tol": tol, "blocks": args.blocks}

    def row(p: Dict[str, Any]) -> Tuple[List[Row], List[str]]:
        E, N, c = p["E"], p["N"], p["c"]
        mix = RadialMixture.from_pairs(atoms, E) if atoms else RadialMixture.delta(E)
        failures: List[str] = []
        if p["blocks"]:
            rows: List[Row] = []
            for b in block_table(N, mix, tol):
                r: Row = {"E": E, "N": N, "n": b.n, "weight": b.weight,
                          "log_eigenvalue": b.log_eigenvalue, "log_multiplicity": b.log_multiplicity}
                if b.n >= 1 and N >= 2:
                    sw = eigenvalue_sandwich_check(b.n, N, mix)
                    r["neg_log_ratio"] = sw.neg_log_ratio
                    r["sandwich_bound"] = sw.bound
                    r["strict_form_holds"] = sw.strict_form_holds
                    if not sw.holds:
                        failures.append(f"eigenvalue sandwich failed at n={b.n}, N={N}: {sw}")
                rows.append(r)
            return rows, failures

        c = nudge_threshold(c)
        upper = upper_bound_check(c, N, mix, tol)
        lower = lower_bound_check(c, N, mix, tol)
        out: Row = {
            "E": E,
            "N": N,
            "c": c,
            "spectral_cdf": upper.lhs,
            "head_weight": upper.rhs,
            "upper_holds": upper.holds,
            "deficit": lower.deficit,
            "deficit_bound": lower.bound,
            "condition_met": lower.condition_met,
            "lower_holds": lower.holds,
        }
        if atoms is None:
            out["poisson_limit"] = poisson_cdf(E, int(math.floor(c)))
        if not upper.holds:
            failures.append(f"spectral cdf exceeds head weight at E={E}, N={N}, c={c}: {upper}")
        if not lower.holds:
            failures.append(f"deficit bound failed at E={E}, N={N}, c={c}: {lower}")
        return [out], failures

    rows, failures = sweep_rows(args, cfg, params, row)
    return Outcome(params, rows, failures)


def cmd_infospec(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    params = {
        "instances": args.instances,
        "dims": list(args.dims),
        "ratios": list(args.ratios),
        "np_tests": args.np_tests,
        "seed": cfg.seed,
    }
    report = run_sweep(
        instances=args.instances,
        dims=[int(d) for d in args.dims],
        ratios=args.ratios,
        seed=cfg.seed,
        np_tests=args.np_tests,
        workers=cfg.workers,
        progress=cfg.progress,
    )
    rows = [
        {"property": name, "checks": report.checks.get(name, 0), "failures": report.failures_for(name)}
        for name in PROPERTIES
    ]
    outcome = Outcome(params, rows)
    if report.failures:
        dump = Path(args.dump or DEFAULT_DUMP)
        payload = {"params": params, "failures": report.failures}
        write_output(json.dumps(payload, indent=2, sort_keys=True, default=_plain) + "\n", dump)
        for f in report.failures:
            outcome.failures.append(
                f"{f['property']} failed on instance {f['instance']} (seed {f['seed']}, dim {f['dim']}): {f['details']}"
            )
        outcome.notes.append(f"Counterexamples written to {dump}")
    return outcome


def cmd_ppm(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    params = {"E": args.E, "N": args.N, "trials": args.trials, "seed": cfg.seed, "shards": args.shards}

    def row(p: Dict[str, Any]) -> Tuple[List[Row], List[str]]:
        code = PpmCode(N=p["N"], E=p["E"])
        sim = simulate(code, p["trials"], cfg.seed, shards=p["shards"], workers=cfg.workers)
        out: Row = {
            "E": code.E,
            "N": code.N,
            "exact_error": sim.exact_error,
            "empirical_error": sim.empirical_error,
            "ci95_low": sim.ci95[0],
            "ci95_high": sim.ci95[1],
            "sigma": sim.sigma,
            "deviation_sigma": sim.deviation,
        }
        failures: List[str] = []
        if sim.deviation > PPM_MAX_SIGMA:
            failures.append(f"Monte-Carlo error {sim.empirical_error} is {sim.deviation:.2f} sigma from e^-E at E={code.E}")
        if code.N >= 2:
            cons = consistency_with_bound(code)
            out["lower_bound"] = cons.lower_bound
            out["bound_holds"] = cons.holds
            out["log_rate"] = log_rate(code)
            if not cons.holds:
                failures.append(f"PPM error {cons.achieved} is below the lower bound {cons.lower_bound} at E={code.E}, N={code.N}")
        return [out], failures

    rows, failures = sweep_rows(args, cfg, params, row)
    return Outcome(params, rows, failures)


# ------------------------ parser ------------------------


def build_parser() -> Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None, help=f"Output format (default: ${ENV_FORMAT} or table)")
    common.add_argument("--output", default=None, help=f"Write results to this file (default: ${ENV_OUTPUT} or stdout)")
    common.add_argument("--bits", action="store_true", help="Report information quantities in bits instead of nats")
    common.add_argument("--threads", type=positive_int, default=None, help=f"Worker threads (capped by ${ENV_THREADS})")
    common.add_argument("--seed", type=int, default=None, help=f"Random seed (default: ${ENV_SEED} or 0)")
    common.add_argument("--sweep", default=None, help="VAR=START:STOP:STEPS[:log] or VAR=v1,v2,...")
    common.add_argument("--debug", action="store_true", help="Print [DEBUG] diagnostics to stderr")
    common.add_argument("--no-progress", action="store_true", help="Disable progress bars")

    ap = Parser(prog="photon_budget.py", description="Capacity, error-bound and spectrum numerics under a photon budget.")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", parser_class=Parser)
    sub.required = True

    p = sub.add_parser("capacity", parents=[common], help=DESCRIPTIONS["capacity"])
    p.add_argument("--E", type=float, default=1.0, help="Total energy budget per period (photons)")
    p.add_argument("--K", type=int, default=1, help="Pulses per period")
    p.add_argument("--V", type=float, default=1.0, help="Gaussian noise variance")
    p.set_defaults(handler=cmd_capacity, sweep_vars=("E", "K"))

    p = sub.add_parser("loglaw", parents=[common], help=DESCRIPTIONS["loglaw"])
    p.add_argument("--epsilon", type=float, required=True, help="Error level")
    p.add_argument("--E", type=float, default=1.0, help="Energy budget per codeword")
    p.add_argument("--m", type=int, default=None, help="Report the minimum energy for staircase step m instead")
    p.set_defaults(handler=cmd_loglaw, sweep_vars=("E", "epsilon"))

    p = sub.add_parser("bound", parents=[common], help=DESCRIPTIONS["bound"])
    p.add_argument("--E", type=float, default=1.0, help="Energy budget per codeword")
    p.add_argument("--M", type=int, default=None, help="Number of codewords (default 2)")
    p.add_argument("--R", type=float, default=None, help="Rate in nats; M = ceil(e^R)")
    p.add_argument("--oracle", action="store_true", help="Cross-check against the square-root-measurement oracles")
    p.set_defaults(handler=cmd_bound, sweep_vars=("E", "M"))

    p = sub.add_parser("spectrum", parents=[common], help=DESCRIPTIONS["spectrum"])
    p.add_argument("--E", type=float, default=1.0, help="Energy budget (radii satisfy r^2 <= E)")
    p.add_argument("--N", type=int, default=10 ** 6, help="Number of modes")
    p.add_argument("--c", type=float, default=1.5, help="Spectral threshold (non-integer)")
    p.add_argument("--atoms", default=None, help="Radial mixture as r:q,r:q,... (default: delta at sqrt(E))")
    p.add_argument("--tol", type=float, default=None, help=f"Truncation tolerance (default: ${ENV_TOL} or 1e-12)")
    p.add_argument("--blocks", action="store_true", help="Print the block table instead of the cdf checks")
    p.set_defaults(handler=cmd_spectrum, sweep_vars=("E", "N", "c"))

    p = sub.add_parser("infospec-test", parents=[common], help=DESCRIPTIONS["infospec-test"])
    p.add_argument("--instances", type=positive_int, default=500, help="Random ensembles to check")
    p.add_argument("--dims", type=float_list, default=list(DEFAULT_DIMS), help="Comma-separated dimensions")
    p.add_argument("--ratios", type=float_list, default=list(DEFAULT_RATIOS), help="Comma-separated t'/s ratios")
    p.add_argument("--np-tests", type=positive_int, default=200, help="Random tests per Neyman-Pearson check")
    p.add_argument("--dump", default=None, help=f"Counterexample file (default: {DEFAULT_DUMP})")
    p.set_defaults(handler=cmd_infospec, sweep_vars=())

    p = sub.add_parser("ppm", parents=[common], help=DESCRIPTIONS["ppm"])
    p.add_argument("--E", type=float, default=1.0, help="Pulse energy |alpha|^2")
    p.add_argument("--N", type=int, default=2, help="Slots (= messages)")
    p.add_argument("--trials", type=positive_int, default=10 ** 6, help="Monte-Carlo trials")
    p.add_argument("--shards", type=positive_int, default=DEFAULT_SHARDS, help="Independent RNG streams")
    p.set_defaults(handler=cmd_ppm, sweep_vars=("E", "N"))

    return ap


# ------------------------ Orchestrator ------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
        if args.sweep is not None and not args.sweep_vars:
            raise UsageError(f"{args.command} does not take --sweep")
        cfg = resolve_config(args)
        if cfg.debug:
            print(f"[DEBUG] command={args.command} workers={cfg.workers} seed={cfg.seed} "
                  f"format={cfg.fmt} output={cfg.output or 'stdout'}", file=sys.stderr)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            outcome = args.handler(args, cfg)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except DomainError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except EigenSolverError as e:
        print(f"[FAIL] eigensolver: {e}", file=sys.stderr)
        return 2

    for w in caught:
        print(f"[WARN] {w.category.__name__}: {w.message}", file=sys.stderr)

    rows = to_bits(outcome.rows) if cfg.bits else outcome.rows
    provenance = provenance_lines(args.command, outcome.params, cfg)
    if cfg.fmt == "csv":
        text = render_csv(rows, provenance)
    elif cfg.fmt == "json":
        text = render_json(outcome.params, rows, provenance)
    else:
        text = render_table(rows)
    write_output(text, cfg.output)

    for line in outcome.failures[:MAX_FAIL_LINES]:
        print(f"[FAIL] {line}", file=sys.stderr)
    if len(outcome.failures) > MAX_FAIL_LINES:
        print(f"[FAIL] ... and {len(outcome.failures) - MAX_FAIL_LINES} more", file=sys.stderr)
    for note in outcome.notes:
        print(note, file=sys.stderr)

    print(f"Done. Rows: {len(rows)}. Failed checks: {len(outcome.failures)}.", file=sys.stderr)
    return 2 if outcome.failures else 0


if __name__ == "__main__":
    sys.exit(main())
