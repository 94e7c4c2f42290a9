"""Command-line front end: ``price``, ``table`` and ``validate``.

Exit codes: 0 success, 1 validation failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from . import engine as eng
from .lattice import LatticeError, build_lattice, enlarged_jump_distribution
from .model import Exercise, Kind, MarketParams, merton_series_price
from .tables import render_csv, reproduce_row, table_rows
from .truncation import (
    numerical_bounds,
    theoretical_bounds_american_put,
    theoretical_bounds_call,
    theoretical_bounds_put,
    truncation_constants,
)
from .validate import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

METHODS = ("merton", "full", "truncated-theoretical", "truncated-numerical", "type-a")

# name -> (type, default, help); defaults are the Table 1 Panel A at-the-money put
PRICE_FIELDS: dict[str, tuple[type, object, str]] = {
    "S0": (float, 40.0, "spot price"),
    "K": (float, 40.0, "strike"),
    "r": (float, 0.08, "risk-free rate"),
    "d": (float, 0.0, "dividend yield"),
    "sigma2": (float, 0.05, "diffusion variance sigma^2"),
    "tau": (float, 1.0, "maturity in years"),
    "lambda": (float, 5.0, "jump intensity"),
    "gamma": (float, 0.0, "ln E[1+J]; sets gammap = gamma - delta2/2 unless --gammap is given"),
    "gammap": (float, None, "mean of ln(1+J); overrides --gamma"),
    "delta2": (float, 0.05, "variance of ln(1+J)"),
    "kind": (str, "put", "call or put"),
    "exercise": (str, "european", "european or american"),
    "n": (int, 400, "time steps"),
    "nu": (int, 3, "jump nodes per side"),
    "c": (float, 1.0, "jump grid spacing multiplier"),
    "method": (str, "truncated-numerical", "|".join(METHODS)),
    "epsilon": (str, "auto", "truncation error target; auto means 1/n"),
    "format": (str, "text", "text or csv"),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: MarketParams
    kind: Kind
    exercise: Exercise
    n: int
    nu: int
    c: float
    method: str
    epsilon: float
    format: str


def read_config_file(path: str) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc.strerror}") from None
    for num, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-")
        if key not in PRICE_FIELDS:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def _convert(key: str, value: object) -> object:
    typ = PRICE_FIELDS[key][0]
    if value is None or isinstance(value, typ):
        return value
    try:
        return typ(value)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r} as {typ.__name__}") from None


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and flags (flags win) and check every precondition."""
    merged = {k: spec[1] for k, spec in PRICE_FIELDS.items()}
    if ns.config:
        merged.update(read_config_file(ns.config))
    for key in PRICE_FIELDS:
        flag = getattr(ns, key.replace("lambda", "lambda_"), None)
        if flag is not None:
            merged[key] = flag
    vals = {k: _convert(k, v) for k, v in merged.items()}

    if vals["method"] not in METHODS:
        raise ConfigError(f"method must be one of {', '.join(METHODS)}")
    if vals["format"] not in ("text", "csv"):
        raise ConfigError("format must be text or csv")
    try:
        kind = Kind(vals["kind"])
        exercise = Exercise(vals["exercise"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if vals["n"] < 1:
        raise ConfigError("n >= 1 violated")
    if vals["nu"] < 1:
        raise ConfigError("nu >= 1 violated")
    if not vals["c"] > 0:
        raise ConfigError("c > 0 violated")
    if vals["sigma2"] < 0 or vals["delta2"] < 0:
        raise ConfigError("variances must be >= 0")
    gammap = vals["gammap"]
    if gammap is None:
        gammap = vals["gamma"] - vals["delta2"] / 2
    eps_raw = str(vals["epsilon"]).strip().lower()
    if eps_raw == "auto":
        epsilon = 1.0 / vals["n"]
    else:
        try:
            epsilon = float(eps_raw)
        except ValueError:
            raise ConfigError(f"epsilon: cannot parse {vals['epsilon']!r}") from None
        if not (epsilon > 0 and math.isfinite(epsilon)):
            raise ConfigError("epsilon > 0 violated")
    if exercise is Exercise.AMERICAN and vals["method"] in ("merton", "type-a"):
        raise ConfigError(f"method {vals['method']} is European only")
    try:
        params = MarketParams.from_variances(
            vals["S0"], vals["K"], vals["r"], vals["sigma2"], vals["tau"],
            d=vals["d"], lambda_=vals["lambda"], gamma_prime=gammap, delta2=vals["delta2"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(params, kind, exercise, vals["n"], vals["nu"], vals["c"], vals["method"], epsilon, vals["format"])


@dataclass
class Priced:
    value: float
    method: str
    kbar: Optional[int]
    lbar: Optional[int]
    nodes: int
    seconds: float


def price(cfg: RunConfig) -> Priced:
    params, kind = cfg.params, cfg.kind
    if cfg.method == "merton":
        t0 = time.perf_counter()
        value = merton_series_price(params, kind)
        return Priced(value, "merton_series", None, None, 0, time.perf_counter() - t0)

    t0 = time.perf_counter()
    spec = build_lattice(params, cfg.n, cfg.nu, cfg.c)
    american = cfg.exercise is Exercise.AMERICAN
    if cfg.method == "full":
        res = eng.price_american_full(params, spec, kind) if american else eng.price_european_full(params, spec, kind)
        return Priced(res.value, res.method.value, None, None, res.nodes_visited, time.perf_counter() - t0)

    if cfg.method == "truncated-numerical" or cfg.method == "type-a":
        bounds = numerical_bounds(spec, enlarged_jump_distribution(spec), params, cfg.epsilon, kind)
    else:
        consts = truncation_constants(spec)
        if kind is Kind.CALL:
            bounds = theoretical_bounds_call(spec, consts, params, cfg.epsilon)
        elif american:
            bounds = theoretical_bounds_american_put(spec, consts, params, cfg.epsilon)
        else:
            bounds = theoretical_bounds_put(spec, consts, params, cfg.epsilon)

    if cfg.method == "type-a":
        res = eng.price_european_type_a(params, spec, bounds, kind)
    elif not american:
        res = eng.price_european_truncated(params, spec, bounds, kind)
    elif kind is Kind.PUT:
        res = eng.price_american_put_truncated(params, spec, bounds=bounds)
    else:
        res = eng.price_american_call_truncated(params, spec, bounds=bounds)
    label = res.method.value
    if res.boundary_b is not None:
        label += f"(b={res.boundary_b})"
    return Priced(res.value, label, bounds.kbar, bounds.lbar, res.nodes_visited, time.perf_counter() - t0)


def render_price(p: Priced, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("value", "method", "kbar", "lbar", "nodes_visited", "seconds"))
        w.writerow((f"{p.value:.4f}", p.method, "" if p.kbar is None else p.kbar,
                    "" if p.lbar is None else p.lbar, p.nodes, f"{p.seconds:.2f}"))
        return buf.getvalue()
    lines = [f"{p.value:.4f}", f"method: {p.method}"]
    if p.kbar is not None:
        lines.append(f"bounds: (kbar, lbar) = ({p.kbar}, {p.lbar})")
    lines.append(f"nodes visited: {p.nodes}")
    lines.append(f"time: ({p.seconds:.2f}) s")
    return "\n".join(lines) + "\n"


def cmd_price(ns: argparse.Namespace) -> int:
    cfg = resolve_config(ns)
    sys.stdout.write(render_price(price(cfg), cfg.format))
    return EXIT_OK


def cmd_table(ns: argparse.Namespace) -> int:
    try:
        rows = table_rows(ns.table_id, ns.panel)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    results = [reproduce_row(r) for r in rows]
    sys.stdout.write(render_csv(results, timing=not ns.no_timing, reference=ns.reference))
    return EXIT_OK


def cmd_validate(ns: argparse.Namespace) -> int:
    checks = run_suite(ns.suite, fault=ns.inject_fault)
    for c in checks:
        print(c.line(), flush=True)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} invariants hold")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jumptree", description="Truncated jump-diffusion lattice option pricer."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="price one contract")
    p.add_argument("--config", metavar="PATH", default=None,
                   help="key=value file (# starts a comment); flags override it (default: none)")
    for key, (typ, default, text) in PRICE_FIELDS.items():
        choices = None
        if key == "method":
            choices = METHODS
        elif key == "kind":
            choices = [k.value for k in Kind]
        elif key == "exercise":
            choices = [e.value for e in Exercise]
        elif key == "format":
            choices = ("text", "csv")
        p.add_argument(
            f"--{key}", dest=key.replace("lambda", "lambda_"), metavar=key.upper(), type=typ, choices=choices,
            default=None, help=f"{text} (default: {default})",
        )
    p.set_defaults(func=cmd_price)

    t = sub.add_parser("table", help="reproduce a published table as CSV")
    t.add_argument("table_id", type=int, help="1, 2, 3 or 4")
    t.add_argument("--panel", default=None, help="restrict to one panel letter (default: all)")
    t.add_argument("--no-timing", action="store_true",
                   help="leave timing columns empty so output is byte-stable (default: off)")
    t.add_argument("--reference", action="store_true",
                   help="append the published values as extra columns (default: off)")
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("validate", help="run the invariant suites")
    v.add_argument("--suite", choices=("fast", "full"), default="fast", help="(default: fast)")
    v.add_argument("--inject-fault", action="store_true",
                   help="perturb the one-step jump law so normalization must fail (default: off)")
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except (ConfigError, LatticeError, ValueError) as exc:
        print(f"jumptree: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
