"""``ktrace`` command line: ``verify`` runs the suites, ``eval`` computes one value."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import verify
from .dimension_group import DimensionGroupElement, power_series, zeta_series
from .errors import ConfigInvalid, KTraceError, ParseError
from .limits import LimitReport, running_mean_table
from .matrix_core import matrix_from_json
from .pairing import KClass, k0_pairing, k00_pairing, pairing_json, underline_psi
from .regularization import (approximate_unit, dyadic_generator, harmonic_generator,
                             regularization_series, regularize_trace, series_json)
from .singular_traces import (constant_pattern, element_terms, g_pattern, mu_function_trace,
                              series_terms, singular_tau, truncated_pattern)
from .unitization import UnitizedElement
from .weights import weight_from_json

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

WEIGHT_ALIASES = {"finite_rank_tr": {"kind": "finite_rank_tr_else_inf"},
                  "zero_on_finite_rank": {"kind": "zero_on_finite_rank_else_inf"}}


# ---------------------------------------------------------------- operands

def parse_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: {exc.msg}", exc.lineno, exc.colno) from exc


def _bad(what: str, text: str, pos: int, why: str) -> ParseError:
    return ParseError(f"{what}: {why} in {text!r}", 1, pos + 1)


def parse_numbers(text: str, what: str, offset: int = 0) -> list[float]:
    """Comma separated rationals; ``offset`` shifts reported columns into the full operand."""
    out, pos = [], 0
    for token in text.split(","):
        try:
            out.append(float(Fraction(token.strip())))
        except (ValueError, ZeroDivisionError):
            raise _bad(what, text, offset + pos, f"bad number {token!r}") from None
        pos += len(token) + 1
    return out


def parse_weight(text: str):
    if text in WEIGHT_ALIASES:
        return weight_from_json(WEIGHT_ALIASES[text])
    obj = parse_json(text, "weight")
    try:
        return weight_from_json(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"weight: {exc}", 1, 1) from exc


def parse_matrix(text: str, what: str = "element") -> np.ndarray:
    """``diag:1,1,0``, ``rank:3`` (leading identity of size rank + 1) or matrix JSON."""
    if text.startswith("diag:"):
        return np.diag(parse_numbers(text[5:], what, offset=5))
    if text.startswith("rank:"):
        try:
            r = int(text[5:])
        except ValueError:
            raise _bad(what, text, 5, "bad rank") from None
        return np.diag([1.0] * r + [0.0])
    obj = parse_json(text, what)
    try:
        return matrix_from_json(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"{what}: {exc}", 1, 1) from exc


def parse_class(text: str) -> KClass:
    """``rankN`` for ``[rank-N] - [0]``, or ``{"plus": ..., "minus": ...}`` of matrix operands."""
    if text.startswith("rank") and not text.startswith("rank:"):
        e = parse_matrix("rank:" + text[4:], "class")
        return KClass(e, np.zeros_like(e))
    obj = parse_json(text, "class")
    if not isinstance(obj, dict) or set(obj) != {"plus", "minus"}:
        raise ParseError("class: expected keys plus and minus", 1, 1)
    mats = []
    for key in ("plus", "minus"):
        v = obj[key]
        mats.append(parse_matrix(v if isinstance(v, str) else json.dumps(v), f"class.{key}"))
    size = max(m.shape[0] for m in mats)
    mats = [np.pad(m, (0, size - m.shape[0])) for m in mats]
    return KClass(mats[0], mats[1])


def parse_unitized(text: str, what: str) -> UnitizedElement:
    obj = parse_json(text, what)
    try:
        return UnitizedElement.from_json(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"{what}: {exc}", 1, 1) from exc


def parse_series(text: str):
    """``zeta2``, ``zeta2:M``, ``power:S`` / ``power:S:M`` or a group element JSON."""
    head, _, rest = text.partition(":")
    try:
        if head == "zeta2":
            return zeta_series(int(rest) if rest else None)
        if head == "power":
            s, _, m = rest.partition(":")
            return power_series(Fraction(s), int(m) if m else None)
    except (ValueError, ZeroDivisionError):
        raise _bad("series", text, len(head) + 1, "bad parameter") from None
    obj = parse_json(text, "series")
    try:
        return DimensionGroupElement.from_json(obj)
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"series: {exc}", 1, 1) from exc


def parse_pattern(text: str, tau_a: float):
    head, _, rest = text.partition(":")
    try:
        if head == "g" and not rest:
            return g_pattern(tau_a)
        if head == "truncated":
            return truncated_pattern(int(rest), tau_a)
        if head == "constant":
            return constant_pattern(float(rest) if rest else 1.0)
    except ValueError:
        raise _bad("pattern", text, len(head) + 1, "bad parameter") from None
    raise _bad("pattern", text, 0, "unknown pattern")


# ---------------------------------------------------------------- output

def emit(obj: dict, out: Optional[str] = None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def report_out(report: LimitReport) -> dict:
    out = report.to_json()
    out["converged"] = report.converged
    return out


def dump_means(terms: np.ndarray, path: str, stride: int):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("N", "A_N"))
        writer.writerows((n, repr(v)) for n, v in running_mean_table(terms, terms.size, stride))


# ---------------------------------------------------------------- eval commands

def eval_underline(args) -> dict:
    psi = parse_weight(args.weight)
    e = parse_matrix(args.projection, "projection")
    return report_out(underline_psi(psi, e, corner=args.corner,
                                    amplification=args.amplification))


def eval_pair_k00(args) -> dict:
    psi = parse_weight(args.weight)
    r = k00_pairing(psi, parse_class(args.klass), corner=args.corner,
                    amplification=args.amplification)
    out = pairing_json(r)
    out.update(report_out(r))
    return out


def eval_pair_k0(args) -> dict:
    tau = parse_weight(args.trace)
    c = KClass(parse_unitized(args.plus, "plus"), parse_unitized(args.minus, "minus"))
    return {"value": k0_pairing(tau, c, restrict=args.restrict)}


def eval_singular(args) -> dict:
    x = parse_series(args.series)
    try:
        exponent = Fraction(args.exponent)
    except (ValueError, ZeroDivisionError):
        raise _bad("exponent", args.exponent, 0, "bad number") from None
    r = singular_tau(x, exponent, args.nmax, args.J)
    if args.dump:
        terms = (element_terms(x, args.nmax, exponent) if isinstance(x, DimensionGroupElement)
                 else series_terms(x, args.nmax, exponent)[0])
        dump_means(terms, args.dump, args.stride)
    return report_out(r)


def eval_mu(args) -> dict:
    f = parse_pattern(args.pattern, args.tau_a)
    r = mu_function_trace(f, args.nmax)
    if args.dump:
        dump_means(f.terms(args.nmax), args.dump, args.stride)
    return report_out(r)


def eval_regularize(args) -> dict:
    tau = parse_weight(args.trace)
    a = parse_matrix(args.element)
    gen = {"harmonic": harmonic_generator, "dyadic": dyadic_generator}[args.generator]
    unit = approximate_unit(gen)
    values, _ = regularization_series(tau, unit, a, args.nmax)
    out = report_out(regularize_trace(tau, unit, a, args.nmax))
    out["series"] = series_json(values)
    return out


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ktrace", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=verify.SUITES, default="all")
    v.add_argument("--config")
    v.add_argument("--out")
    v.add_argument("--seed", type=int)
    v.add_argument("--jobs", type=int)
    v.add_argument("--instances", type=int)
    v.add_argument("--nmax", type=int, dest="n_max")
    v.add_argument("--format", choices=("json", "csv"), default="json")

    e = sub.add_parser("eval", help="evaluate a single quantity")
    es = e.add_subparsers(dest="what", required=True)

    def with_corner(q):
        q.add_argument("--corner", type=int, default=4096)
        q.add_argument("--amplification", type=int)

    def with_dump(q):
        q.add_argument("--dump", help="write (N, A_N) running means as CSV")
        q.add_argument("--stride", type=int, default=1)

    q = es.add_parser("underline-psi")
    q.add_argument("--weight", required=True)
    q.add_argument("--projection", required=True)
    with_corner(q)
    q.set_defaults(fn=eval_underline)

    q = es.add_parser("pair-k00")
    q.add_argument("--weight", required=True)
    q.add_argument("--class", dest="klass", required=True)
    with_corner(q)
    q.set_defaults(fn=eval_pair_k00)

    q = es.add_parser("pair-k0")
    q.add_argument("--trace", required=True)
    q.add_argument("--plus", required=True)
    q.add_argument("--minus", required=True)
    q.add_argument("--restrict", action="store_true")
    q.set_defaults(fn=eval_pair_k0)

    q = es.add_parser("singular-tau")
    q.add_argument("--series", required=True)
    q.add_argument("--exponent", default="2")
    q.add_argument("--nmax", type=int, default=100_000)
    q.add_argument("--J", type=int, default=60)
    with_dump(q)
    q.set_defaults(fn=eval_singular)

    q = es.add_parser("mu")
    q.add_argument("--pattern", required=True, help="g, truncated:L or constant:v")
    q.add_argument("--tau-a", type=float, default=1.0)
    q.add_argument("--nmax", type=int, default=100_000)
    with_dump(q)
    q.set_defaults(fn=eval_mu)

    q = es.add_parser("regularize")
    q.add_argument("--trace", required=True)
    q.add_argument("--element", required=True)
    q.add_argument("--generator", choices=("harmonic", "dyadic"), default="harmonic")
    q.add_argument("--nmax", type=int, default=64)
    q.set_defaults(fn=eval_regularize)
    return p


def run_verify(args) -> int:
    try:
        config = verify.load_config(args.config, {"seed": args.seed, "jobs": args.jobs,
                                                  "instances": args.instances,
                                                  "n_max": args.n_max})
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = verify.run_suite(args.suite, config)
    text = verify.report_csv(report) if args.format == "csv" else verify.report_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["summary"]["fail"] == 0 else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return run_verify(args)
    try:
        emit(args.fn(args))
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KTraceError, ValueError, TypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
