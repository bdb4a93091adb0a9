"""Verification suites: reproducible values and randomized properties.

Cases are registered with :func:`case`.  Every case gets its own generator
derived from the run seed and a CRC of its id, so results do not depend on
scheduling or on which other cases run.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import platform
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Optional

import numpy as np

from . import __version__, kernels, properties
from .dimension_group import (k0_pairing_exact, power_series, projection_p,
                              tau_k, zeta_series)
from .errors import ConfigInvalid
from .pairing import KClass, k00_pairing, positivity_audit, underline_psi
from .regularization import approximate_unit, harmonic_generator, regularize_trace
from .sampling import random_positive, random_scale_element
from .singular_traces import (g_pattern, lsc_gap_witness, mu_function_trace, singular_tau,
                              singular_tau_on_projection, truncated_pattern)
from .weights import DiagonalH, FiniteRankTrace, HSequence, ZeroOnFiniteRank, evaluate_weight

SUITES = ("paper-values", "property", "all")
PROVENANCE = ("PAPER", "TRIVIAL", "DERIVED")
ZETA_VALUE = 0.5 + math.pi ** 2 / 6

DEFAULT_CONFIG: dict[str, Any] = {
    "seed": 0,
    "instances": 1000,
    "n_max": 100_000,
    "jobs": 1,
}
CONFIG_TYPES = {"seed": int, "instances": int, "n_max": int, "jobs": int}


@dataclass(frozen=True)
class Context:
    rng: np.random.Generator
    config: dict


@dataclass(frozen=True)
class VerificationCase:
    id: str
    suite: str
    description: str
    provenance: str
    expected: Any
    tolerance: float
    run: Callable[[Context], tuple[Any, bool]]

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance {self.provenance!r}")


@dataclass
class CaseResult:
    case: VerificationCase
    status: str
    measured: Any = None
    detail: str = ""

    def to_json(self) -> dict:
        c = self.case
        return {"id": c.id, "suite": c.suite, "description": c.description,
                "provenance": c.provenance, "expected": _jsonable(c.expected),
                "tolerance": c.tolerance, "measured": _jsonable(self.measured),
                "status": self.status, "detail": self.detail}


@dataclass
class Registry:
    cases: dict[str, VerificationCase] = field(default_factory=dict)

    def add(self, c: VerificationCase):
        if c.id in self.cases:
            raise ValueError(f"duplicate case id {c.id!r}")
        self.cases[c.id] = c

    def select(self, suite: str) -> list[VerificationCase]:
        if suite not in SUITES:
            raise ConfigInvalid(f"unknown suite {suite!r}")
        return sorted((c for c in self.cases.values() if suite == "all" or c.suite == suite),
                      key=lambda c: c.id)


REGISTRY = Registry()


def case(suite: str, id: str, description: str, provenance: str, expected: Any = None,
         tolerance: float = 0.0):
    def wrap(fn):
        REGISTRY.add(VerificationCase(id, suite, description, provenance, expected,
                                      tolerance, fn))
        return fn
    return wrap


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def _close(measured: float, expected: float, tol: float) -> bool:
    return abs(float(measured) - float(expected)) <= tol


@lru_cache(maxsize=4)
def _zeta_full(n_max: int):
    return singular_tau(zeta_series(), 2, n_max, 60)


# --------------------------------------------------------------------------
# reproducible values
# --------------------------------------------------------------------------

@case("paper-values", "weight-finite-rank-tr", "finite-rank trace on diag(1,1,0)", "PAPER", 2)
def _(ctx):
    v = evaluate_weight(FiniteRankTrace(), np.diag([1.0, 1.0, 0.0]))
    return v, v == 2


@case("paper-values", "weight-zero-on-finite-rank",
      "zero-on-finite-rank trace on a random finite-rank positive", "PAPER", 0)
def _(ctx):
    v = evaluate_weight(ZeroOnFiniteRank(), random_positive(4, ctx.rng))
    return v, v == 0


H_EXAMPLE = DiagonalH(HSequence((3.0, 2.0), tail=0.5))


@case("paper-values", "underline-psi-min-spectrum",
      "rank-1 class under h = (3, 2, 0.5, ...) pairs to min spectrum", "PAPER", 0.5, 1e-6)
def _(ctx):
    e = np.diag([0.0, 0.0, 1.0])
    r = underline_psi(H_EXAMPLE, e, corner=512)
    return r.value, r.converged and _close(r.value, 0.5, 1e-6)


@case("paper-values", "k00-lambda-z", "rank-3 class minus zero pairs to 3 lambda",
      "PAPER", 1.5, 1e-6)
def _(ctx):
    e = np.diag([1.0, 1.0, 1.0, 0.0])
    r = k00_pairing(H_EXAMPLE, KClass(e, np.zeros((4, 4))), corner=512)
    return r.value, r.converged and _close(r.value, 1.5, 1e-6)


@case("paper-values", "regularize-finite-rank-tr",
      "regularized finite-rank trace equals Tr on a random finite-rank positive", "PAPER",
      "Tr(a)", 1e-12)
def _(ctx):
    a = random_positive(5, ctx.rng)
    r = regularize_trace(FiniteRankTrace(), approximate_unit(harmonic_generator), a)
    tr = float(np.trace(a).real)
    return {"value": r.value, "trace": tr}, r.converged and _close(r.value, tr, 1e-12)


@case("paper-values", "regularize-zero-on-finite-rank",
      "regularized zero-on-finite-rank trace vanishes", "PAPER", 0)
def _(ctx):
    a = random_positive(5, ctx.rng)
    r = regularize_trace(ZeroOnFiniteRank(), approximate_unit(harmonic_generator), a)
    return r.value, r.converged and r.value == 0


@case("paper-values", "tau-k-diagonal", "tau_3(p_3)", "PAPER", Fraction(1, 2))
def _(ctx):
    v = tau_k(projection_p(3), 3)
    return v, v == Fraction(1, 2)


@case("paper-values", "tau-k-after", "tau_5(p_3)", "PAPER", Fraction(1, 25))
def _(ctx):
    v = tau_k(projection_p(3), 5)
    return v, v == Fraction(1, 25)


@case("paper-values", "tau-k-before", "tau_1(p_3)", "PAPER", Fraction(1, 8))
def _(ctx):
    v = tau_k(projection_p(3), 1)
    return v, v == Fraction(1, 8)


@case("paper-values", "projection-p1", "p_1 has prefix (1/2) and tail 1/k^2 from k = 2",
      "PAPER", {"prefix": ["1/2"], "q": "1", "N": 2})
def _(ctx):
    js = projection_p(1).to_json()
    return js, js == {"prefix": ["1/2"], "q": "1", "N": 2}


@case("paper-values", "k0-exact-pj", "exact K_0 pairing of p_j, j = 1..20", "PAPER", 1)
def _(ctx):
    vals = [k0_pairing_exact(projection_p(j)) for j in range(1, 21)]
    return [str(v) for v in sorted(set(vals))], all(v == 1 for v in vals)


@case("paper-values", "tau-zeta", "singular trace of sum p_j/j^2", "PAPER",
      ZETA_VALUE, 1e-3)
def _(ctx):
    r = _zeta_full(ctx.config["n_max"])
    return r.value, r.converged and _close(r.value, ZETA_VALUE, 1e-3)


@case("paper-values", "tau-zeta-partial", "singular trace of sum_{j<=10} p_j/j^2", "PAPER",
      sum(Fraction(1, j * j) for j in range(1, 11)), 1e-6)
def _(ctx):
    exact = sum(Fraction(1, j * j) for j in range(1, 11))
    r = singular_tau(zeta_series(10), 2, ctx.config["n_max"])
    ok = r.converged and r.exact == exact and _close(r.value, exact, 1e-6)
    return {"value": r.value, "exact": r.exact}, ok


@case("paper-values", "tau-eps-series", "tau_eps of sum j^-(3/2) p_j with eps = 1/2",
      "PAPER", 0.5, 1e-2)
def _(ctx):
    r = singular_tau(power_series(Fraction(3, 2)), Fraction(3, 2), ctx.config["n_max"])
    return r.value, r.converged and _close(r.value, 0.5, 1e-2)


@case("paper-values", "tau-on-projection", "singular trace of p_5", "PAPER", 1)
def _(ctx):
    v = singular_tau_on_projection(projection_p(5), 2)
    return v, v == 1


@case("paper-values", "tau-eps-on-projection", "tau_eps of p_5 with eps = 1/2", "PAPER", 0)
def _(ctx):
    v = singular_tau_on_projection(projection_p(5), Fraction(3, 2))
    return v, v == 0


@case("paper-values", "lsc-gap", "full minus truncated zeta series at M = 10", "PAPER",
      0.5 - 2e-3)
def _(ctx):
    w = lsc_gap_witness(10, ctx.config["n_max"], full=_zeta_full(ctx.config["n_max"]))
    return w.gap_lower_bound, w.gap_lower_bound >= 0.5 - 2e-3


@case("paper-values", "mu-g", "mu of g = sum t_n^-1 f_n (x) a with tau(a) = 1", "PAPER", 1,
      1e-3)
def _(ctx):
    r = mu_function_trace(g_pattern(1.0), ctx.config["n_max"])
    return r.value, r.converged and _close(r.value, 1.0, 1e-3)


@case("paper-values", "mu-truncation", "mu of a compactly supported truncation", "PAPER", 0)
def _(ctx):
    r = mu_function_trace(truncated_pattern(50), ctx.config["n_max"])
    return r.value, r.converged and r.value == 0


# --------------------------------------------------------------------------
# randomized properties
# --------------------------------------------------------------------------

def _max_over(ctx, fn, keys=None):
    n = ctx.config["instances"]
    out = [fn(ctx.rng) for _ in range(n)]
    if keys is None:
        return max(out, default=0.0)
    return {k: max((o[k] for o in out), default=0.0) for k in keys}


@case("property", "prop-round-to-projection",
      "rounding yields a projection within 2 delta and the trace bound", "DERIVED", 0.0, 1e-8)
def _(ctx):
    m = _max_over(ctx, properties.round_instance,
                  ("projection", "distance", "trace_bound", "rank_kept"))
    ok = m["projection"] <= 1e-8 and m["distance"] <= 1e-12 and m["trace_bound"] <= 1e-12 \
        and m["rank_kept"] == 0
    return m, ok


@case("property", "prop-similarity",
      "norm bound ||1 - u/2|| <= ||e' - e|| and conjugation residual", "DERIVED", 0.0, 1e-8)
def _(ctx):
    m = _max_over(ctx, properties.similarity_instance, ("norm_bound", "conjugation"))
    return m, m["norm_bound"] <= 1e-12 and m["conjugation"] <= 1e-8


@case("property", "prop-polar", "polar part of y satisfies w*w = f', ww* = e'", "DERIVED",
      0.0, 1e-8)
def _(ctx):
    m = _max_over(ctx, properties.polar_instance, ("w_identities", "xy_yx"))
    return m, m["w_identities"] <= 1e-8 and m["xy_yx"] <= 1e-8


@case("property", "prop-polarization", "polarization identities", "DERIVED", 0.0, 1e-10)
def _(ctx):
    m = _max_over(ctx, properties.polarization_instance)
    return m, m <= 1e-10


@case("property", "prop-ladder", "approximate unit ladder d_n d_{n+1} = d_n", "DERIVED",
      0.0, 1e-12)
def _(ctx):
    m = _max_over(ctx, properties.ladder_instance)
    return m, m <= 1e-12


@case("property", "prop-underline-additivity",
      "underline-psi is additive on orthogonal pairs", "DERIVED", 0.0, 1e-8)
def _(ctx):
    m = _max_over(ctx, properties.additivity_instance)
    return m, m <= 1e-8


@case("property", "prop-k0-invariance",
      "K_0 pairing unchanged under similarity and stabilization", "DERIVED", 0.0, 1e-8)
def _(ctx):
    m = _max_over(ctx, properties.k0_invariance_instance)
    return m, m <= 1e-8


@case("property", "prop-positivity", "K_0 pairing is nonnegative on projections",
      "DERIVED", 0.0, 1e-9)
def _(ctx):
    n = ctx.config["instances"]
    low = min((properties.positivity_instance(ctx.rng) for _ in range(n)), default=0.0)
    tau = properties.random_block_trace(ctx.rng)
    return low, low >= -1e-9 and positivity_audit(tau, 10, ctx.rng)


@case("property", "prop-projection-pairing",
      "exact pairing of random scale elements matches the singular trace", "DERIVED",
      0.0, 1e-6)
def _(ctx):
    worst = 0.0
    for _ in range(100):
        g = random_scale_element(ctx.rng)
        exact = singular_tau_on_projection(g, 2)
        r = singular_tau(g, 2, ctx.config["n_max"])
        worst = max(worst, abs(r.value - float(exact)))
        if exact != g.tail_q:
            return worst, False
    return worst, worst <= 1e-6


@case("property", "prop-regularization-dichotomy",
      "regularized traces on random finite-rank positives", "DERIVED", 0.0, 1e-12)
def _(ctx):
    unit = approximate_unit(harmonic_generator)
    worst, zero_ok = 0.0, True
    for _ in range(100):
        a = random_positive(int(ctx.rng.integers(1, 9)), ctx.rng)
        r = regularize_trace(FiniteRankTrace(), unit, a)
        worst = max(worst, abs(r.value - float(np.trace(a).real)))
        zero_ok &= regularize_trace(ZeroOnFiniteRank(), unit, a).value == 0
    return worst, worst <= 1e-12 and zero_ok


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------

def load_config(path: Optional[str], overrides: dict) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigInvalid("config must be a JSON object")
        cfg.update(data)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(cfg) - set(CONFIG_TYPES)
    if unknown:
        raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
    for key, typ in CONFIG_TYPES.items():
        if not isinstance(cfg[key], typ) or isinstance(cfg[key], bool):
            raise ConfigInvalid(f"{key} must be {typ.__name__}")
    if cfg["instances"] < 0 or cfg["n_max"] < 16 or cfg["jobs"] < 1 or cfg["seed"] < 0:
        raise ConfigInvalid("instances >= 0, n_max >= 16, jobs >= 1 and seed >= 0 required")
    return cfg


def case_rng(seed: int, case_id: str) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(case_id.encode()),))
    return np.random.default_rng(ss)


def run_case(c: VerificationCase, config: dict) -> CaseResult:
    try:
        measured, ok = c.run(Context(case_rng(config["seed"], c.id), config))
    except Exception as exc:  # a crashing case is reported, the suite continues
        return CaseResult(c, "crashed", None, f"{type(exc).__name__}: {exc}")
    return CaseResult(c, "pass" if ok else "fail", measured)


def config_hash(config: dict) -> str:
    # jobs only affects scheduling, never results
    relevant = {k: v for k, v in config.items() if k != "jobs"}
    blob = json.dumps(relevant, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def versions() -> dict:
    out = {"ktrace": __version__, "numpy": np.__version__,
           "python": ".".join(platform.python_version_tuple()[:2]),
           "backend": kernels.backend()}
    if kernels.backend() == "numba":
        import numba
        out["numba"] = numba.__version__
    return out


def run_suite(suite: str, config: dict, registry: Registry = REGISTRY) -> dict:
    cases = registry.select(suite)
    with ThreadPoolExecutor(max_workers=config["jobs"]) as pool:
        results = list(pool.map(lambda c: run_case(c, config), cases))
    passed = sum(r.status == "pass" for r in results)
    return {
        "header": {"suite": suite, "seed": config["seed"], "config_hash": config_hash(config),
                   "versions": versions()},
        "cases": [r.to_json() for r in results],
        "summary": {"pass": passed, "fail": len(results) - passed},
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


CSV_FIELDS = ("id", "suite", "provenance", "status", "measured", "expected", "tolerance")


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for c in report["cases"]:
        writer.writerow([c[k] if not isinstance(c[k], (dict, list)) else
                         json.dumps(c[k], sort_keys=True) for k in CSV_FIELDS])
    return buf.getvalue()
