"""Limit extraction for bounded sequences and their Cesaro means.

A free-ultrafilter limit of a bounded sequence lies between its liminf and
limsup and equals the ordinary limit when that exists.  ``cesaro_limit``
reports either a converged value (every ultrafilter agrees), a bracket of
cluster values, or ``unbounded`` (the ``∞`` convention).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

import numpy as np

from . import kernels

ERROR_FLOOR = 1e-6
OVERFLOW_GUARD = 1e9
# A_N >= GROWTH * A_{N/2} with monotone tail means the averages grow like N^(1/4) or faster.
GROWTH = 2.0 ** 0.25
TAIL_START = 1 / 8

CONVERGED, BRACKETED, UNBOUNDED = "converged", "bracketed", "unbounded"


def _num(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


@dataclass(frozen=True)
class LimitReport:
    """Outcome of a limit extraction.

    ``value`` is the best estimate (``inf`` when unbounded); ``bracket``
    encloses the cluster values seen on the tail; ``exact`` carries an exact
    rational when one is known independently of the numerics.
    """

    status: str
    value: float
    bracket: tuple[float, float]
    error_bound: float
    n_used: int
    exact: Optional[Fraction] = None

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "value": _num(self.value),
            "bracket": [_num(self.bracket[0]), _num(self.bracket[1])],
            "error_bound": _num(self.error_bound),
            "n_used": self.n_used,
        }
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out

    @classmethod
    def exact_value(cls, value, n_used: int = 0) -> "LimitReport":
        v = float(value)
        exact = Fraction(value) if isinstance(value, (int, Fraction)) else None
        return cls(CONVERGED, v, (v, v), 0.0, n_used, exact)

    def with_extra_error(self, extra: float) -> "LimitReport":
        if extra <= 0:
            return self
        lo, hi = self.bracket
        return replace(self, bracket=(lo - extra, hi + extra),
                       error_bound=self.error_bound + extra)

    def __add__(self, other: "LimitReport") -> "LimitReport":
        return combine(self, other, 1)

    def __sub__(self, other: "LimitReport") -> "LimitReport":
        return combine(self, other, -1)


def combine(a: LimitReport, b: LimitReport, sign: int) -> LimitReport:
    """Interval arithmetic for ``a + sign * b``."""
    lo = a.bracket[0] + (b.bracket[0] if sign > 0 else -b.bracket[1])
    hi = a.bracket[1] + (b.bracket[1] if sign > 0 else -b.bracket[0])
    if UNBOUNDED in (a.status, b.status):
        status = UNBOUNDED
    elif a.converged and b.converged:
        status = CONVERGED
    else:
        status = BRACKETED
    exact = None
    if a.exact is not None and b.exact is not None:
        exact = a.exact + sign * b.exact
    with np.errstate(invalid="ignore"):
        value = a.value + sign * b.value
    return LimitReport(status, value, (lo, hi), a.error_bound + b.error_bound,
                       max(a.n_used, b.n_used), exact)


SequenceLike = Union[np.ndarray, Callable[[int], np.ndarray], Iterable[float]]


def materialize(s: SequenceLike, n_max: int) -> np.ndarray:
    """First ``n_max`` terms of an array, a callable ``n -> s_1..s_n`` or an iterable."""
    if callable(s):
        arr = np.asarray(s(n_max), dtype=np.float64)
    elif isinstance(s, np.ndarray) or isinstance(s, (list, tuple)):
        arr = np.asarray(s, dtype=np.float64)[:n_max]
    else:
        arr = np.fromiter(itertools.islice(s, n_max), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("empty sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sequence has non-finite terms")
    return arr


def cesaro_limit(s: SequenceLike, n_max: int = 100_000, window: int = 100,
                 tol: float = 5e-2, floor: float = ERROR_FLOOR,
                 guard: float = OVERFLOW_GUARD) -> LimitReport:
    """Limit of the Cesaro means ``A_N = (1/N) sum_{k<=N} s_k``.

    Two estimators are compared on the tail ``N/8 <= n <= N``: the means
    themselves and the raw terms.  When the raw terms settle at least as well
    as the means they are used instead, because Cesaro summation preserves
    ordinary limits and the raw terms converge faster.  The spread of the
    chosen estimator on the tail is the error bound; the report is
    ``converged`` when that spread is at most ``tol * max(1, |value|)``.
    """
    terms = materialize(s, n_max)
    n = terms.size
    means = kernels.running_means(terms)
    start = min(int(n * TAIL_START), n - 1)
    last = means[-min(window, n):]
    monotone = bool(np.all(np.diff(last) >= 0))
    half = means[max(n // 2 - 1, 0)]
    if monotone and means[-1] > 0 and (means[-1] > guard or
                                       (n >= 2 * window and means[-1] >= GROWTH * half)):
        return LimitReport(UNBOUNDED, math.inf, (float(means[-1]), math.inf), math.inf, n)

    raw_tail, mean_tail = terms[start:], means[start:]
    raw_spread = float(raw_tail.max() - raw_tail.min())
    mean_spread = float(mean_tail.max() - mean_tail.min())
    tail = raw_tail if raw_spread <= mean_spread else mean_tail
    lo, hi = float(tail.min()), float(tail.max())
    value = float(tail[-1])
    error = max(floor, hi - lo)
    status = CONVERGED if hi - lo <= tol * max(1.0, abs(value)) else BRACKETED
    return LimitReport(status, value, (lo, hi), error, n)


def running_mean_table(s: SequenceLike, n_max: int, stride: int = 1) -> list[tuple[int, float]]:
    """``(N, A_N)`` pairs for external plotting."""
    means = kernels.running_means(materialize(s, n_max))
    idx = np.arange(stride - 1, means.size, stride)
    if idx.size == 0 or idx[-1] != means.size - 1:
        idx = np.append(idx, means.size - 1)
    return [(int(i) + 1, float(means[i])) for i in idx]
