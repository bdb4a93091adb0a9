"""Traces that are densely defined but not lower semi-continuous.

``singular_tau`` weights the coordinates of a dimension-group element (or a
positive series of catalog projections) by ``k^exponent`` and takes the
Cesaro limit: exponent 2 gives the trace that is ``q`` on a projection with
tail ``q/k^2``; an exponent ``1 + eps`` with ``0 < eps < 1`` gives a trace
vanishing on every projection.  ``mu_function_trace`` is the analogous
construction on sampled functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from . import kernels
from .dimension_group import (DimensionGroupElement, FormalPositiveSeries, tail_pairing,
                              zeta_series)
from .errors import NotInScale
from .limits import LimitReport, cesaro_limit

Exponent = Union[int, Fraction, float]
N_MAX = 100_000
# Coefficients beyond n_max + GEO_PAD only enter through 2^-j terms.
GEO_PAD = 64


def _check_exponent(exponent: Exponent) -> float:
    e = float(exponent)
    if not 1.0 < e <= 2.0:
        raise ValueError("exponent must be 2 or 1 + eps with 0 < eps < 1")
    return e


def element_terms(g: DimensionGroupElement, n: int, exponent: Exponent) -> np.ndarray:
    """``k^exponent * tau_k(g)`` for ``k = 1..n``."""
    e = _check_exponent(exponent)
    k = np.arange(1, n + 1, dtype=np.float64)
    out = float(g.tail_q) * k ** (e - 2.0)
    head = min(n, g.tail_start - 1)
    if head:
        out[:head] = np.array([float(a) for a in g.prefix[:head]]) * k[:head] ** e
    return out


def series_terms(s: FormalPositiveSeries, n: int, exponent: Exponent) -> tuple[np.ndarray, float]:
    """Weighted coordinates of a series and a bound on the discarded far tail.

    Catalog coefficients are taken up to ``n + GEO_PAD``; past that index
    ``p_j`` contributes ``c_j 2^-j`` to every ``k <= n``.
    """
    e = _check_exponent(exponent)
    out = np.zeros(n, dtype=np.float64)
    far = 0.0
    if s.has_catalog:
        size = n + GEO_PAD
        coef = s.float_coefficients(size)
        length = size if s.length is None else min(size, s.length)
        out += kernels.catalog_terms(coef, n, e, length)
        if s.length is None or s.length > size:
            far = float(n) ** e * 2.0 ** (-size) * float(np.max(coef))
    for c, g in s.extra:
        out += float(c) * element_terms(g, n, e)
    return out, far


def _exact_limit(x, exponent: Exponent) -> Optional[Fraction]:
    """Exact value when ``x`` is a finite rational combination of scale elements."""
    if isinstance(x, FormalPositiveSeries):
        if not x.is_finite:
            return None
        try:
            g = x.as_element()
        except ValueError:
            return None
    else:
        g = x
    return tail_pairing(g) if float(exponent) == 2.0 else Fraction(0)


def singular_tau(x, exponent: Exponent = 2, n_max: int = N_MAX, J: int = 60,
                 window: int = 100, tol: float = 5e-2) -> LimitReport:
    """Cesaro limit of ``k^exponent tau_k(x)``.

    ``x`` is a :class:`DimensionGroupElement` or a :class:`FormalPositiveSeries`.
    Catalog series are evaluated in closed form over all indices the average
    touches; ``J`` sets how many leading terms are summed exactly for the
    attached rational head, not a truncation of the numerics.
    """
    if isinstance(x, DimensionGroupElement):
        if not x.is_positive():
            raise ValueError("singular traces are evaluated on positive elements")
        terms, far = element_terms(x, n_max, exponent), 0.0
    elif isinstance(x, FormalPositiveSeries):
        if J < 1:
            raise ValueError("J must be >= 1")
        terms, far = series_terms(x, n_max, exponent)
    else:
        raise TypeError(f"cannot evaluate a singular trace on {type(x).__name__}")
    report = cesaro_limit(terms, n_max, window, tol).with_extra_error(far)
    exact = _exact_limit(x, exponent)
    if exact is not None and report.converged:
        report = LimitReport(report.status, report.value, report.bracket,
                             report.error_bound, report.n_used, exact)
    return report


def singular_tau_on_projection(g: DimensionGroupElement, exponent: Exponent = 2) -> Fraction:
    """Exact value on a projection class: ``q`` for exponent 2, else 0."""
    _check_exponent(exponent)
    if not g.in_scale():
        raise NotInScale("element is not in the scale")
    if float(exponent) == 2.0:
        return g.tail_q
    # q k^(eps-1) -> 0, so the Cesaro limit vanishes
    return Fraction(0)


class GapWitness(NamedTuple):
    partial: LimitReport
    full: LimitReport
    gap_lower_bound: float

    def certifies(self, gap: float = 0.5) -> bool:
        """``full - partial >= gap`` up to the two error bounds."""
        return self.gap_lower_bound >= gap - (self.partial.error_bound + self.full.error_bound)


def lsc_gap_witness(M: int, n_max: int = N_MAX, J: int = 60,
                    full: Optional[LimitReport] = None) -> GapWitness:
    """Compare the truncation ``sum_{j<=M} p_j/j^2`` with the full series.

    The full value is at least ``1/2`` above every truncation although the
    truncations converge to the full series in norm.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    partial = singular_tau(zeta_series(M), 2, n_max, J)
    if full is None:
        full = singular_tau(zeta_series(), 2, n_max, J)
    gap = (full.value - full.error_bound) - (partial.value + partial.error_bound)
    return GapWitness(partial, full, gap)


@dataclass(frozen=True)
class SampledFunctionTrace:
    """Weights ``t_n`` and samples ``tau(b(x_n))`` along points escaping to infinity.

    Both are callables ``n -> array of the first n values``.
    """

    weights: Callable[[int], np.ndarray]
    samples: Callable[[int], np.ndarray]
    provenance: str = ""
    monotone_from: int = 1

    def terms(self, n: int) -> np.ndarray:
        t = np.asarray(self.weights(n), dtype=np.float64)
        s = np.asarray(self.samples(n), dtype=np.float64)
        if np.any(t <= 0):
            raise ValueError("weights must be positive")
        if np.any(np.diff(t[self.monotone_from - 1:]) < 0):
            raise ValueError("weights must be nondecreasing past monotone_from")
        if np.any(s < 0):
            raise ValueError("samples must be nonnegative")
        return t * s


def linear_weights(n: int) -> np.ndarray:
    return np.arange(1, n + 1, dtype=np.float64)


def g_pattern(tau_a: float = 1.0, weights: Callable[[int], np.ndarray] = linear_weights
              ) -> SampledFunctionTrace:
    """``g = sum_n t_n^-1 f_n ⊗ a``: sample ``tau(g(x_n)) = tau(a) / t_n``."""
    return SampledFunctionTrace(weights, lambda n: tau_a / weights(n),
                                f"sum t_n^-1 f_n (x) a, tau(a) = {tau_a}")


def truncated_pattern(L: int, tau_a: float = 1.0,
                      weights: Callable[[int], np.ndarray] = linear_weights
                      ) -> SampledFunctionTrace:
    """Compactly supported truncation ``sum_{n<=L} t_n^-1 f_n ⊗ a``."""

    def samples(n: int) -> np.ndarray:
        out = tau_a / weights(n)
        out[L:] = 0.0
        return out

    return SampledFunctionTrace(weights, samples, f"truncation at L = {L}")


def constant_pattern(value: float = 1.0,
                     weights: Callable[[int], np.ndarray] = linear_weights) -> SampledFunctionTrace:
    return SampledFunctionTrace(weights, lambda n: np.full(n, value), f"constant {value}")


def mu_function_trace(f: SampledFunctionTrace, n_max: int = N_MAX, window: int = 100,
                      tol: float = 5e-2) -> LimitReport:
    return cesaro_limit(f.terms, n_max, window, tol)


def cesaro_error_estimate(n: int) -> float:
    """``(log n + 1)/n``: observed order of the Cesaro error for ``q + O(1/k)`` terms."""
    return (math.log(n) + 1.0) / n
