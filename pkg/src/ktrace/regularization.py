"""Approximate units and the lower semi-continuous regularization of a trace."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import EmptyInput, NotPositive, NotStrictlyPositive
from .limits import BRACKETED, CONVERGED, LimitReport
from .matrix_core import as_matrix, classify, functional_calculus, operator_norm, pad, unit_ramp
from .weights import InfiniteRankDiagonal, Weight

STABLE_TOL = 1e-12
PROBE = 4096

Generator = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


def make_strictly_positive(contractions: Sequence) -> np.ndarray:
    """``sum_n 2^-n a_n`` over the list; smaller corners are zero padded."""
    if len(contractions) == 0:
        raise EmptyInput("need at least one positive contraction")
    mats = [as_matrix(a) for a in contractions]
    for a in mats:
        if classify(a) not in ("projection", "positive") or operator_norm(a) > 1 + 1e-10:
            raise NotPositive("inputs must be positive contractions")
    size = max(a.shape[0] for a in mats)
    return sum(2.0 ** -(n + 1) * pad(a, size) for n, a in enumerate(mats))


def harmonic_generator(k: np.ndarray) -> np.ndarray:
    """``diag(1/k)``: ``d_n`` is the projection onto the first ``n`` coordinates."""
    return 1.0 / np.asarray(k, dtype=np.float64)


def dyadic_generator(k: np.ndarray) -> np.ndarray:
    return 2.0 ** -np.asarray(k, dtype=np.float64)


@dataclass(frozen=True)
class ApproximateUnit:
    """``d_n = f_n(a0)`` for a strictly positive ``a0``.

    ``a0`` is a matrix (finite model) or a callable giving a positive,
    nonincreasing diagonal on 1-based indices (compact model); in the
    second case ``d_n`` is diagonal and supported on the indices with
    ``a0_k > 1/(n+1)``.
    """

    a0: Generator

    @property
    def is_diagonal(self) -> bool:
        return callable(self.a0)

    def support(self, n: int) -> int:
        """Number of nonzero diagonal entries of ``d_n`` (diagonal generators)."""
        cut = 1.0 / (n + 1)
        m = PROBE
        while True:
            vals = self.a0(np.arange(1, m + 1))
            count = int(np.sum(vals > cut))
            if count < m:
                return count
            m *= 2

    def d(self, n: int, size: Optional[int] = None) -> np.ndarray:
        f = unit_ramp(n)
        if not self.is_diagonal:
            return functional_calculus(f, self.a0)
        m = self.support(n) if size is None else size
        return np.diag(f(self.a0(np.arange(1, m + 1)))).astype(np.complex128)

    def ladder_residual(self, n: int, size: Optional[int] = None) -> float:
        """``||d_n d_{n+1} - d_n||``."""
        if self.is_diagonal and size is None:
            size = self.support(n + 1)
        dn, dn1 = self.d(n, size), self.d(n + 1, size)
        return operator_norm(dn @ dn1 - dn)

    def residual(self, n: int, a) -> float:
        """``||d_n a - a||`` for a corner element ``a``."""
        a = as_matrix(a)
        return operator_norm(self.d(n, a.shape[0]) @ a - a)


def approximate_unit(a0: Generator, probe: int = 512) -> ApproximateUnit:
    if callable(a0):
        vals = np.asarray(a0(np.arange(1, probe + 1)), dtype=np.float64)
        if np.any(vals <= 0):
            raise NotStrictlyPositive("diagonal generator has a zero entry")
        if np.any(np.diff(vals) > 0):
            raise ValueError("diagonal generator must be nonincreasing")
        return ApproximateUnit(a0)
    a0 = as_matrix(a0)
    if classify(a0) not in ("projection", "positive") or np.linalg.eigvalsh(a0)[0] <= 0:
        raise NotStrictlyPositive("generator is not strictly positive")
    return ApproximateUnit(a0)


def _compress(unit: ApproximateUnit, n: int, a) -> np.ndarray:
    """``d_n a d_n`` as a finite matrix."""
    if isinstance(a, InfiniteRankDiagonal):
        if not unit.is_diagonal:
            raise TypeError("formal elements need a diagonal approximate unit")
        m = max(unit.support(n), 1)
        dn = unit_ramp(n)(unit.a0(np.arange(1, m + 1)))
        return np.diag(dn * dn * np.diag(a.corner(m)))
    dn = unit.d(n, a.shape[0])
    return dn @ a @ dn


def regularization_series(tau: Weight, unit: ApproximateUnit, a, n_max: int = 64
                          ) -> tuple[list[float], bool]:
    """``tau(d_n a d_n)`` for ``n = 1, 2, ...`` and whether the sequence stabilized.

    Corner elements stop once ``d_n a = a``: every later ``d_m`` then fixes
    ``a`` too.  Formal elements stop when two consecutive values agree.
    """
    if isinstance(a, InfiniteRankDiagonal):
        if np.any(a.entries(np.arange(1, PROBE + 1)) < 0):
            raise NotPositive("formal element must have a nonnegative diagonal")
    else:
        a = as_matrix(a)
        if classify(a) not in ("projection", "positive"):
            raise NotPositive("regularization is evaluated on positive elements")
    values: list[float] = []
    for n in range(1, n_max + 1):
        values.append(float(tau(_compress(unit, n, a))))
        if isinstance(a, InfiniteRankDiagonal):
            if n > 1 and abs(values[-1] - values[-2]) <= STABLE_TOL:
                return values, True
        elif unit.residual(n, a) <= STABLE_TOL:
            return values, True
    return values, False


def regularize_trace(tau: Weight, unit: ApproximateUnit, a, n_max: int = 64) -> LimitReport:
    """``sup_n tau(d_n a d_n)``; ``bracketed`` with the last increment when not stabilized."""
    values, stable = regularization_series(tau, unit, a, n_max)
    last = max(values)
    if stable:
        return LimitReport(CONVERGED, last, (last, last), 0.0, len(values))
    inc = values[-1] - values[-2] if len(values) > 1 else 0.0
    return LimitReport(BRACKETED, last, (last, float("inf")), max(inc, 0.0), len(values))


def series_json(values: Sequence[float]) -> dict:
    return {str(n): v for n, v in enumerate(values, start=1)}


def domination_check(phi: Weight, tau: Weight, unit: ApproximateUnit, samples: Sequence,
                     n_max: int = 64, tol: float = 1e-8) -> bool:
    """``phi(a) <= tau~(a)`` on samples where ``phi <= tau`` holds."""
    for a in samples:
        if phi(a) > tau(a) + tol:
            raise ValueError("phi is not dominated by tau on the samples")
        if phi(a) > regularize_trace(tau, unit, a, n_max).value + tol:
            return False
    return True
