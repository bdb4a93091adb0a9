"""Pairing weights and traces with K-theory classes.

``underline_psi`` is the infimum of ``psi_∞`` over the Murray-von Neumann
class of a projection; ``k00_pairing`` turns it into a homomorphism on
formal differences.  For traces, ``k0_pairing`` evaluates ``τ† ⊗ Tr_n`` on
projections over the unitization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import NotInKernel, NotProjection, OutsideIdeal, RankExceedsCorner
from .limits import BRACKETED, CONVERGED, LimitReport
from .matrix_core import as_matrix, classify, projection_rank
from .unitization import UnitizedElement
from .weights import (BlockTrace, DiagonalH, FiniteRankTrace, Weight, ZeroOnFiniteRank,
                      amplify_weight, ideal_membership)

DEFAULT_CORNER = 4096
STABLE_TOL = 1e-12

Representative = Union[np.ndarray, UnitizedElement]


@dataclass(frozen=True)
class KClass:
    """Formal difference ``[plus] - [minus]``."""

    plus: Representative
    minus: Representative

    def __post_init__(self):
        for rep in (self.plus, self.minus):
            ok = rep.is_projection() if isinstance(rep, UnitizedElement) else (
                classify(rep) == "projection")
            if not ok:
                raise NotProjection("class representatives must be projections")

    @property
    def over_unitization(self) -> bool:
        return isinstance(self.plus, UnitizedElement)


def corner_schedule(corner: int, rank: int) -> list[int]:
    """Powers of two from the first one covering ``rank`` up to ``corner`` (inclusive)."""
    sizes = []
    m = 1
    while m < corner:
        if m >= rank:
            sizes.append(m)
        m *= 2
    sizes.append(corner)
    return sizes


def _schedule_report(values: np.ndarray) -> LimitReport:
    """Nonincreasing upper bounds; the last increment brackets what is left."""
    last = float(values[-1])
    inc = float(values[-2] - values[-1]) if values.size > 1 else 0.0
    inc = max(inc, 0.0)
    if inc <= STABLE_TOL:
        return LimitReport(CONVERGED, last, (last, last), inc, values.size)
    return LimitReport(BRACKETED, last, (last - inc, last), inc, values.size)


def underline_psi(psi: Weight, e, schedule: Optional[Sequence[int]] = None,
                  corner: int = DEFAULT_CORNER, level: int = 1,
                  amplification: Optional[int] = None) -> LimitReport:
    """``inf { psi_∞(f) : f ~ e }``.

    Traces: the infimum is ``psi_∞(e)`` itself (exact ranks for block traces).
    ``diagonal_h``: competitors ``f`` of rank ``r`` live in ``M_k`` over the
    ``m``-corner, where ``psi_k`` is ``Tr((h ⊗ 1_k) f)``; the minimum is the
    sum of the ``r`` smallest entries of ``h_1..h_m`` each repeated ``k``
    times.  ``amplification`` fixes ``k`` (default ``r``, where the value
    ``r * min h`` no longer improves); ``k = 1`` keeps ``f`` in the corner
    itself.  The values over the schedule decrease to the infimum.
    """
    e = as_matrix(e)
    if classify(e) != "projection":
        raise NotProjection("underline_psi takes a projection")
    if isinstance(psi, BlockTrace):
        return LimitReport.exact_value(psi.rank_value(e, level))
    if isinstance(psi, FiniteRankTrace):
        return LimitReport.exact_value(projection_rank(e))
    if isinstance(psi, ZeroOnFiniteRank):
        return LimitReport.exact_value(0)
    if not isinstance(psi, DiagonalH):
        raise TypeError(f"no infimum rule for {psi!r}")
    r = projection_rank(e)
    if r == 0:
        return LimitReport.exact_value(0)
    k = r if amplification is None else int(amplification)
    if k < 1:
        raise ValueError("amplification must be >= 1")
    sizes = list(schedule) if schedule is not None else corner_schedule(corner, -(-r // k))
    sizes = sorted(m for m in sizes if m * k >= r)
    if not sizes:
        raise RankExceedsCorner(f"rank {r} exceeds every scheduled corner")
    h = np.repeat(psi.h(sizes[-1]), k)
    values = kernels.smallest_sums(h, r, k * np.array(sizes, dtype=np.int64))
    return _schedule_report(values)


def k00_pairing(psi: Weight, c: KClass, schedule: Optional[Sequence[int]] = None,
                corner: int = DEFAULT_CORNER, level: int = 1,
                amplification: Optional[int] = None) -> LimitReport:
    return (underline_psi(psi, c.plus, schedule, corner, level, amplification)
            - underline_psi(psi, c.minus, schedule, corner, level, amplification))


def _require_trace(tau: Weight):
    if not tau.is_trace:
        raise TypeError(f"{tau!r} is not a trace")


def unitized_trace(tau: Weight, x: UnitizedElement) -> complex:
    """``(τ† ⊗ Tr_n)(x)``: τ on the diagonal entries of the non-scalar part."""
    _require_trace(tau)
    value = amplify_weight(tau, x.level).linear(x.a)
    # corner matrices always have finite trace; only overflow lands outside
    if not np.isfinite(value):
        raise OutsideIdeal("non-scalar part is outside the finite ideal")
    return value


def _pad_to(x: UnitizedElement, level: int) -> UnitizedElement:
    if x.level == level:
        return x
    return x.direct_sum(UnitizedElement.from_model(np.zeros(((level - x.level) * x.inner,) * 2),
                                                   level - x.level))


def k0_pairing(tau: Weight, c: KClass, restrict: bool = False) -> float:
    """``τ†_*([e] - [f])``; with ``restrict`` the class must lie in ``K_0(A)``."""
    _require_trace(tau)
    if not c.over_unitization:
        raise TypeError("k0_pairing needs representatives over the unitization")
    level = max(c.plus.level, c.minus.level)
    plus, minus = _pad_to(c.plus, level), _pad_to(c.minus, level)
    if restrict and plus.scalar_rank() != minus.scalar_rank():
        raise NotInKernel("scalar ranks differ; class is not in K_0(A)")
    return float((unitized_trace(tau, plus) - unitized_trace(tau, minus)).real)


def canonical_k00_to_k0(c: KClass, inner: int) -> KClass:
    """The same representatives viewed over the unitization."""
    if c.over_unitization:
        raise TypeError("class is already over the unitization")
    plus, minus = as_matrix(c.plus), as_matrix(c.minus)
    return KClass(UnitizedElement.from_model(plus, plus.shape[0] // inner),
                  UnitizedElement.from_model(minus, minus.shape[0] // inner))


def positivity_audit(tau: Weight, sample_count: int, rng: np.random.Generator,
                     max_level: int = 3) -> bool:
    """``τ_*([e]) >= 0`` for random projections ``e`` over ``A``."""
    from .sampling import random_model_projection

    inner = sum(tau.model.blocks) if tau.model.kind == "finite_blocks" else 4
    for _ in range(sample_count):
        level = int(rng.integers(1, max_level + 1))
        e = random_model_projection(tau, level, rng, corner=inner)
        zero = np.zeros_like(e)
        value = k0_pairing(tau, canonical_k00_to_k0(KClass(e, zero), inner))
        if value < -1e-9:
            return False
    return True


def pairing_json(report: LimitReport) -> dict:
    return {"value": report.to_json()["value"], "bracket": report.to_json()["bracket"],
            "converged": report.converged}


# representative-change probes for the K_0 pairing

def _model_unitary(tau: Weight, level: int, rng: np.random.Generator, size: float) -> np.ndarray:
    from .sampling import nearby_unitary

    if tau.model.kind == "finite_blocks":
        structure = tau.model.structure
        return structure.assemble([nearby_unitary(level * b, rng, size) for b in structure.sizes],
                                  level)
    return nearby_unitary(level * 4, rng, size)


def conjugation_probe(tau: Weight, e: UnitizedElement, rng: np.random.Generator,
                      size: float = 0.05) -> float:
    """Drift of ``τ† ⊗ Tr_n`` when ``e`` is moved to a nearby ``e'`` and back by a similarity.

    ``e' = v e v*`` for a unitary ``v = (V - 1, 1)`` over the unitization;
    ``u = (2e'-1)(2e-1)+1`` satisfies ``u e u^-1 = e'``.
    """
    n = e.level
    one = UnitizedElement.identity(n, e.inner)
    v_model = _model_unitary(tau, n, rng, size)
    v = UnitizedElement(v_model - np.eye(v_model.shape[0]), np.eye(n))
    e_prime = v @ e @ v.H
    u = (2 * e_prime - one) @ (2 * e - one) + one
    moved = u @ e @ u.inverse()
    base = unitized_trace(tau, e)
    return max(abs(unitized_trace(tau, e_prime) - base), abs(unitized_trace(tau, moved) - base),
               float(np.max(np.abs((moved - e_prime).to_matrix()))))


def stabilization_probe(tau: Weight, c: KClass, r: UnitizedElement) -> float:
    """``|τ†_*([e ⊕ r] - [f ⊕ r]) - τ†_*([e] - [f])|``."""
    level = max(c.plus.level, c.minus.level)
    plus, minus = _pad_to(c.plus, level), _pad_to(c.minus, level)
    stabilized = KClass(plus.direct_sum(r), minus.direct_sum(r))
    return abs(k0_pairing(tau, stabilized) - k0_pairing(tau, c))


# ideal predicates over matrices of (possibly formal) entries

def entries_in_N(psi: Weight, grid: Sequence[Sequence]) -> tuple[bool, bool]:
    """``(x ∈ N_{psi_k}, every entry x_ji ∈ N_psi)`` for a ``k x k`` grid of entries.

    ``psi_k(x* x) = sum_i sum_j psi(x_ji* x_ji)``; formal entries are
    evaluated through their squared diagonal, finite grids are assembled
    and evaluated through the amplification.
    """
    from .weights import InfiniteRankDiagonal

    k = len(grid)
    flat = [entry for row in grid for entry in row]
    entry_ok = all(ideal_membership(psi, a) != "outside" for a in flat)
    if any(isinstance(a, InfiniteRankDiagonal) for a in flat):
        total = 0.0
        for a in flat:
            if isinstance(a, InfiniteRankDiagonal):
                total += psi(InfiniteRankDiagonal(lambda j, f=a.entries: np.abs(f(j)) ** 2,
                                                  bool(a.square_summable)))
            else:
                a = as_matrix(a)
                total += psi(a.conj().T @ a)
        return bool(np.isfinite(total)), entry_ok
    x = np.block([[as_matrix(a) for a in row] for row in grid])
    value = amplify_weight(psi, k)(x.conj().T @ x)
    return bool(np.isfinite(value)), entry_ok


def dense_approximant(psi: Weight, a, eps: float) -> tuple[np.ndarray, float, float]:
    """Finite-value element within ``eps`` of ``a``: ``(approximant, distance, psi value)``.

    Formal infinite-rank diagonals are cut to the first corner whose
    discarded entries are at most ``eps``.
    """
    from .weights import InfiniteRankDiagonal

    if isinstance(a, InfiniteRankDiagonal):
        m = 1
        while a.truncation_error(m) > eps:
            m *= 2
            if m > 1 << 24:
                raise ValueError("entries do not decay")
        return a.corner(m), a.truncation_error(m), psi(a.corner(m))
    a = as_matrix(a)
    return a, 0.0, psi(a)


def exact_underline(psi: DiagonalH, rank: int) -> Optional[float]:
    """``rank * min h`` when ``h`` has a constant tail (the minimum is then attained)."""
    if psi.h.tail is None:
        return None
    return rank * min(list(psi.h.values) + [psi.h.tail])
